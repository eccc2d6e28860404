#include "intan/factor_builder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "intan/csv.hpp"
#include "intan/econometrics.hpp"
#include "intan/error.hpp"

namespace intan {

std::string_view to_string(Weighting w) { return w == Weighting::Equal ? "equal" : "value"; }

std::optional<Weighting> parse_weighting(std::string_view s) {
  if (s == "equal" || s == "EQUAL") return Weighting::Equal;
  if (s == "value" || s == "VALUE") return Weighting::Value;
  return std::nullopt;
}

Breakpoints june_breakpoints(const DerivedSet& derived, int formation_year, const BreakpointOptions& options) {
  if (!(options.intan_low_pct >= 0 && options.intan_low_pct <= options.intan_high_pct &&
        options.intan_high_pct <= 100)) {
    throw Error(ErrorCode::InvalidConfig, "INTAN breakpoint percentiles must satisfy 0 <= low <= high <= 100");
  }
  const auto rows = derived.year(formation_year - 1);
  std::vector<double> caps, intans;
  for (const auto* r : rows) {
    if (options.nyse_only && r->exchange != Exchange::NYSE) continue;
    caps.push_back(r->market_equity_june);
    intans.push_back(r->intan);
  }
  const std::string where = "June " + std::to_string(formation_year);
  if (caps.empty()) throw Error(ErrorCode::InsufficientUniverse, where + ": no breakpoint firms");
  if (rows.size() < 3) {
    throw Error(ErrorCode::InsufficientUniverse, where + ": " + std::to_string(rows.size()) + " firms with INTAN");
  }
  Breakpoints bp;
  bp.formation_year = formation_year;
  bp.size_median = median(caps);
  bp.intan_low = percentile(intans, options.intan_low_pct);
  bp.intan_high = percentile(intans, options.intan_high_pct);
  return bp;
}

namespace {

constexpr std::array<const char*, 6> kCellLabels = {"S/L", "S/M", "S/H", "B/L", "B/M", "B/H"};
enum Cell { SL, SM, SH, BL, BM, BH };

int formation_year_of(CalendarMonth m) { return m.month >= 7 ? m.year : m.year - 1; }

struct ResolvedMember {
  std::size_t firm;
  double weight_base;
};

std::vector<ResolvedMember> resolve(const std::vector<PortfolioMember>& members, const Panel& panel) {
  std::vector<ResolvedMember> out;
  out.reserve(members.size());
  for (const auto& m : members) {
    if (auto idx = panel.firm_index(m.firm_id)) out.push_back({*idx, m.weight_base});
  }
  return out;
}

// Weighted mean over members with a return in month m; nullopt when none has one.
std::optional<double> weighted_return(const std::vector<ResolvedMember>& members, const Panel& panel,
                                      CalendarMonth m, Weighting weighting, std::size_t* count = nullptr) {
  double num = 0.0, den = 0.0;
  std::size_t n = 0;
  for (const auto& member : members) {
    auto r = panel.firm_return(member.firm, m);
    if (!r) continue;
    const double w = weighting == Weighting::Value ? member.weight_base : 1.0;
    num += w * *r;
    den += w;
    ++n;
  }
  if (count) *count = n;
  if (n == 0) return std::nullopt;
  return num / den;
}

}  // namespace

IntanftResult build_intanft(const Panel& panel, const DerivedSet& derived, const MonthWindow& window,
                            const IntanftOptions& options) {
  if (!panel.window().contains(window)) {
    throw Error(ErrorCode::WindowUncovered, window.str() + " outside panel window " + panel.window().str());
  }
  IntanftResult out;
  out.series.name = "INTANFT";
  for (auto label : kCellLabels) out.cells.push_back({label, {}});

  const int first = formation_year_of(window.start);
  const int last = formation_year_of(window.end);
  std::map<int, std::array<std::vector<ResolvedMember>, 6>> resolved;
  for (int year = first; year <= last; ++year) {
    const auto bp = june_breakpoints(derived, year, options.breakpoints);
    out.breakpoints.push_back(bp);
    std::array<std::vector<PortfolioMember>, 6> cells;
    for (const auto* r : derived.year(year - 1)) {
      const int size = r->market_equity_june <= bp.size_median ? 0 : 3;
      const int bin = r->intan <= bp.intan_low ? 0 : (r->intan > bp.intan_high ? 2 : 1);
      cells[size + bin].push_back({r->firm_id, r->market_equity_june});
    }
    auto& res = resolved[year];
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        throw Error(ErrorCode::EmptyCell, "June " + std::to_string(year) + " cell " + kCellLabels[c] + " has no members");
      }
      res[c] = resolve(cells[c], panel);
      out.cells[c].members[year] = std::move(cells[c]);
    }
  }

  for (const auto& m : window.months()) {
    const int year = formation_year_of(m);
    const auto& res = resolved.at(year);
    std::array<double, 6> r{};
    for (int c : {SL, SH, BL, BH}) {
      auto v = weighted_return(res[c], panel, m, options.weighting);
      if (!v) {
        throw Error(ErrorCode::EmptyCell, "June " + std::to_string(year) + " cell " + kCellLabels[c] +
                                              " has no returns in " + m.str());
      }
      r[c] = *v;
    }
    out.series.months.push_back(m);
    out.series.values.push_back(0.5 * (r[SH] + r[BH]) - 0.5 * (r[SL] + r[BL]));
  }
  return out;
}

namespace {

struct Ranked {
  const DerivedFirmYear* rec;
  double value;
};

// Bin index (0-based) per entry of `ranked`, which must already be in (value, firm_id) order.
std::vector<int> bin_indices(std::size_t n, int n_bins) {
  std::vector<int> out(n);
  const std::size_t base = n / n_bins;
  const std::size_t extra = n % n_bins;
  std::size_t pos = 0;
  for (int b = 0; b < n_bins; ++b) {
    const std::size_t size = base + (static_cast<std::size_t>(b) < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) out[pos++] = b;
  }
  return out;
}

std::vector<Ranked> ranked(const std::vector<const DerivedFirmYear*>& rows, Variable v) {
  std::vector<Ranked> out;
  for (const auto* r : rows) {
    if (auto x = r->value(v); x && std::isfinite(*x)) out.push_back({r, *x});
  }
  std::stable_sort(out.begin(), out.end(), [](const Ranked& a, const Ranked& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.rec->firm_id < b.rec->firm_id;
  });
  return out;
}

void check_bins(int n_bins) {
  if (n_bins < 1) throw Error(ErrorCode::InvalidConfig, "number of bins must be positive");
}

void sort_members(std::vector<PortfolioMember>& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.firm_id < b.firm_id; });
}

}  // namespace

std::vector<Portfolio> quantile_sort(const DerivedSet& derived, Variable variable, int n_bins, int first_year,
                                     int last_year) {
  check_bins(n_bins);
  std::vector<Portfolio> out(n_bins);
  for (int b = 0; b < n_bins; ++b) out[b].label = std::string(to_string(variable)) + std::to_string(b + 1);
  for (int year = first_year; year <= last_year; ++year) {
    const auto r = ranked(derived.year(year - 1), variable);
    if (r.size() < static_cast<std::size_t>(n_bins)) {
      throw Error(ErrorCode::InsufficientUniverse, std::string(to_string(variable)) + " sort for " +
                                                       std::to_string(year) + ": " + std::to_string(r.size()) +
                                                       " firms, " + std::to_string(n_bins) + " bins");
    }
    const auto bins = bin_indices(r.size(), n_bins);
    for (auto& p : out) p.members[year];
    for (std::size_t i = 0; i < r.size(); ++i) {
      out[bins[i]].members[year].push_back({r[i].rec->firm_id, r[i].rec->market_equity});
    }
    for (auto& p : out) sort_members(p.members[year]);
  }
  return out;
}

DoubleSort independent_double_sort(const DerivedSet& derived, Variable a, int a_bins, Variable b, int b_bins,
                                   int first_year, int last_year) {
  check_bins(a_bins);
  check_bins(b_bins);
  DoubleSort out;
  for (int i = 0; i < a_bins; ++i) {
    for (int j = 0; j < b_bins; ++j) {
      out.cells.push_back({std::string(to_string(a)) + std::to_string(i + 1) + "/" + std::string(to_string(b)) +
                               std::to_string(j + 1),
                           {}});
    }
  }
  for (int year = first_year; year <= last_year; ++year) {
    std::vector<const DerivedFirmYear*> both;
    for (const auto* r : derived.year(year - 1)) {
      auto x = r->value(a);
      auto y = r->value(b);
      if (x && y && std::isfinite(*x) && std::isfinite(*y)) both.push_back(r);
    }
    const auto ra = ranked(both, a);
    const auto rb = ranked(both, b);
    if (ra.size() < static_cast<std::size_t>(std::max(a_bins, b_bins))) {
      throw Error(ErrorCode::InsufficientUniverse, "double sort for " + std::to_string(year) + ": " +
                                                       std::to_string(ra.size()) + " firms");
    }
    std::map<std::string, int> bin_a, bin_b;
    const auto ia = bin_indices(ra.size(), a_bins);
    const auto ib = bin_indices(rb.size(), b_bins);
    for (std::size_t k = 0; k < ra.size(); ++k) bin_a[ra[k].rec->firm_id] = ia[k];
    for (std::size_t k = 0; k < rb.size(); ++k) bin_b[rb[k].rec->firm_id] = ib[k];
    for (auto& c : out.cells) c.members[year];
    for (const auto* r : both) {
      const int cell = bin_a.at(r->firm_id) * b_bins + bin_b.at(r->firm_id);
      out.cells[cell].members[year].push_back({r->firm_id, r->market_equity});
    }
    for (auto& c : out.cells) {
      sort_members(c.members[year]);
      if (c.members[year].empty()) out.empty_cells.push_back({year, c.label});
    }
  }
  return out;
}

PortfolioSeries portfolio_returns(const Portfolio& portfolio, const Panel& panel, const MonthWindow& window,
                                  Weighting weighting) {
  PortfolioSeries out;
  out.label = portfolio.label;
  out.weighting = weighting;
  std::map<int, std::vector<ResolvedMember>> resolved;
  for (const auto& [year, members] : portfolio.members) resolved[year] = resolve(members, panel);
  for (const auto& m : window.months()) {
    auto it = resolved.find(m.year);
    if (it == resolved.end()) continue;
    std::size_t n = 0;
    auto r = weighted_return(it->second, panel, m, weighting, &n);
    if (!r) continue;
    out.months.push_back(m);
    out.returns.push_back(*r);
    out.excess_returns.push_back(*r - panel.factor(m).rf);
    out.n_firms.push_back(n);
  }
  return out;
}

std::string write_memberships(const std::vector<Portfolio>& portfolios, std::string_view prefix) {
  std::ostringstream out;
  for (const auto& p : portfolios) {
    for (const auto& [year, members] : p.members) {
      for (const auto& m : members) out << year << ',' << prefix << p.label << ',' << m.firm_id << '\n';
    }
  }
  return out.str();
}

}  // namespace intan
