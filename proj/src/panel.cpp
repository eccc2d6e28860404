#include "intan/panel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "intan/csv.hpp"
#include "intan/error.hpp"

namespace intan {

const std::vector<std::string> kFundamentalsColumns = {
    "firm_id",      "fiscal_year",  "sic",        "revenue",          "cogs",
    "sga_expense",  "rd_expense",   "interest_expense", "net_income", "total_assets",
    "total_assets_prior", "book_equity", "market_equity", "market_equity_june", "ltg",
    "exchange"};
const std::vector<std::string> kReturnsColumns = {"firm_id", "year", "month", "total_return"};
const std::vector<std::string> kFactorsColumns = {"year", "month", "mktrf", "smb", "hml",
                                                  "rmw",  "cma",   "umd",   "rf"};

std::string_view to_string(Exchange e) {
  switch (e) {
    case Exchange::NYSE: return "NYSE";
    case Exchange::AMEX: return "AMEX";
    case Exchange::NASDAQ: return "NASDAQ";
  }
  return "NYSE";
}

std::optional<Exchange> parse_exchange(std::string_view s) {
  std::string up(s);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "NYSE") return Exchange::NYSE;
  if (up == "AMEX") return Exchange::AMEX;
  if (up == "NASDAQ") return Exchange::NASDAQ;
  return std::nullopt;
}

namespace {

// Maps required column names to positions; throws SchemaMismatch naming the first absent one.
std::vector<std::optional<std::size_t>> resolve_columns(const csv::Table& table,
                                                        const std::vector<std::string>& names,
                                                        const std::set<std::string>& optional_columns = {}) {
  std::vector<std::optional<std::size_t>> pos;
  for (const auto& name : names) {
    auto p = table.column(name);
    if (!p && !optional_columns.contains(name)) {
      throw Error(ErrorCode::SchemaMismatch, "missing column '" + name + "'");
    }
    pos.push_back(p);
  }
  return pos;
}

struct RowRejected {
  std::string reason;
  bool missing_required = false;
};

class RowReader {
 public:
  RowReader(const std::vector<std::string>& row, const std::vector<std::optional<std::size_t>>& pos,
            const std::vector<std::string>& names)
      : row_(row), pos_(pos), names_(names) {}

  std::string_view cell(std::size_t field) const {
    auto p = pos_[field];
    if (!p || *p >= row_.size()) return {};
    return row_[*p];
  }

  std::optional<double> optional_number(std::size_t field) const {
    auto text = cell(field);
    if (csv::trim(text).empty()) return std::nullopt;
    auto v = csv::parse_double(text);
    if (!v || !std::isfinite(*v)) throw RowRejected{"malformed " + names_[field]};
    return v;
  }

  double number(std::size_t field, bool needed_for_ratios = false) const {
    auto v = optional_number(field);
    if (!v) {
      throw RowRejected{"missing " + names_[field] + (needed_for_ratios ? " (needed for MTB/ROE/SGA)" : ""),
                        needed_for_ratios};
    }
    return *v;
  }

  long integer(std::size_t field) const {
    auto v = csv::parse_int(cell(field));
    if (!v) throw RowRejected{"malformed " + names_[field]};
    return *v;
  }

 private:
  const std::vector<std::string>& row_;
  const std::vector<std::optional<std::size_t>>& pos_;
  const std::vector<std::string>& names_;
};

template <typename Record>
void reject(LoadResult<Record>& result, std::size_t row, const RowRejected& r, const LoadOptions& options) {
  if (r.missing_required) {
    ++result.dropped_missing;
  } else if (options.strict) {
    throw Error(ErrorCode::InvalidRecord, "row " + std::to_string(row) + ": " + r.reason);
  }
  result.quarantined.push_back({row, r.reason});
}

bool is_digit_string(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

FirmYearRecord read_fundamentals_row(const RowReader& r) {
  enum : std::size_t {
    kFirm, kYear, kSic, kRevenue, kCogs, kSga, kRd, kInterest, kNetIncome, kAssets, kAssetsPrior,
    kBookEquity, kMarketEquity, kMarketEquityJune, kLtg, kExchange
  };
  FirmYearRecord rec;
  rec.firm_id = std::string(csv::trim(r.cell(kFirm)));
  if (rec.firm_id.empty()) throw RowRejected{"missing firm_id"};
  rec.fiscal_year = static_cast<int>(r.integer(kYear));
  rec.sic = std::string(csv::trim(r.cell(kSic)));
  if (!is_digit_string(rec.sic) || rec.sic.size() < 2 || rec.sic.size() > 4) {
    throw RowRejected{"invariant violated: sic must be a 2-4 digit string"};
  }
  auto exchange = parse_exchange(csv::trim(r.cell(kExchange)));
  if (!exchange) throw RowRejected{"malformed exchange"};
  rec.exchange = *exchange;

  // Fields the ratio definitions need are checked first so such rows count as missing-data drops.
  rec.revenue = r.number(kRevenue, true);
  rec.sga_expense = r.number(kSga, true);
  rec.net_income = r.number(kNetIncome, true);
  rec.book_equity = r.number(kBookEquity, true);
  rec.market_equity = r.number(kMarketEquity, true);

  rec.cogs = r.number(kCogs);
  rec.rd_expense = r.optional_number(kRd).value_or(0.0);
  rec.interest_expense = r.number(kInterest);
  rec.total_assets = r.number(kAssets);
  rec.total_assets_prior = r.number(kAssetsPrior);
  rec.market_equity_june = r.number(kMarketEquityJune);
  rec.ltg = r.optional_number(kLtg);

  if (rec.rd_expense < 0) throw RowRejected{"invariant violated: rd_expense >= 0"};
  if (rec.total_assets <= 0) throw RowRejected{"invariant violated: total_assets > 0"};
  if (rec.total_assets_prior <= 0) throw RowRejected{"invariant violated: total_assets_prior > 0"};
  if (rec.market_equity <= 0) throw RowRejected{"invariant violated: market_equity > 0"};
  if (rec.market_equity_june <= 0) throw RowRejected{"invariant violated: market_equity_june > 0"};
  return rec;
}

}  // namespace

LoadResult<FirmYearRecord> parse_fundamentals(std::string_view text, const LoadOptions& options) {
  auto table = csv::parse(text, options.delimiter);
  auto pos = resolve_columns(table, kFundamentalsColumns, {"ltg"});
  if (table.rows.empty()) throw Error(ErrorCode::EmptyInput, "fundamentals file has no data rows");

  LoadResult<FirmYearRecord> result;
  std::set<std::pair<std::string, int>> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto row_no = table.row_numbers[i];
    try {
      auto rec = read_fundamentals_row(RowReader(table.rows[i], pos, kFundamentalsColumns));
      if (!seen.emplace(rec.firm_id, rec.fiscal_year).second) {
        throw Error(ErrorCode::DuplicateKey, "row " + std::to_string(row_no) + ": firm " + rec.firm_id +
                                                 " fiscal_year " + std::to_string(rec.fiscal_year));
      }
      result.records.push_back(std::move(rec));
    } catch (const RowRejected& r) {
      reject(result, row_no, r, options);
    }
  }
  return result;
}

LoadResult<FirmYearRecord> load_fundamentals(const std::filesystem::path& path, const LoadOptions& options) {
  return parse_fundamentals(csv::read_file(path), options);
}

LoadResult<MonthlyReturnRecord> parse_returns(std::string_view text, const LoadOptions& options) {
  auto table = csv::parse(text, options.delimiter);
  auto pos = resolve_columns(table, kReturnsColumns);
  if (table.rows.empty()) throw Error(ErrorCode::EmptyInput, "returns file has no data rows");

  LoadResult<MonthlyReturnRecord> result;
  std::set<std::pair<std::string, long>> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto row_no = table.row_numbers[i];
    try {
      RowReader r(table.rows[i], pos, kReturnsColumns);
      MonthlyReturnRecord rec;
      rec.firm_id = std::string(csv::trim(r.cell(0)));
      if (rec.firm_id.empty()) throw RowRejected{"missing firm_id"};
      rec.month = CalendarMonth(static_cast<int>(r.integer(1)), static_cast<int>(r.integer(2)));
      if (!rec.month.valid()) throw RowRejected{"invariant violated: month in [1,12]"};
      rec.total_return = r.number(3);
      if (rec.total_return <= -1.0) throw RowRejected{"invariant violated: total_return > -1"};
      if (!seen.emplace(rec.firm_id, rec.month.index()).second) {
        throw Error(ErrorCode::DuplicateKey,
                    "row " + std::to_string(row_no) + ": firm " + rec.firm_id + " month " + rec.month.str());
      }
      result.records.push_back(std::move(rec));
    } catch (const RowRejected& r) {
      reject(result, row_no, r, options);
    }
  }
  return result;
}

LoadResult<MonthlyReturnRecord> load_returns(const std::filesystem::path& path, const LoadOptions& options) {
  return parse_returns(csv::read_file(path), options);
}

std::vector<FactorObservation> parse_factors(std::string_view text, const MonthWindow& window,
                                             const LoadOptions& options) {
  auto table = csv::parse(text, options.delimiter);
  auto pos = resolve_columns(table, kFactorsColumns);
  if (table.rows.empty()) throw Error(ErrorCode::EmptyInput, "factors file has no data rows");

  std::map<long, FactorObservation> by_month;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto row_no = table.row_numbers[i];
    RowReader r(table.rows[i], pos, kFactorsColumns);
    try {
      CalendarMonth m(static_cast<int>(r.integer(0)), static_cast<int>(r.integer(1)));
      if (!m.valid()) throw RowRejected{"invariant violated: month in [1,12]"};
      if (!window.contains(m)) continue;
      FactorObservation obs{m, r.number(2), r.number(3), r.number(4), r.number(5),
                            r.number(6), r.number(7), r.number(8)};
      if (!by_month.emplace(m.index(), obs).second) {
        throw Error(ErrorCode::DuplicateKey, "row " + std::to_string(row_no) + ": month " + m.str());
      }
    } catch (const RowRejected& rej) {
      throw Error(ErrorCode::InvalidRecord, "factors row " + std::to_string(row_no) + ": " + rej.reason);
    }
  }
  std::vector<FactorObservation> out;
  out.reserve(by_month.size());
  for (auto m : window.months()) {
    auto it = by_month.find(m.index());
    if (it == by_month.end()) throw Error(ErrorCode::GapInSeries, m.str());
    out.push_back(it->second);
  }
  return out;
}

std::vector<FactorObservation> load_factors(const std::filesystem::path& path, const MonthWindow& window,
                                            const LoadOptions& options) {
  return parse_factors(csv::read_file(path), window, options);
}

namespace {

void join(std::ostringstream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

}  // namespace

std::string write_fundamentals(const std::vector<FirmYearRecord>& records) {
  using csv::format_double;
  std::ostringstream out;
  join(out, kFundamentalsColumns);
  for (const auto& r : records) {
    out << r.firm_id << ',' << r.fiscal_year << ',' << r.sic << ',' << format_double(r.revenue) << ','
        << format_double(r.cogs) << ',' << format_double(r.sga_expense) << ',' << format_double(r.rd_expense)
        << ',' << format_double(r.interest_expense) << ',' << format_double(r.net_income) << ','
        << format_double(r.total_assets) << ',' << format_double(r.total_assets_prior) << ','
        << format_double(r.book_equity) << ',' << format_double(r.market_equity) << ','
        << format_double(r.market_equity_june) << ',' << (r.ltg ? format_double(*r.ltg) : "") << ','
        << to_string(r.exchange) << '\n';
  }
  return out.str();
}

std::string write_returns(const std::vector<MonthlyReturnRecord>& records) {
  std::ostringstream out;
  join(out, kReturnsColumns);
  for (const auto& r : records) {
    out << r.firm_id << ',' << r.month.year << ',' << r.month.month << ',' << csv::format_double(r.total_return)
        << '\n';
  }
  return out.str();
}

std::string write_factors(const std::vector<FactorObservation>& factors) {
  using csv::format_double;
  std::ostringstream out;
  join(out, kFactorsColumns);
  for (const auto& f : factors) {
    out << f.month.year << ',' << f.month.month << ',' << format_double(f.mktrf) << ',' << format_double(f.smb)
        << ',' << format_double(f.hml) << ',' << format_double(f.rmw) << ',' << format_double(f.cma) << ','
        << format_double(f.umd) << ',' << format_double(f.rf) << '\n';
  }
  return out.str();
}

std::string write_quarantine(std::string_view source, const std::vector<QuarantinedRow>& rows) {
  std::ostringstream out;
  out << "source,row,reason\n";
  for (const auto& q : rows) out << source << ',' << q.row << ',' << q.reason << '\n';
  return out.str();
}

Panel::Panel(std::vector<FirmYearRecord> fundamentals, std::vector<MonthlyReturnRecord> returns,
             std::vector<FactorObservation> factors, MonthWindow window, const BuildOptions& options)
    : fundamentals_(std::move(fundamentals)), window_(window) {
  if (window_.size() <= 0) throw Error(ErrorCode::WindowMismatch, "empty panel window");

  // Factors: exactly one per window month.
  std::map<long, FactorObservation> by_month;
  for (auto& f : factors) {
    if (!window_.contains(f.month)) continue;
    if (!by_month.emplace(f.month.index(), f).second) throw Error(ErrorCode::DuplicateKey, f.month.str());
  }
  for (auto m : window_.months()) {
    auto it = by_month.find(m.index());
    if (it == by_month.end()) throw Error(ErrorCode::GapInSeries, m.str());
    factors_.push_back(it->second);
  }

  for (std::size_t i = 0; i < fundamentals_.size(); ++i) {
    const auto& r = fundamentals_[i];
    if (!fundamentals_lookup_.emplace(std::pair{r.firm_id, r.fiscal_year}, i).second) {
      throw Error(ErrorCode::DuplicateKey, "fundamentals " + r.firm_id + " " + std::to_string(r.fiscal_year));
    }
    if (!firm_lookup_.contains(r.firm_id)) {
      firm_lookup_.emplace(r.firm_id, 0);
      firm_ids_.push_back(r.firm_id);
    }
  }
  std::sort(firm_ids_.begin(), firm_ids_.end());
  for (std::size_t i = 0; i < firm_ids_.size(); ++i) firm_lookup_[firm_ids_[i]] = i;

  const auto months = static_cast<std::size_t>(window_.size());
  return_grid_.assign(firm_ids_.size() * months, std::numeric_limits<double>::quiet_NaN());
  std::set<std::string> orphan_set;
  for (auto& r : returns) {
    if (!window_.contains(r.month)) continue;
    auto it = firm_lookup_.find(r.firm_id);
    if (it == firm_lookup_.end()) {
      orphan_set.insert(r.firm_id);
      continue;
    }
    auto& cell = return_grid_[it->second * months + static_cast<std::size_t>(r.month.index() - window_.start.index())];
    if (!std::isnan(cell)) throw Error(ErrorCode::DuplicateKey, r.firm_id + " " + r.month.str());
    cell = r.total_return;
    returns_.push_back(std::move(r));
  }
  orphans_.assign(orphan_set.begin(), orphan_set.end());
  if (!orphans_.empty() && !options.tolerate_orphans) {
    throw Error(ErrorCode::OrphanReturns, std::to_string(orphans_.size()) + " firm(s) without fundamentals, first " +
                                              orphans_.front());
  }
}

const FactorObservation& Panel::factor(CalendarMonth m) const {
  if (!window_.contains(m)) throw Error(ErrorCode::WindowUncovered, m.str() + " outside " + window_.str());
  return factors_[static_cast<std::size_t>(m.index() - window_.start.index())];
}

std::optional<std::size_t> Panel::firm_index(std::string_view firm_id) const {
  auto it = firm_lookup_.find(std::string(firm_id));
  if (it == firm_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Panel::firm_return(std::size_t firm, CalendarMonth m) const {
  if (firm >= firm_ids_.size() || !window_.contains(m)) return std::nullopt;
  double v = return_grid_[firm * static_cast<std::size_t>(window_.size()) +
                          static_cast<std::size_t>(m.index() - window_.start.index())];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

std::optional<double> Panel::firm_return(std::string_view firm_id, CalendarMonth m) const {
  auto idx = firm_index(firm_id);
  if (!idx) return std::nullopt;
  return firm_return(*idx, m);
}

const FirmYearRecord* Panel::fundamentals_for(std::string_view firm_id, int fiscal_year) const {
  auto it = fundamentals_lookup_.find(std::pair{std::string(firm_id), fiscal_year});
  return it == fundamentals_lookup_.end() ? nullptr : &fundamentals_[it->second];
}

Panel build_panel(std::vector<FirmYearRecord> fundamentals, std::vector<MonthlyReturnRecord> returns,
                  std::vector<FactorObservation> factors, const MonthWindow& window, const BuildOptions& options) {
  return Panel(std::move(fundamentals), std::move(returns), std::move(factors), window, options);
}

}  // namespace intan
