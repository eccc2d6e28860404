#include "intan/fundamentals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "intan/error.hpp"

namespace intan {

std::string_view to_string(Variable v) {
  switch (v) {
    case Variable::MTB: return "MTB";
    case Variable::ROE: return "ROE";
    case Variable::RD: return "RD";
    case Variable::SGA: return "SGA";
    case Variable::OP: return "OP";
    case Variable::INTAN: return "INTAN";
    case Variable::LTG: return "LTG";
  }
  return "?";
}

std::optional<Variable> parse_variable(std::string_view s) {
  for (auto v : {Variable::MTB, Variable::ROE, Variable::RD, Variable::SGA, Variable::OP, Variable::INTAN,
                 Variable::LTG}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::string_view to_string(FallbackLevel level) {
  switch (level) {
    case FallbackLevel::SIC3: return "SIC3";
    case FallbackLevel::SIC2: return "SIC2";
    case FallbackLevel::YEAR_POOLED: return "YEAR_POOLED";
  }
  return "?";
}

std::string_view to_string(FirmGroup g) {
  switch (g) {
    case FirmGroup::All: return "All firms";
    case FirmGroup::Tech: return "Technology firms";
    case FirmGroup::NonTech: return "Non-tech firms";
  }
  return "?";
}

bool classify_tech(std::string_view sic) {
  const bool digits = std::all_of(sic.begin(), sic.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (sic.size() < 2 || sic.size() > 4 || !digits) {
    throw Error(ErrorCode::MalformedSic, "'" + std::string(sic) + "'");
  }
  static constexpr std::string_view kTechPrefixes[] = {"283", "357", "366", "38", "48", "737"};
  return std::any_of(std::begin(kTechPrefixes), std::end(kTechPrefixes),
                     [&](std::string_view p) { return sic.starts_with(p); });
}

double SgaModelFit::predict(const SgaObservation& obs) const {
  return alpha + beta * obs.scaled_revenue + gamma * (obs.revenue_decrease ? 1.0 : 0.0) +
         lambda * (obs.loss ? 1.0 : 0.0);
}

std::vector<SgaObservation> make_sga_observations(std::span<const FirmYearRecord> records) {
  std::map<std::pair<std::string, int>, double> revenue_by_key;
  for (const auto& r : records) revenue_by_key[{r.firm_id, r.fiscal_year}] = r.revenue;

  std::vector<SgaObservation> out;
  for (const auto& r : records) {
    const double avg = 0.5 * (r.total_assets + r.total_assets_prior);
    if (!(r.total_assets > 0 && r.total_assets_prior > 0)) continue;
    SgaObservation obs;
    obs.firm_id = r.firm_id;
    obs.fiscal_year = r.fiscal_year;
    obs.sic = r.sic;
    obs.avg_assets = avg;
    obs.scaled_sga = r.sga_expense / avg;
    obs.scaled_revenue = r.revenue / avg;
    auto prior = revenue_by_key.find({r.firm_id, r.fiscal_year - 1});
    obs.revenue_decrease = prior != revenue_by_key.end() && r.revenue < prior->second;
    obs.loss = r.net_income < 0;
    out.push_back(std::move(obs));
  }
  return out;
}

namespace {

std::string sic_prefix(const std::string& sic, std::size_t digits) {
  return sic.size() >= digits ? sic.substr(0, digits) : sic;
}

std::optional<SgaModelFit> fit_group(std::span<const SgaObservation> obs, std::vector<std::size_t> members,
                                     const std::string& industry, int year, FallbackLevel level) {
  const std::size_t n = members.size();
  std::vector<double> y(n), revenue(n), decrease(n), loss(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = obs[members[i]];
    y[i] = o.scaled_sga;
    revenue[i] = o.scaled_revenue;
    decrease[i] = o.revenue_decrease ? 1.0 : 0.0;
    loss[i] = o.loss ? 1.0 : 0.0;
  }
  auto varies = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [&](double x) { return x != v.front(); });
  };

  SgaModelFit fit;
  fit.industry = industry;
  fit.year = year;
  fit.level = level;
  fit.n_obs = n;
  fit.gamma_estimated = varies(decrease);
  fit.lambda_estimated = varies(loss);

  std::vector<Column> cols{revenue};
  std::vector<std::string> names{"revenue"};
  if (fit.gamma_estimated) {
    cols.push_back(decrease);
    names.emplace_back("revenue_decrease");
  }
  if (fit.lambda_estimated) {
    cols.push_back(loss);
    names.emplace_back("loss");
  }
  RegressionResult reg;
  try {
    reg = ols(y, cols, true, names);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient || e.code() == ErrorCode::TooFewObservations) return std::nullopt;
    throw;
  }
  fit.alpha = reg.coefficients[0];
  fit.beta = reg.coefficients[1];
  fit.std_errors[0] = reg.std_errors[0];
  fit.std_errors[1] = reg.std_errors[1];
  std::size_t next = 2;
  if (fit.gamma_estimated) {
    fit.gamma = reg.coefficients[next];
    fit.std_errors[2] = reg.std_errors[next++];
  }
  if (fit.lambda_estimated) {
    fit.lambda = reg.coefficients[next];
    fit.std_errors[3] = reg.std_errors[next];
  }
  fit.estimation_sample = std::move(members);
  return fit;
}

}  // namespace

SgaFitSet fit_sga_model(std::span<const SgaObservation> observations, const SgaOptions& options) {
  if (options.min_group_size < 5) {
    throw Error(ErrorCode::InvalidConfig, "SG&A minimum group size must be at least 5");
  }
  SgaFitSet out;
  out.fit_of.assign(observations.size(), SgaFitSet::kUnassigned);

  std::map<int, std::vector<std::size_t>> by_year;
  for (std::size_t i = 0; i < observations.size(); ++i) by_year[observations[i].fiscal_year].push_back(i);

  for (auto& [year, members] : by_year) {
    auto assign = [&](SgaModelFit fit, const std::vector<std::size_t>& assigned) {
      for (auto i : assigned) out.fit_of[i] = out.fits.size();
      out.fits.push_back(std::move(fit));
    };
    auto unusable = [&](const std::string& why) {
      if (options.skip_unusable_years) return;
      throw Error(ErrorCode::NoUsableFit, "fiscal year " + std::to_string(year) + ": " + why);
    };

    if (members.size() < options.min_group_size) {
      unusable(std::to_string(members.size()) + " firm-years, minimum " + std::to_string(options.min_group_size));
      continue;
    }

    std::map<std::string, std::vector<std::size_t>> sic3, sic2;
    for (auto i : members) {
      sic3[sic_prefix(observations[i].sic, 3)].push_back(i);
      sic2[sic_prefix(observations[i].sic, 2)].push_back(i);
    }

    std::vector<std::size_t> leftover;
    for (auto& [code, group] : sic3) {
      std::optional<SgaModelFit> fit;
      if (group.size() >= options.min_group_size) {
        fit = fit_group(observations, group, code, year, FallbackLevel::SIC3);
      }
      if (fit) {
        assign(std::move(*fit), group);
      } else {
        leftover.insert(leftover.end(), group.begin(), group.end());
      }
    }

    std::map<std::string, std::vector<std::size_t>> leftover_by_sic2;
    for (auto i : leftover) leftover_by_sic2[sic_prefix(observations[i].sic, 2)].push_back(i);
    std::vector<std::size_t> pooled;
    for (auto& [code, waiting] : leftover_by_sic2) {
      const auto& group = sic2[code];
      std::optional<SgaModelFit> fit;
      if (group.size() >= options.min_group_size) {
        fit = fit_group(observations, group, code, year, FallbackLevel::SIC2);
      }
      if (fit) {
        assign(std::move(*fit), waiting);
      } else {
        pooled.insert(pooled.end(), waiting.begin(), waiting.end());
      }
    }

    if (!pooled.empty()) {
      std::sort(pooled.begin(), pooled.end());
      // Pool the stragglers alone when they are numerous enough; otherwise use the whole year.
      std::optional<SgaModelFit> fit;
      if (pooled.size() >= options.min_group_size) {
        fit = fit_group(observations, pooled, "", year, FallbackLevel::YEAR_POOLED);
      }
      if (!fit) fit = fit_group(observations, members, "", year, FallbackLevel::YEAR_POOLED);
      if (!fit) {
        unusable("year-pooled SG&A regression is rank deficient");
        continue;
      }
      assign(std::move(*fit), pooled);
    }
  }
  return out;
}

double sga_investment_component(const SgaObservation& obs, const SgaModelFit& fit) {
  return (obs.scaled_sga - fit.predict(obs)) * obs.avg_assets;
}

double compute_intan(double rd_expense, double sga_component, double avg_assets) {
  if (!(avg_assets > 0)) throw Error(ErrorCode::InvalidRecord, "average total assets must be positive");
  return (rd_expense + sga_component) / avg_assets;
}

std::optional<double> DerivedFirmYear::value(Variable v) const {
  switch (v) {
    case Variable::MTB: return mtb;
    case Variable::ROE: return roe;
    case Variable::RD: return rd_intensity;
    case Variable::SGA: return sga_intensity;
    case Variable::OP: return op;
    case Variable::INTAN: return intan;
    case Variable::LTG: return ltg;
  }
  return std::nullopt;
}

std::vector<const DerivedFirmYear*> DerivedSet::year(int fiscal_year) const {
  auto lo = std::lower_bound(records.begin(), records.end(), fiscal_year,
                             [](const DerivedFirmYear& r, int y) { return r.fiscal_year < y; });
  std::vector<const DerivedFirmYear*> out;
  for (auto it = lo; it != records.end() && it->fiscal_year == fiscal_year; ++it) out.push_back(&*it);
  return out;
}

namespace {

void winsorize(std::vector<DerivedFirmYear>& records, double pct) {
  using Field = std::optional<double> DerivedFirmYear::*;
  const Field fields[] = {&DerivedFirmYear::mtb, &DerivedFirmYear::roe, &DerivedFirmYear::op,
                          &DerivedFirmYear::rd_intensity, &DerivedFirmYear::sga_intensity};
  std::map<int, std::vector<DerivedFirmYear*>> by_year;
  for (auto& r : records) by_year[r.fiscal_year].push_back(&r);
  for (auto& [year, rows] : by_year) {
    for (auto field : fields) {
      std::vector<double> vals;
      for (auto* r : rows) {
        if ((r->*field)) vals.push_back(*(r->*field));
      }
      if (vals.empty()) continue;
      const double lo = percentile(vals, pct);
      const double hi = percentile(vals, 100.0 - pct);
      for (auto* r : rows) {
        if ((r->*field)) r->*field = std::clamp(*(r->*field), lo, hi);
      }
    }
    std::vector<double> vals;
    for (auto* r : rows) vals.push_back(r->intan);
    const double lo = percentile(vals, pct);
    const double hi = percentile(vals, 100.0 - pct);
    for (auto* r : rows) r->intan = std::clamp(r->intan, lo, hi);
  }
}

}  // namespace

DerivedSet derive_all(std::span<const FirmYearRecord> input, const DeriveOptions& options) {
  std::vector<const FirmYearRecord*> sorted;
  for (const auto& r : input) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return std::tie(a->fiscal_year, a->firm_id) < std::tie(b->fiscal_year, b->firm_id);
  });

  DerivedSet out;
  std::vector<FirmYearRecord> eligible;
  for (const auto* r : sorted) {
    if (!(r->total_assets > 0 && r->total_assets_prior > 0)) {
      out.diagnostics.push_back({r->firm_id, r->fiscal_year, "nonpositive total assets"});
    } else if (!std::isfinite(r->book_equity)) {
      out.diagnostics.push_back({r->firm_id, r->fiscal_year, "missing book equity"});
    } else {
      eligible.push_back(*r);
    }
  }
  // Revenue_Decrease needs the prior year's revenue even when that year itself is ineligible.
  std::map<std::pair<std::string, int>, double> prior_revenue;
  for (const auto& r : input) prior_revenue[{r.firm_id, r.fiscal_year}] = r.revenue;

  out.observations = make_sga_observations(eligible);
  for (auto& obs : out.observations) {
    auto prior = prior_revenue.find({obs.firm_id, obs.fiscal_year - 1});
    auto rev = prior_revenue.at({obs.firm_id, obs.fiscal_year});
    obs.revenue_decrease = prior != prior_revenue.end() && rev < prior->second;
  }

  SgaOptions sga = options.sga;
  sga.skip_unusable_years = true;
  out.sga_fits = fit_sga_model(out.observations, sga);

  for (std::size_t i = 0; i < eligible.size(); ++i) {
    const auto& rec = eligible[i];
    const auto& obs = out.observations[i];
    const auto fit_idx = out.sga_fits.fit_of[i];
    if (fit_idx == SgaFitSet::kUnassigned) {
      out.diagnostics.push_back({rec.firm_id, rec.fiscal_year, "no usable SG&A fit for fiscal year"});
      continue;
    }
    const auto& fit = out.sga_fits.fits[fit_idx];

    DerivedFirmYear d;
    d.firm_id = rec.firm_id;
    d.fiscal_year = rec.fiscal_year;
    d.sic = rec.sic;
    d.exchange = rec.exchange;
    d.is_tech = classify_tech(rec.sic);
    d.avg_assets = obs.avg_assets;
    d.sga_investment_component = sga_investment_component(obs, fit);
    d.intan = compute_intan(rec.rd_expense, d.sga_investment_component, d.avg_assets);
    d.sga_fit_level = fit.level;
    d.market_equity = rec.market_equity;
    d.market_equity_june = rec.market_equity_june;
    d.ltg = rec.ltg;
    if (rec.book_equity > 0) {
      d.mtb = rec.market_equity / rec.book_equity;
      d.roe = rec.net_income / rec.book_equity;
      d.op = (rec.revenue - rec.cogs - rec.sga_expense - rec.interest_expense) / rec.book_equity;
    } else {
      out.diagnostics.push_back({rec.firm_id, rec.fiscal_year, "nonpositive book equity: MTB, ROE, OP undefined"});
    }
    if (rec.revenue > 0) {
      d.rd_intensity = rec.rd_expense / rec.revenue;
      d.sga_intensity = rec.sga_expense / rec.revenue;
    }
    out.records.push_back(std::move(d));
  }
  if (options.winsor_pct > 0) winsorize(out.records, options.winsor_pct);
  return out;
}

DerivedSet derive_all(const Panel& panel, const DeriveOptions& options) {
  return derive_all(std::span<const FirmYearRecord>(panel.fundamentals()), options);
}

std::string write_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  std::ostringstream out;
  out << "firm_id,fiscal_year,exclusion_reason\n";
  for (const auto& d : diagnostics) out << d.firm_id << ',' << d.fiscal_year << ',' << d.reason << '\n';
  return out.str();
}

namespace {

SummaryStat summarize(const std::vector<double>& v) {
  SummaryStat s;
  s.n = v.size();
  s.mean = mean(v);
  s.median = median(v);
  return s;
}

bool in_group(const DerivedFirmYear& r, FirmGroup g) {
  return g == FirmGroup::All || (g == FirmGroup::Tech) == r.is_tech;
}

}  // namespace

DescriptiveTable descriptive_table(const DerivedSet& derived, const std::vector<MonthWindow>& periods) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  DescriptiveTable table;
  for (auto group : {FirmGroup::All, FirmGroup::Tech, FirmGroup::NonTech}) {
    for (auto var : {Variable::MTB, Variable::ROE, Variable::RD, Variable::SGA, Variable::INTAN}) {
      DescriptiveRow row;
      row.group = group;
      row.variable = var;
      std::vector<std::vector<double>> samples;
      for (const auto& w : periods) {
        std::vector<double> first, last, whole;
        for (const auto& r : derived.records) {
          if (r.fiscal_year < w.start.year || r.fiscal_year > w.end.year || !in_group(r, group)) continue;
          auto v = r.value(var);
          if (!v) continue;
          whole.push_back(*v);
          if (r.fiscal_year == w.start.year) first.push_back(*v);
          if (r.fiscal_year == w.end.year) last.push_back(*v);
        }
        row.periods.push_back({w, summarize(first), summarize(last), summarize(whole)});
        samples.push_back(std::move(whole));
      }
      row.t_value = row.t_p = row.z_value = row.z_p = kNaN;
      if (samples.size() >= 2) {
        const auto& earlier = samples[samples.size() - 2];
        const auto& later = samples.back();
        try {
          row.t_value = welch_t(later, earlier);
          row.t_p = student_t_p(row.t_value, welch_df(later, earlier));
        } catch (const Error&) {
        }
        try {
          row.z_value = ranksum_z(later, earlier);
          row.z_p = normal_p(row.z_value);
        } catch (const Error&) {
        }
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace intan
