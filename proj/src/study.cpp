#include "intan/study.hpp"

#include <algorithm>
#include <cmath>

namespace intan {

namespace {

const std::vector<std::string> kModelFactors = {"MKTRF", "SMB", "HML", "RMW", "CMA", "UMD"};

std::string years(const MonthWindow& w) {
  return std::to_string(w.start.year) + "-" + std::to_string(w.end.year);
}

double value_at(const FactorSeries& s, CalendarMonth m) {
  if (!s.months.empty()) {
    const long off = m.index() - s.months.front().index();
    if (off >= 0 && off < static_cast<long>(s.months.size()) && s.months[off] == m) return s.values[off];
  }
  throw Error(ErrorCode::WindowMismatch, s.name + " has no value for " + m.str());
}

TableCell coefficient_cell(const RegressionResult& fit, std::size_t i) {
  return {fit.coefficients[i], fit.t_stats[i], significance_stars(fit.p_values[i])};
}

std::string bin_label(std::string_view var, int i, int n) {
  if (i == 0) return "Low " + std::string(var);
  if (i == n - 1) return "High " + std::string(var);
  return std::to_string(i + 1);
}

std::string short_bin_label(int i, int n) {
  if (i == 0) return "Low";
  if (i == n - 1) return "High";
  return std::to_string(i + 1);
}

// Regresses the portfolio's excess returns on the given series over the months of
// `months` in which the portfolio has a return.
RegressionRecord regress(std::string panel, const PortfolioSeries& p, const std::vector<const FactorSeries*>& regs,
                         const std::vector<CalendarMonth>& months) {
  RegressionRecord rec;
  rec.panel = std::move(panel);
  rec.portfolio = p.label;
  for (std::size_t i = 0; i < p.months.size(); ++i) {
    if (std::binary_search(months.begin(), months.end(), p.months[i])) {
      rec.months.push_back(p.months[i]);
      rec.response.push_back(p.excess_returns[i]);
    }
  }
  std::vector<Column> cols;
  std::vector<std::string> names;
  for (const auto* s : regs) {
    Column col;
    col.reserve(rec.months.size());
    for (const auto& m : rec.months) col.push_back(value_at(*s, m));
    cols.push_back(std::move(col));
    names.push_back(s->name);
  }
  rec.fit = ols(rec.response, cols, true, names);
  return rec;
}

TableRow model_row(std::string label, const RegressionResult& fit) {
  TableRow row{std::move(label), {}};
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i) row.cells.push_back(coefficient_cell(fit, i));
  row.cells.push_back({fit.r_squared, std::nullopt, ""});
  return row;
}

std::vector<std::string> model_columns(const std::vector<const FactorSeries*>& regs) {
  std::vector<std::string> cols{"intercept"};
  for (const auto* s : regs) cols.push_back(s->name);
  cols.emplace_back("R^2");
  return cols;
}

}  // namespace

Study::Study(StudyConfig config, Panel panel) : config_(std::move(config)), panel_(std::move(panel)) {}

const DerivedSet& Study::derived() {
  if (!derived_) {
    DeriveOptions opts;
    opts.sga.min_group_size = config_.sga_threshold;
    opts.winsor_pct = config_.winsorize_pct;
    derived_ = std::make_unique<DerivedSet>(derive_all(panel_, opts));
  }
  return *derived_;
}

std::vector<RegressionRecord> Study::spanning_fits() const {
  std::vector<RegressionRecord> out;
  for (const auto& [key, fit] : intanft_org_) out.push_back({key, fit.dependent, fit.orthogonal_series.months, {}, fit.fit});
  if (rmw_) out.push_back({config_.late_window.str(), "RMW", rmw_->rmw_org.months, {}, rmw_->fit});
  return out;
}

std::vector<Study::Period> Study::periods() const {
  std::vector<Period> out;
  if (config_.early_window) out.push_back({years(*config_.early_window), *config_.early_window});
  out.push_back({years(config_.late_window), config_.late_window});
  return out;
}

const FactorSeries& Study::factor(const MonthWindow& window, std::string_view name) {
  const std::string key = std::string(name) + "[" + window.str() + "]";
  auto it = factor_cache_.find(key);
  if (it == factor_cache_.end()) it = factor_cache_.emplace(key, factor_series(panel_, name, window)).first;
  return it->second;
}

const IntanftResult& Study::intanft(const MonthWindow& window) {
  const std::string key = window.str();
  auto it = intanft_.find(key);
  if (it == intanft_.end()) {
    it = intanft_.emplace(key, build_intanft(panel_, derived(), window, config_.intanft)).first;
    memberships_[key + ":INTANFT"] = it->second.cells;
    series_["INTANFT[" + key + "]"] = it->second.series;
  }
  return it->second;
}

const SpanningFit& Study::intanft_org(const MonthWindow& window) {
  const std::string key = window.str();
  auto it = intanft_org_.find(key);
  if (it == intanft_org_.end()) {
    std::vector<FactorSeries> against;
    for (const auto& name : config_.spanning_factors) against.push_back(factor(window, name));
    it = intanft_org_.emplace(key, orthogonalize(intanft(window).series, against, window)).first;
    series_["INTANFT_Org[" + key + "]"] = it->second.orthogonal_series;
  }
  return it->second;
}

const RmwDecomposition& Study::rmw_decomposition() {
  if (!rmw_) {
    const auto& w = config_.late_window;
    rmw_ = std::make_unique<RmwDecomposition>(decompose_rmw(factor(w, "RMW"), intanft(w).series, w));
    series_["RMW_Org[" + w.str() + "]"] = rmw_->rmw_org;
    series_["RMW_INTAN[" + w.str() + "]"] = rmw_->rmw_intan;
  }
  return *rmw_;
}

const std::vector<Portfolio>& Study::sort(const MonthWindow& window, Variable v, int n_bins) {
  const std::string key = window.str() + ":" + std::string(to_string(v));
  auto it = memberships_.find(key);
  if (it == memberships_.end()) {
    it = memberships_.emplace(key, quantile_sort(derived(), v, n_bins, window.start.year, window.end.year)).first;
  }
  return it->second;
}

const DoubleSort& Study::double_sort(const MonthWindow& window, Variable a, Variable b) {
  const std::string key = window.str() + ":" + std::string(to_string(a)) + "x" + std::string(to_string(b));
  auto it = double_sorts_.find(key);
  if (it == double_sorts_.end()) {
    it = double_sorts_
             .emplace(key, independent_double_sort(derived(), a, 5, b, 4, window.start.year, window.end.year))
             .first;
    memberships_[key] = it->second.cells;
  }
  return it->second;
}

TableOutput Study::run_table(std::string_view id) {
  if (id == "T1") return table1();
  if (id == "T2") return table2();
  if (id == "T3") return table3();
  if (id == "T4") {
    return factor_model_table("T4", "Regressions of MTB quintile excess returns on the factors and INTANFT", false,
                              {{"MTB", Variable::MTB}});
  }
  if (id == "T5") {
    return factor_model_table("T5", "Regressions of MTB quintile excess returns on the factors and INTANFT_Org",
                              true, {{"MTB", Variable::MTB}});
  }
  if (id == "T6") {
    return factor_model_table("T6", "Regressions of INTAN and OP quintile excess returns on the factors and INTANFT_Org",
                              true, {{"Panel A: INTAN", Variable::INTAN}, {"Panel B: OP", Variable::OP}});
  }
  if (id == "T7") return table7();
  if (id == "T8") return table8();
  if (id == "T9") return table9();
  throw Error(ErrorCode::InvalidConfig, "unknown table '" + std::string(id) + "'");
}

TableOutput Study::table1() {
  TableOutput out;
  out.artifact = {"T1", "Descriptive statistics: mean (median) and later-versus-earlier tests", {}};
  std::vector<MonthWindow> windows;
  for (const auto& p : periods()) windows.push_back(p.window);
  const auto table = descriptive_table(derived(), windows);
  for (auto group : {FirmGroup::All, FirmGroup::Tech, FirmGroup::NonTech}) {
    TablePanel panel;
    panel.name = std::string(to_string(group));
    panel.stat_label = "median; p for tests";
    panel.stat_precision = 3;
    for (const auto& w : windows) {
      panel.columns.push_back(std::to_string(w.start.year));
      panel.columns.push_back(std::to_string(w.end.year));
      panel.columns.push_back(years(w));
    }
    panel.columns.emplace_back("t-value");
    panel.columns.emplace_back("z-value");
    for (const auto& row : table.rows) {
      if (row.group != group) continue;
      TableRow r{std::string(to_string(row.variable)), {}};
      for (const auto& p : row.periods) {
        for (const auto* s : {&p.first_year, &p.last_year, &p.whole}) {
          if (s->n == 0) {
            r.cells.push_back({});
          } else {
            r.cells.push_back({s->mean, s->median, ""});
          }
        }
      }
      auto test_cell = [](double v, double p) {
        if (std::isnan(v)) return TableCell{};
        return TableCell{v, p, significance_stars(p)};
      };
      r.cells.push_back(test_cell(row.t_value, row.t_p));
      r.cells.push_back(test_cell(row.z_value, row.z_p));
      panel.rows.push_back(std::move(r));
    }
    out.artifact.panels.push_back(std::move(panel));
  }
  return out;
}

TableOutput Study::table2() {
  TableOutput out;
  out.artifact = {"T2", "Pearson correlations among factors", {}};
  char letter = 'A';
  for (const auto& period : periods()) {
    std::vector<const FactorSeries*> series;
    for (const auto& name : kModelFactors) series.push_back(&factor(period.window, name));
    series.push_back(&intanft(period.window).series);
    TablePanel panel;
    panel.name = std::string("Panel ") + letter++ + ": " + period.name;
    panel.stat_label = "p";
    panel.stat_precision = 3;
    for (const auto* s : series) panel.columns.push_back(s->name);
    for (std::size_t i = 0; i < series.size(); ++i) {
      TableRow row{series[i]->name, {}};
      for (std::size_t j = 0; j < series.size(); ++j) {
        if (j < i) {
          const auto c = pearson(series[i]->values, series[j]->values);
          row.cells.push_back({c.r, c.p, significance_stars(c.p)});
        } else if (j == i) {
          row.cells.push_back({1.0, std::nullopt, ""});
        } else {
          row.cells.push_back({});
        }
      }
      panel.rows.push_back(std::move(row));
    }
    out.artifact.panels.push_back(std::move(panel));
  }
  return out;
}

TableOutput Study::table3() {
  TableOutput out;
  out.artifact = {"T3", "Monthly excess returns of MTB and INTAN quintiles", {}};
  const std::pair<std::string, Variable> sorts[] = {{"MTB", Variable::MTB}, {"INTAN", Variable::INTAN}};
  char letter = 'A';
  for (const auto& [var_name, var] : sorts) {
    TablePanel panel;
    panel.name = std::string("Panel ") + letter++ + ": " + var_name + " quintiles";
    panel.precision = 4;
    std::vector<TableRow> rows(6);
    for (int q = 0; q < 5; ++q) rows[q].label = bin_label(var_name, q, 5);
    rows[5].label = "Low vs High (t-value/z-value)";
    for (const auto& period : periods()) {
      panel.columns.push_back(period.name + " Average");
      panel.columns.push_back(period.name + " Median");
      const auto& ports = sort(period.window, var, 5);
      std::vector<std::vector<double>> excess;
      for (int q = 0; q < 5; ++q) {
        auto series = portfolio_returns(ports[q], panel_, period.window, config_.weighting);
        const auto t = one_sample_t(series.excess_returns);
        rows[q].cells.push_back({t.mean, t.t_value, significance_stars(t.p)});
        rows[q].cells.push_back({median(series.excess_returns), std::nullopt, ""});
        excess.push_back(series.excess_returns);
        out.portfolios.push_back({panel.name + " " + period.name, std::move(series)});
      }
      const auto test = two_sample_test(excess.front(), excess.back());
      rows[5].cells.push_back({test.t_value, std::nullopt, significance_stars(test.t_p)});
      rows[5].cells.push_back({test.z_value, std::nullopt, significance_stars(test.z_p)});
    }
    panel.rows = std::move(rows);
    out.artifact.panels.push_back(std::move(panel));
  }
  return out;
}

TableOutput Study::factor_model_table(std::string id, std::string title, bool orthogonal,
                                      const std::vector<std::pair<std::string, Variable>>& sorts) {
  TableOutput out;
  out.artifact = {std::move(id), std::move(title), {}};
  for (const auto& [sort_name, var] : sorts) {
    for (const auto& period : periods()) {
      std::vector<const FactorSeries*> regs;
      for (const auto& name : kModelFactors) regs.push_back(&factor(period.window, name));
      regs.push_back(orthogonal ? &intanft_org(period.window).orthogonal_series : &intanft(period.window).series);
      TablePanel panel;
      panel.name = sort_name + ": " + period.name;
      panel.columns = model_columns(regs);
      const auto& ports = sort(period.window, var, 5);
      const auto months = period.window.months();
      for (int q = 0; q < 5; ++q) {
        auto series = portfolio_returns(ports[q], panel_, period.window, config_.weighting);
        auto rec = regress(panel.name, series, regs, months);
        panel.rows.push_back(model_row(bin_label(to_string(var), q, 5), rec.fit));
        out.regressions.push_back(std::move(rec));
        out.portfolios.push_back({panel.name, std::move(series)});
      }
      out.artifact.panels.push_back(std::move(panel));
    }
  }
  return out;
}

TableOutput Study::table7() {
  TableOutput out;
  out.artifact = {"T7", "Regressions of 5x4 independent double-sort portfolios on the factors and INTANFT_Org", {}};
  const auto& w = config_.late_window;
  std::vector<const FactorSeries*> regs;
  for (const auto& name : kModelFactors) regs.push_back(&factor(w, name));
  regs.push_back(&intanft_org(w).orthogonal_series);
  const auto months = w.months();
  const std::pair<std::string, std::string> coefs[] = {
      {"intercept", "alpha"}, {"HML", "b3"}, {"RMW", "b4"}, {"INTANFT_Org", "b7"}};
  const std::pair<char, Variable> sorts[] = {{'A', Variable::MTB}, {'B', Variable::OP}};
  for (const auto& [letter, var] : sorts) {
    const std::string sort_name = std::string(to_string(var)) + "-INTAN";
    const std::string prefix = std::string("Panel ") + letter + ": " + sort_name;
    const auto& ds = double_sort(w, var, Variable::INTAN);
    std::vector<std::optional<RegressionResult>> fits(ds.cells.size());
    for (std::size_t c = 0; c < ds.cells.size(); ++c) {
      auto series = portfolio_returns(ds.cells[c], panel_, w, config_.weighting);
      if (series.months.size() >= regs.size() + 2) {
        auto rec = regress(prefix, series, regs, months);
        fits[c] = rec.fit;
        out.regressions.push_back(std::move(rec));
      }
      out.portfolios.push_back({prefix, std::move(series)});
    }
    for (const auto& [term, symbol] : coefs) {
      TablePanel panel;
      panel.name = prefix + " " + symbol;
      for (int j = 0; j < 4; ++j) panel.columns.push_back("INTAN " + short_bin_label(j, 4));
      for (int i = 0; i < 5; ++i) {
        TableRow row{std::string(to_string(var)) + " " + short_bin_label(i, 5), {}};
        for (int j = 0; j < 4; ++j) {
          const auto& fit = fits[i * 4 + j];
          row.cells.push_back(fit ? coefficient_cell(*fit, fit->index_of(term)) : TableCell{});
        }
        panel.rows.push_back(std::move(row));
      }
      out.artifact.panels.push_back(std::move(panel));
    }
  }
  return out;
}

TableOutput Study::table8() {
  TableOutput out;
  out.artifact = {"T8", "Regressions of OP quintile excess returns on the components of RMW", {}};
  const auto& w = config_.late_window;
  const auto& rmw = rmw_decomposition();
  const std::vector<const FactorSeries*> regs = {&factor(w, "MKTRF"), &factor(w, "SMB"), &factor(w, "HML"),
                                                 &rmw.rmw_org,        &rmw.rmw_intan,    &factor(w, "CMA"),
                                                 &factor(w, "UMD")};
  TablePanel panel;
  panel.name = "OP quintiles: " + years(w);
  panel.columns = model_columns(regs);
  const auto& ports = sort(w, Variable::OP, 5);
  const auto months = w.months();
  for (int q = 0; q < 5; ++q) {
    auto series = portfolio_returns(ports[q], panel_, w, config_.weighting);
    auto rec = regress(panel.name, series, regs, months);
    panel.rows.push_back(model_row(bin_label("OP", q, 5), rec.fit));
    out.regressions.push_back(std::move(rec));
    out.portfolios.push_back({panel.name, std::move(series)});
  }
  out.artifact.panels.push_back(std::move(panel));
  return out;
}

TableOutput Study::table9() {
  TableOutput out;
  out.artifact = {"T9", "Regressions of LTG quintile excess returns on the factors and INTANFT_Org", {}};
  const auto& w = config_.late_window;
  const auto& d = derived();
  const bool has_ltg = std::any_of(d.records.begin(), d.records.end(), [&](const DerivedFirmYear& r) {
    return r.ltg && r.fiscal_year >= w.start.year - 1 && r.fiscal_year < w.end.year;
  });
  if (!has_ltg) throw Error(ErrorCode::MissingVariable, "no LTG values for the " + years(w) + " sorts");

  std::vector<const FactorSeries*> regs;
  for (const auto& name : kModelFactors) regs.push_back(&factor(w, name));
  regs.push_back(&intanft_org(w).orthogonal_series);
  const auto& ports = sort(w, Variable::LTG, 5);
  std::vector<PortfolioSeries> series;
  for (int q = 0; q < 5; ++q) series.push_back(portfolio_returns(ports[q], panel_, w, config_.weighting));

  const auto& b = config_.bubble_window;
  const std::pair<std::string, std::vector<CalendarMonth>> samples[] = {
      {"Panel A: " + years(w), w.months()},
      {"Panel B: bubble " + years(b), b.months()},
      {"Panel C: excluding " + years(b), months_excluding(w, b)},
  };
  for (const auto& [name, months] : samples) {
    TablePanel panel;
    panel.name = name;
    panel.columns = model_columns(regs);
    for (int q = 0; q < 5; ++q) {
      auto rec = regress(name, series[q], regs, months);
      panel.rows.push_back(model_row(bin_label("LTG", q, 5), rec.fit));
      out.regressions.push_back(std::move(rec));
    }
    out.artifact.panels.push_back(std::move(panel));
  }
  for (auto& s : series) out.portfolios.push_back({"LTG quintiles: " + years(w), std::move(s)});
  return out;
}

}  // namespace intan
