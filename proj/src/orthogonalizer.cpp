#include "intan/orthogonalizer.hpp"

#include <algorithm>

#include "intan/error.hpp"

namespace intan {

const std::vector<std::string> kFactorNames = {"MKTRF", "SMB", "HML", "RMW", "CMA", "UMD", "RF"};

namespace {

double FactorObservation::*factor_member(std::string_view name) {
  if (name == "MKTRF") return &FactorObservation::mktrf;
  if (name == "SMB") return &FactorObservation::smb;
  if (name == "HML") return &FactorObservation::hml;
  if (name == "RMW") return &FactorObservation::rmw;
  if (name == "CMA") return &FactorObservation::cma;
  if (name == "UMD") return &FactorObservation::umd;
  if (name == "RF") return &FactorObservation::rf;
  throw Error(ErrorCode::MissingVariable, "unknown factor '" + std::string(name) + "'");
}

}  // namespace

FactorSeries factor_series(const Panel& panel, std::string_view name, const MonthWindow& window) {
  const auto member = factor_member(name);
  if (!panel.window().contains(window)) {
    throw Error(ErrorCode::WindowUncovered, window.str() + " outside panel window " + panel.window().str());
  }
  FactorSeries out;
  out.name = std::string(name);
  for (const auto& m : window.months()) {
    out.months.push_back(m);
    out.values.push_back(panel.factor(m).*member);
  }
  return out;
}

std::vector<double> align(const FactorSeries& series, const MonthWindow& window) {
  if (series.months.size() != series.values.size()) {
    throw Error(ErrorCode::LengthMismatch, series.name + ": months and values differ in length");
  }
  std::vector<double> out;
  out.reserve(window.size());
  auto it = std::lower_bound(series.months.begin(), series.months.end(), window.start);
  for (const auto& m : window.months()) {
    if (it == series.months.end() || *it != m) {
      throw Error(ErrorCode::WindowMismatch, series.name + " has no value for " + m.str());
    }
    out.push_back(series.values[it - series.months.begin()]);
    ++it;
  }
  return out;
}

SpanningFit orthogonalize(const FactorSeries& series, const std::vector<FactorSeries>& against,
                          const MonthWindow& window) {
  SpanningFit out;
  out.dependent = series.name;
  const auto y = align(series, window);
  std::vector<Column> cols;
  for (const auto& f : against) {
    out.regressors.push_back(f.name);
    cols.push_back(align(f, window));
  }
  out.fit = ols(y, cols, true, out.regressors);
  const auto months = window.months();
  const double a = out.fit.intercept();
  out.orthogonal_series.name = series.name + "_Org";
  out.orthogonal_series.months = months;
  out.projected_series.name = series.name + "_fitted";
  out.projected_series.months = months;
  for (std::size_t t = 0; t < y.size(); ++t) {
    out.orthogonal_series.values.push_back(a + out.fit.residuals[t]);
    out.projected_series.values.push_back(out.fit.fitted[t]);
  }
  return out;
}

RmwDecomposition decompose_rmw(const FactorSeries& rmw, const FactorSeries& intanft, const MonthWindow& window) {
  auto span = orthogonalize(rmw, {intanft}, window);
  RmwDecomposition out;
  out.rmw_org = std::move(span.orthogonal_series);
  out.rmw_org.name = "RMW_Org";
  out.rmw_intan = std::move(span.projected_series);
  out.rmw_intan.name = "RMW_INTAN";
  out.fit = std::move(span.fit);
  return out;
}

}  // namespace intan
