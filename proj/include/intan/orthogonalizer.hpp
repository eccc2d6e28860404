#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "intan/calendar.hpp"
#include "intan/econometrics.hpp"
#include "intan/factor_builder.hpp"
#include "intan/panel.hpp"

namespace intan {

/// Names accepted by factor_series: MKTRF, SMB, HML, RMW, CMA, UMD, RF.
extern const std::vector<std::string> kFactorNames;

/// One ingested factor column over `window`. Throws MissingVariable for an unknown name and
/// WindowUncovered when the panel does not cover the window.
FactorSeries factor_series(const Panel& panel, std::string_view name, const MonthWindow& window);

/// Values of `series` for every month of `window`, in order. Throws WindowMismatch naming the
/// first month the series lacks.
std::vector<double> align(const FactorSeries& series, const MonthWindow& window);

struct SpanningFit {
  std::string dependent;
  std::vector<std::string> regressors;
  RegressionResult fit;
  FactorSeries orthogonal_series;  // intercept + residual
  FactorSeries projected_series;   // fitted values
};

/// Regresses `series` on `against` over `window`. The orthogonal series is named
/// "<name>_Org".
SpanningFit orthogonalize(const FactorSeries& series, const std::vector<FactorSeries>& against,
                          const MonthWindow& window);

struct RmwDecomposition {
  FactorSeries rmw_org;    // a + e
  FactorSeries rmw_intan;  // a + b * INTANFT
  RegressionResult fit;
};

/// rmw_intan[t] + rmw_org[t] - a = rmw[t].
RmwDecomposition decompose_rmw(const FactorSeries& rmw, const FactorSeries& intanft, const MonthWindow& window);

}  // namespace intan
