#pragma once

// Reference implementations used only by tests. Each one computes its result along a
// different route from the library code it checks.

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "intan/calendar.hpp"
#include "intan/factor_builder.hpp"
#include "intan/panel.hpp"

namespace oracle {

struct OlsResult {
  std::vector<double> coefficients;  // intercept first
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  double r_squared = 0.0;
};

/// Normal equations X'X b = X'y solved in long double by Gauss-Jordan with partial pivoting.
OlsResult ols_long_double(const std::vector<double>& y, const std::vector<std::vector<double>>& columns);

/// U statistic by counting every pair.
double mann_whitney_u_pairs(const std::vector<double>& a, const std::vector<double>& b);

/// Percentile by sorting and interpolating between the bracketing order statistics.
double percentile_sorted(std::vector<double> values, double pct);

/// Portfolio return per month by looping over every firm of the panel and checking membership.
std::map<intan::CalendarMonth, double> portfolio_loop(const intan::Portfolio& portfolio, const intan::Panel& panel,
                                                      const intan::MonthWindow& window, bool value_weighted);

/// Signed INTANFT weight of every firm in month m: +0.5 times its value weight within S/H or
/// B/H, -0.5 times its value weight within S/L or B/L, 0 otherwise. Value weights use `caps`
/// (June caps keyed by firm) over the members with a return in m.
std::map<std::string, double> intanft_weights(const std::vector<intan::Portfolio>& cells, const intan::Panel& panel,
                                              const std::map<std::pair<std::string, int>, double>& june_caps,
                                              intan::CalendarMonth m);

double relative_error(const std::vector<double>& got, const std::vector<double>& want);

}  // namespace oracle
