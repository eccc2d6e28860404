#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace intan {

/// Result of one ordinary-least-squares fit. Coefficient-indexed vectors put the
/// intercept first when the fit has one.
struct RegressionResult {
  std::vector<std::string> names;  // "intercept" then regressor names
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  double r_squared = 0.0;
  double sigma = 0.0;  // residual standard error
  std::vector<double> residuals;
  std::vector<double> fitted;
  std::size_t n_obs = 0;
  std::size_t k_regressors = 0;
  bool has_intercept = true;

  /// Index of a named coefficient; throws MissingVariable.
  std::size_t index_of(const std::string& name) const;
  double coefficient(const std::string& name) const { return coefficients[index_of(name)]; }
  double t_stat(const std::string& name) const { return t_stats[index_of(name)]; }
  double intercept() const { return has_intercept ? coefficients.front() : 0.0; }
  std::size_t degrees_of_freedom() const { return n_obs - coefficients.size(); }
};

using Column = std::vector<double>;

/// Least squares of y on the given regressor columns via column-pivoted Householder QR.
/// Standard errors are homoskedastic with n - k - 1 degrees of freedom (n - k without
/// intercept); p-values are two-sided Student-t.
/// Throws LengthMismatch, TooFewObservations (n < k + 2), RankDeficient (names the
/// columns that are linear combinations of the others).
RegressionResult ols(std::span<const double> y, const std::vector<Column>& regressors, bool intercept = true,
                     const std::vector<std::string>& names = {});

struct Correlation {
  double r = 0.0;
  double p = 1.0;  // two-sided, t = r sqrt((n-2)/(1-r^2)) with n-2 df
};

/// Pearson correlation. Throws LengthMismatch, TooFewObservations (n < 3), ZeroVariance.
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Welch unequal-variance t statistic for mean(a) - mean(b). Throws TooFewObservations
/// (either n < 2) and ZeroVariance (both samples constant).
double welch_t(std::span<const double> a, std::span<const double> b);
/// Welch-Satterthwaite degrees of freedom.
double welch_df(std::span<const double> a, std::span<const double> b);

/// Mann-Whitney rank-sum z statistic for a relative to b: normal approximation with
/// average ranks for ties, tie-corrected variance and a 0.5 continuity correction toward
/// zero. Negative when a tends to be smaller. Throws TooFewObservations (either n < 8)
/// and ZeroVariance (all values tied).
double ranksum_z(std::span<const double> a, std::span<const double> b);

/// Mann-Whitney U of sample a (number of pairs a_i > b_j, ties counted 1/2).
double mann_whitney_u(std::span<const double> a, std::span<const double> b);

struct TwoSampleTest {
  double t_value = 0.0;
  double t_p = 1.0;
  double z_value = 0.0;
  double z_p = 1.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double median_a = 0.0;
  double median_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Mean (Welch) and median (rank-sum) comparison of a versus b.
TwoSampleTest two_sample_test(std::span<const double> a, std::span<const double> b);

struct OneSampleT {
  double mean = 0.0;
  double t_value = 0.0;
  double p = 1.0;
};

/// t = mean / (sd / sqrt(n)) with n - 1 degrees of freedom.
OneSampleT one_sample_t(std::span<const double> x);

double mean(std::span<const double> x);
double median(std::span<const double> x);
double sample_variance(std::span<const double> x);

/// Percentile (0-100) by linear interpolation between closest ranks: position
/// (n - 1) * pct / 100 in the sorted sample. Throws TooFewObservations on empty input.
double percentile(std::span<const double> values, double pct);

/// Two-sided p-value of a Student-t statistic.
double student_t_p(double t, double df);
/// Two-sided p-value of a standard-normal statistic.
double normal_p(double z);

/// "***", "**", "*" or "" for two-sided p at the 1%, 5% and 10% levels.
const char* significance_stars(double p);

}  // namespace intan
