#include "intan/econometrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "intan/error.hpp"

namespace intan {

namespace {

constexpr double kRankThreshold = 1e-10;

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidRecord, std::string("non-finite value in ") + what);
  }
}

}  // namespace

std::size_t RegressionResult::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorCode::MissingVariable, "no coefficient named '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

RegressionResult ols(std::span<const double> y, const std::vector<Column>& regressors, bool intercept,
                     const std::vector<std::string>& names) {
  const std::size_t n = y.size();
  const std::size_t k = regressors.size();
  if (!names.empty() && names.size() != k) {
    throw Error(ErrorCode::LengthMismatch, "regressor names do not match regressor count");
  }
  for (const auto& col : regressors) {
    if (col.size() != n) {
      throw Error(ErrorCode::LengthMismatch,
                  "regressor length " + std::to_string(col.size()) + " vs response length " + std::to_string(n));
    }
  }
  if (n < k + 2) {
    throw Error(ErrorCode::TooFewObservations,
                std::to_string(n) + " observations for " + std::to_string(k) + " regressors");
  }
  require_finite(y, "response");
  for (const auto& col : regressors) require_finite(col, "regressor");

  RegressionResult res;
  res.has_intercept = intercept;
  res.n_obs = n;
  res.k_regressors = k;
  if (intercept) res.names.emplace_back("intercept");
  for (std::size_t j = 0; j < k; ++j) res.names.push_back(names.empty() ? "x" + std::to_string(j + 1) : names[j]);

  const auto p = static_cast<Eigen::Index>(k + (intercept ? 1 : 0));
  const auto rows = static_cast<Eigen::Index>(n);

  // Columns are normalized to unit length so the rank test is scale-free.
  Eigen::MatrixXd x(rows, p);
  Eigen::VectorXd scale(p);
  Eigen::Index c = 0;
  if (intercept) x.col(c++).setOnes();
  for (const auto& col : regressors) x.col(c++) = Eigen::Map<const Eigen::VectorXd>(col.data(), rows);
  for (Eigen::Index j = 0; j < p; ++j) {
    double norm = x.col(j).norm();
    if (norm == 0.0) throw Error(ErrorCode::RankDeficient, "column '" + res.names[j] + "' is identically zero");
    scale(j) = 1.0 / norm;
    x.col(j) *= scale(j);
  }
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), rows);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < p) {
    std::string dependent;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < p; ++i) {
      if (!dependent.empty()) dependent += ", ";
      dependent += res.names[static_cast<std::size_t>(perm(i))];
    }
    throw Error(ErrorCode::RankDeficient, "linearly dependent column(s): " + dependent);
  }

  Eigen::VectorXd beta_scaled = qr.solve(yv);
  Eigen::VectorXd fitted = x * beta_scaled;
  Eigen::VectorXd resid = yv - fitted;
  Eigen::VectorXd beta = beta_scaled.cwiseProduct(scale);

  // (X'X)^-1 of the scaled design from R: P R^-1 R^-T P'.
  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::VectorXd diag_perm = (r_inv * r_inv.transpose()).diagonal();
  Eigen::VectorXd xtx_inv_diag(p);
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index i = 0; i < p; ++i) xtx_inv_diag(perm(i)) = diag_perm(i);

  const double ssr = resid.squaredNorm();
  const double dof = static_cast<double>(n) - static_cast<double>(p);
  const double s2 = ssr / dof;
  res.sigma = std::sqrt(s2);

  double sst = 0.0;
  if (intercept) {
    const double ybar = yv.mean();
    sst = (yv.array() - ybar).square().sum();
  } else {
    sst = yv.squaredNorm();
  }
  if (sst == 0.0) {
    res.r_squared = 1.0;
  } else {
    res.r_squared = 1.0 - ssr / sst;
    if (intercept) res.r_squared = std::clamp(res.r_squared, 0.0, 1.0);
  }

  for (Eigen::Index j = 0; j < p; ++j) {
    const double b = beta(j);
    const double se = std::sqrt(s2 * xtx_inv_diag(j)) * scale(j);
    double t = 0.0;
    if (se > 0.0) {
      t = b / se;
    } else if (b != 0.0) {
      t = std::copysign(std::numeric_limits<double>::infinity(), b);
    }
    res.coefficients.push_back(b);
    res.std_errors.push_back(se);
    res.t_stats.push_back(t);
    res.p_values.push_back(student_t_p(t, dof));
  }
  res.fitted.assign(fitted.data(), fitted.data() + rows);
  res.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.residuals[i] = y[i] - res.fitted[i];
  return res;
}

double mean(std::span<const double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double median(std::span<const double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v(x.begin(), x.end());
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double percentile(std::span<const double> values, double pct) {
  if (values.empty()) throw Error(ErrorCode::TooFewObservations, "percentile of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = (static_cast<double>(v.size()) - 1.0) * std::clamp(pct, 0.0, 100.0) / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

double student_t_p(double t, double df) {
  if (std::isnan(t) || !(df > 0)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double normal_p(double z) {
  if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

const char* significance_stars(double p) {
  if (std::isnan(p)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "pearson: unequal lengths");
  const std::size_t n = x.size();
  if (n < 3) throw Error(ErrorCode::TooFewObservations, "pearson needs at least 3 observations");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ZeroVariance, "pearson: constant series");
  Correlation c;
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n) - 2.0;
  if (std::fabs(c.r) == 1.0) {
    c.p = 0.0;
  } else {
    c.p = student_t_p(c.r * std::sqrt(df / (1.0 - c.r * c.r)), df);
  }
  return c;
}

namespace {

void require_two_each(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::TooFewObservations, "welch test needs n >= 2 per sample");
}

}  // namespace

double welch_t(std::span<const double> a, std::span<const double> b) {
  require_two_each(a, b);
  const double se2 = sample_variance(a) / static_cast<double>(a.size()) +
                     sample_variance(b) / static_cast<double>(b.size());
  if (!(se2 > 0.0)) throw Error(ErrorCode::ZeroVariance, "welch test: both samples are constant");
  return (mean(a) - mean(b)) / std::sqrt(se2);
}

double welch_df(std::span<const double> a, std::span<const double> b) {
  require_two_each(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double qa = sample_variance(a) / na;
  const double qb = sample_variance(b) / nb;
  if (!(qa + qb > 0.0)) throw Error(ErrorCode::ZeroVariance, "welch test: both samples are constant");
  return (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
}

namespace {

struct RankSums {
  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum over tie groups of t^3 - t
};

RankSums rank_sums(std::span<const double> a, std::span<const double> b) {
  std::vector<std::pair<double, bool>> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.emplace_back(v, true);
  for (double v : b) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

  RankSums out;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1].first == pooled[i].first) ++j;
    const double ties = static_cast<double>(j - i + 1);
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t q = i; q <= j; ++q) {
      if (pooled[q].second) out.rank_sum_a += avg_rank;
    }
    out.tie_term += ties * ties * ties - ties;
    i = j + 1;
  }
  return out;
}

}  // namespace

double mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  const double na = static_cast<double>(a.size());
  return rank_sums(a, b).rank_sum_a - na * (na + 1.0) / 2.0;
}

double ranksum_z(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 8 || b.size() < 8) {
    throw Error(ErrorCode::TooFewObservations, "rank-sum normal approximation needs n >= 8 per sample");
  }
  for (auto s : {a, b}) require_finite(s, "rank-sum sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double total = na + nb;
  const auto sums = rank_sums(a, b);
  const double u = sums.rank_sum_a - na * (na + 1.0) / 2.0;
  const double mu = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((total + 1.0) - sums.tie_term / (total * (total - 1.0)));
  if (!(var > 0.0)) throw Error(ErrorCode::ZeroVariance, "rank-sum test: all values tied");
  const double d = u - mu;
  const double corrected = std::max(std::fabs(d) - 0.5, 0.0);
  return std::copysign(corrected, d) / std::sqrt(var);
}

TwoSampleTest two_sample_test(std::span<const double> a, std::span<const double> b) {
  TwoSampleTest out;
  out.n_a = a.size();
  out.n_b = b.size();
  out.mean_a = mean(a);
  out.mean_b = mean(b);
  out.median_a = median(a);
  out.median_b = median(b);
  out.t_value = welch_t(a, b);
  out.t_p = student_t_p(out.t_value, welch_df(a, b));
  out.z_value = ranksum_z(a, b);
  out.z_p = normal_p(out.z_value);
  return out;
}

OneSampleT one_sample_t(std::span<const double> x) {
  if (x.size() < 2) throw Error(ErrorCode::TooFewObservations, "one-sample t needs n >= 2");
  OneSampleT out;
  out.mean = mean(x);
  const double var = sample_variance(x);
  if (!(var > 0.0)) throw Error(ErrorCode::ZeroVariance, "one-sample t: constant sample");
  out.t_value = out.mean / std::sqrt(var / static_cast<double>(x.size()));
  out.p = student_t_p(out.t_value, static_cast<double>(x.size()) - 1.0);
  return out;
}

}  // namespace intan
