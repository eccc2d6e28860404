#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "intan/econometrics.hpp"
#include "intan/error.hpp"
#include "oracles.hpp"

using namespace intan;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an intan::Error");
  return ErrorCode::InvalidSpec;
}

std::vector<double> draws(std::mt19937_64& gen, std::size_t n, double mu = 0.0, double sd = 1.0) {
  std::normal_distribution<double> d(mu, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

}  // namespace

TEST_CASE("ols agrees with long-double normal equations") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 60 + 17 * rep;
    const std::size_t k = 1 + rep % 7;
    std::vector<Column> x;
    for (std::size_t j = 0; j < k; ++j) x.push_back(draws(gen, n, 0.01 * j, 0.03 + 0.01 * j));
    auto y = draws(gen, n, 0.0, 0.02);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) y[i] += (0.5 - 0.2 * j) * x[j][i];
    }
    const auto got = ols(y, x);
    const auto want = oracle::ols_long_double(y, x);
    CHECK(oracle::relative_error(got.coefficients, want.coefficients) < 1e-9);
    CHECK(oracle::relative_error(got.t_stats, want.t_stats) < 1e-9);
    CHECK_THAT(got.r_squared, WithinRel(want.r_squared, 1e-9));
    CHECK(got.degrees_of_freedom() == n - k - 1);
    double resid_sum = std::accumulate(got.residuals.begin(), got.residuals.end(), 0.0);
    CHECK(std::abs(resid_sum) < 1e-12);
  }
}

TEST_CASE("ols recovers exact coefficients without noise") {
  std::vector<double> x1{1, 2, 3, 4, 5, 6}, x2{0, 1, 0, 1, 0, 2};
  std::vector<double> y(6);
  for (std::size_t i = 0; i < 6; ++i) y[i] = 0.5 + 2.0 * x1[i] - 1.0 * x2[i];
  const auto r = ols(y, {x1, x2}, true, {"a", "b"});
  CHECK_THAT(r.intercept(), WithinAbs(0.5, 1e-12));
  CHECK_THAT(r.coefficient("a"), WithinAbs(2.0, 1e-12));
  CHECK_THAT(r.coefficient("b"), WithinAbs(-1.0, 1e-12));
  CHECK_THAT(r.r_squared, WithinAbs(1.0, 1e-12));
  CHECK(code_of([&] { r.index_of("zzz"); }) == ErrorCode::MissingVariable);
}

TEST_CASE("ols errors") {
  std::vector<double> y{1, 2, 3, 4, 5};
  std::vector<double> x{1, 3, 2, 5, 4};
  CHECK(code_of([&] { ols(y, {x, x}); }) == ErrorCode::RankDeficient);
  CHECK(code_of([&] { ols(y, {std::vector<double>{1, 2}}); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] { ols(std::vector<double>{1, 2, 3}, {{1, 2, 4}, {3, 1, 2}}); }) == ErrorCode::TooFewObservations);
}

TEST_CASE("pearson correlation and p-value") {
  std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 5, 4, 5};
  const auto c = pearson(x, y);
  // r = 6 / sqrt(10 * 6)
  CHECK_THAT(c.r, WithinRel(6.0 / std::sqrt(60.0), 1e-12));
  const double t = c.r * std::sqrt(3.0 / (1 - c.r * c.r));
  CHECK_THAT(c.p, WithinRel(student_t_p(t, 3), 1e-12));
  CHECK(code_of([] { pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }) == ErrorCode::ZeroVariance);
  CHECK(code_of([] { pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}); }) == ErrorCode::TooFewObservations);
}

TEST_CASE("welch t and degrees of freedom") {
  std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8, 10};
  const double va = 5.0 / 3.0, vb = 10.0;
  const double se2 = va / 4 + vb / 5;
  CHECK_THAT(welch_t(a, b), WithinRel(-3.5 / std::sqrt(se2), 1e-12));
  const double df = se2 * se2 / ((va / 4) * (va / 4) / 3 + (vb / 5) * (vb / 5) / 4);
  CHECK_THAT(welch_df(a, b), WithinRel(df, 1e-12));
  CHECK(code_of([] { welch_t(std::vector<double>{1}, std::vector<double>{1, 2}); }) == ErrorCode::TooFewObservations);
  CHECK(code_of([] { welch_t(std::vector<double>{1, 1}, std::vector<double>{2, 2}); }) == ErrorCode::ZeroVariance);
}

TEST_CASE("mann-whitney U matches pair counting") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 10; ++rep) {
    auto a = draws(gen, 20 + rep);
    auto b = draws(gen, 15 + 2 * rep, 0.3);
    for (auto& v : a) v = std::round(v * 4) / 4;  // force ties
    for (auto& v : b) v = std::round(v * 4) / 4;
    CHECK(mann_whitney_u(a, b) == oracle::mann_whitney_u_pairs(a, b));
  }
}

TEST_CASE("rank-sum z on separated samples") {
  std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8}, b{9, 10, 11, 12, 13, 14, 15, 16};
  const double sd = std::sqrt(8.0 * 8.0 * 17.0 / 12.0);
  CHECK_THAT(ranksum_z(a, b), WithinRel(-31.5 / sd, 1e-12));
  CHECK_THAT(ranksum_z(b, a), WithinRel(31.5 / sd, 1e-12));
  CHECK(code_of([] { ranksum_z(std::vector<double>{1, 2}, std::vector<double>{3, 4, 5, 6, 7, 8, 9, 10}); }) ==
        ErrorCode::TooFewObservations);
}

TEST_CASE("percentile matches the sorted-interpolation oracle") {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 10; ++rep) {
    const auto v = draws(gen, 5 + 13 * rep);
    for (double pct : {0.0, 30.0, 50.0, 70.0, 99.0, 100.0}) {
      CHECK(percentile(v, pct) == oracle::percentile_sorted(v, pct));
    }
  }
  std::vector<double> ten{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  CHECK_THAT(percentile(ten, 30), WithinAbs(3.7, 1e-12));
  CHECK_THAT(percentile(ten, 70), WithinAbs(7.3, 1e-12));
  CHECK(median(std::vector<double>{3, 1, 2, 10}) == 2.5);
  CHECK(code_of([] { percentile(std::vector<double>{}, 50); }) == ErrorCode::TooFewObservations);
}

TEST_CASE("one-sample t") {
  std::vector<double> x{0.01, 0.03, -0.01, 0.02, 0.05};
  const auto r = one_sample_t(x);
  const double m = 0.02;
  const double sd = std::sqrt(sample_variance(x));
  CHECK_THAT(r.mean, WithinAbs(m, 1e-15));
  CHECK_THAT(r.t_value, WithinRel(m / (sd / std::sqrt(5.0)), 1e-12));
}

TEST_CASE("p-values and stars") {
  CHECK_THAT(normal_p(1.959963984540054), WithinAbs(0.05, 1e-12));
  CHECK_THAT(student_t_p(2.228138851986274, 10), WithinAbs(0.05, 1e-10));
  CHECK(std::string(significance_stars(0.005)) == "***");
  CHECK(std::string(significance_stars(0.03)) == "**");
  CHECK(std::string(significance_stars(0.07)) == "*");
  CHECK(std::string(significance_stars(0.2)).empty());
}
