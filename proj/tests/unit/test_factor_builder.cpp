#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "intan/csv.hpp"
#include "intan/error.hpp"
#include "intan/factor_builder.hpp"
#include "oracles.hpp"

using namespace intan;
using Catch::Matchers::WithinAbs;

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

std::vector<FirmYearRecord> fundamentals_for(const std::vector<std::string>& ids, int first_fy, int last_fy) {
  std::vector<FirmYearRecord> out;
  for (const auto& id : ids) {
    for (int fy = first_fy; fy <= last_fy; ++fy) out.push_back(fixture::firm_year(id, fy));
  }
  return out;
}

// Synthetic universe: n firms, random INTAN and caps for the fiscal years, random returns.
struct Universe {
  std::vector<std::string> ids;
  DerivedSet derived;
  std::vector<MonthlyReturnRecord> returns;
  MonthWindow window;
};

Universe make_universe(std::size_t n, const MonthWindow& window, unsigned seed, double missing_rate = 0.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  Universe uni{{}, {}, {}, window};
  std::vector<DerivedFirmYear> recs;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "F%03zu", i);
    uni.ids.push_back(buf);
    for (int fy = window.start.year - 2; fy <= window.end.year; ++fy) {
      auto d = fixture::derived(buf, fy, 0.05 + 0.03 * z(gen), std::exp(3 + z(gen)),
                                u(gen) < 0.6 ? Exchange::NYSE : Exchange::NASDAQ);
      d.mtb = std::exp(0.5 + 0.5 * z(gen));
      recs.push_back(d);
    }
    for (const auto& m : window.months()) {
      if (u(gen) < missing_rate) continue;
      uni.returns.push_back({buf, m, 0.01 + 0.08 * z(gen)});
    }
  }
  uni.derived = fixture::derived_set(std::move(recs));
  return uni;
}

Panel panel_for(const Universe& uni) {
  return Panel(fundamentals_for(uni.ids, uni.window.start.year - 2, uni.window.end.year), uni.returns,
               fixture::flat_factors(uni.window, 0.002), uni.window);
}

}  // namespace

TEST_CASE("june breakpoints") {
  std::vector<DerivedFirmYear> recs;
  for (int i = 1; i <= 5; ++i) recs.push_back(fixture::derived("N" + std::to_string(i), 2000, 0.01 * i, i));
  // Non-NYSE firms are sorted but do not move the cutpoints.
  recs.push_back(fixture::derived("Q1", 2000, 0.5, 1000, Exchange::NASDAQ));
  const auto set = fixture::derived_set(recs);
  const auto b = june_breakpoints(set, 2001);
  CHECK(b.formation_year == 2001);
  CHECK(b.size_median == 3.0);
  CHECK_THAT(b.intan_low, WithinAbs(0.022, 1e-15));
  CHECK_THAT(b.intan_high, WithinAbs(0.038, 1e-15));

  BreakpointOptions all;
  all.nyse_only = false;
  CHECK(june_breakpoints(set, 2001, all).size_median == 3.5);

  CHECK(code_of([&] { june_breakpoints(set, 2005); }) == ErrorCode::InsufficientUniverse);
  const auto two = fixture::derived_set({fixture::derived("A", 2000, 0.1, 1), fixture::derived("B", 2000, 0.2, 2)});
  CHECK(code_of([&] { june_breakpoints(two, 2001); }) == ErrorCode::InsufficientUniverse);
  const auto no_nyse = fixture::derived_set({fixture::derived("A", 2000, 0.1, 1, Exchange::AMEX),
                                             fixture::derived("B", 2000, 0.2, 2, Exchange::AMEX),
                                             fixture::derived("C", 2000, 0.3, 3, Exchange::AMEX)});
  CHECK(code_of([&] { june_breakpoints(no_nyse, 2001); }) == ErrorCode::InsufficientUniverse);
}

TEST_CASE("INTANFT golden fixture") {
  const auto golden = fixture::golden_intanft(std::string(INTAN_TEST_DATA) + "/intanft_golden");
  const auto& result = golden.result;
  REQUIRE(result.series.values.size() == golden.expected.size());
  for (std::size_t i = 0; i < golden.expected.size(); ++i) {
    CHECK(result.series.months[i].str() == golden.expected[i].first);
    CHECK_THAT(result.series.values[i], WithinAbs(*csv::parse_double(golden.expected[i].second), 1e-15));
  }
  REQUIRE(result.cells.size() == 6);
  CHECK(result.cells[0].label == "S/L");
  CHECK(result.cells[0].members.at(2020).size() == 2);
  CHECK(result.cells[2].members.at(2021).front().firm_id == "A");
  CHECK(result.cells[5].members.at(2021).size() == 2);
  CHECK(result.breakpoints.size() == 2);
  CHECK(result.breakpoints[0].size_median == 7.0);
}

TEST_CASE("INTANFT matches the signed-weight oracle") {
  const auto uni = make_universe(60, MonthWindow::parse("2003-01..2004-12"), 5, 0.05);
  const auto panel = panel_for(uni);
  const auto res = build_intanft(panel, uni.derived, uni.window);
  std::map<std::pair<std::string, int>, double> caps;
  for (const auto& r : uni.derived.records) caps[{r.firm_id, r.fiscal_year}] = r.market_equity_june;
  for (std::size_t i = 0; i < res.series.months.size(); ++i) {
    const auto m = res.series.months[i];
    double want = 0;
    for (const auto& [id, w] : oracle::intanft_weights(res.cells, panel, caps, m)) want += w * *panel.firm_return(id, m);
    CHECK_THAT(res.series.values[i], WithinAbs(want, 1e-14));
  }
}

TEST_CASE("INTANFT invariances") {
  const auto uni = make_universe(40, MonthWindow::parse("2003-01..2003-12"), 9);
  const auto base = build_intanft(panel_for(uni), uni.derived, uni.window);

  SECTION("identical returns give a zero factor") {
    auto same = uni;
    for (auto& r : same.returns) r.total_return = 0.01 * r.month.month;
    for (double v : build_intanft(panel_for(same), same.derived, same.window).series.values) CHECK(std::abs(v) < 1e-15);
  }
  SECTION("a common return shift cancels") {
    auto shifted = uni;
    for (auto& r : shifted.returns) r.total_return += 0.05;
    const auto s = build_intanft(panel_for(shifted), shifted.derived, shifted.window);
    for (std::size_t i = 0; i < s.series.values.size(); ++i) {
      CHECK_THAT(s.series.values[i], WithinAbs(base.series.values[i], 1e-14));
    }
  }
  SECTION("scaling every cap leaves the factor unchanged") {
    auto scaled = uni;
    for (auto& r : scaled.derived.records) {
      r.market_equity_june *= 7.5;
      r.market_equity *= 7.5;
    }
    const auto s = build_intanft(panel_for(scaled), scaled.derived, scaled.window);
    for (std::size_t i = 0; i < s.series.values.size(); ++i) {
      CHECK_THAT(s.series.values[i], WithinAbs(base.series.values[i], 1e-14));
    }
  }
}

TEST_CASE("INTANFT errors") {
  const auto uni = make_universe(30, MonthWindow::parse("2003-01..2003-12"), 2);
  const auto panel = panel_for(uni);
  CHECK(code_of([&] { build_intanft(panel, uni.derived, MonthWindow::parse("2002-01..2003-12")); }) ==
        ErrorCode::WindowUncovered);

  // Every firm gets the same INTAN, so the low and high cells of some size half are empty.
  auto flat = uni.derived;
  for (auto& r : flat.records) r.intan = 0.05;
  try {
    build_intanft(panel, flat, uni.window);
    FAIL("expected EmptyCell");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCell);
  }
}

TEST_CASE("quantile sort sizes and ordering") {
  auto sizes_for = [](int n) {
    std::vector<DerivedFirmYear> recs;
    for (int i = 0; i < n; ++i) {
      auto d = fixture::derived("F" + std::to_string(100 + i), 2000, 0, 1);
      d.mtb = 1.0 + (i * 37 % n);
      recs.push_back(d);
    }
    const auto p = quantile_sort(fixture::derived_set(recs), Variable::MTB, 5, 2001, 2001);
    std::vector<std::size_t> sizes;
    for (const auto& q : p) sizes.push_back(q.members.at(2001).size());
    return sizes;
  };
  CHECK(sizes_for(10) == std::vector<std::size_t>{2, 2, 2, 2, 2});
  CHECK(sizes_for(11) == std::vector<std::size_t>{3, 2, 2, 2, 2});
  CHECK(sizes_for(14) == std::vector<std::size_t>{3, 3, 3, 3, 2});
  CHECK(code_of([&] { sizes_for(4); }) == ErrorCode::InsufficientUniverse);

  SECTION("ties break on firm id and bins partition the universe") {
    std::vector<DerivedFirmYear> recs;
    for (const char* id : {"E", "D", "C", "B", "A", "J", "I", "H", "G", "F"}) {
      auto d = fixture::derived(id, 2000, 0, 1);
      d.mtb = 2.0;
      recs.push_back(d);
    }
    const auto p = quantile_sort(fixture::derived_set(recs), Variable::MTB, 5, 2001, 2001);
    CHECK(p[0].label == "MTB1");
    CHECK(p[4].label == "MTB5");
    CHECK(p[0].members.at(2001)[0].firm_id == "A");
    CHECK(p[4].members.at(2001)[1].firm_id == "J");
    std::set<std::string> seen;
    for (const auto& q : p) {
      for (const auto& m : q.members.at(2001)) CHECK(seen.insert(m.firm_id).second);
    }
    CHECK(seen.size() == 10);
  }
  SECTION("higher bins hold higher values") {
    const auto uni = make_universe(57, MonthWindow::parse("2003-01..2004-12"), 4);
    const auto p = quantile_sort(uni.derived, Variable::MTB, 5, 2003, 2004);
    for (int y : {2003, 2004}) {
      for (std::size_t b = 0; b + 1 < p.size(); ++b) {
        double hi = -1e300, lo = 1e300;
        for (const auto& m : p[b].members.at(y)) {
          for (const auto& r : uni.derived.records) {
            if (r.firm_id == m.firm_id && r.fiscal_year == y - 1) hi = std::max(hi, *r.mtb);
          }
        }
        for (const auto& m : p[b + 1].members.at(y)) {
          for (const auto& r : uni.derived.records) {
            if (r.firm_id == m.firm_id && r.fiscal_year == y - 1) lo = std::min(lo, *r.mtb);
          }
        }
        CHECK(hi <= lo);
      }
    }
  }
}

TEST_CASE("independent double sort") {
  const auto uni = make_universe(80, MonthWindow::parse("2003-01..2003-12"), 8);
  const auto ds = independent_double_sort(uni.derived, Variable::MTB, 5, Variable::INTAN, 4, 2003, 2003);
  REQUIRE(ds.cells.size() == 20);
  CHECK(ds.cells[0].label == "MTB1/INTAN1");
  CHECK(ds.cells[4].label == "MTB2/INTAN1");
  CHECK(ds.cells[19].label == "MTB5/INTAN4");
  std::size_t total = 0;
  for (const auto& c : ds.cells) {
    auto it = c.members.find(2003);
    if (it != c.members.end()) total += it->second.size();
  }
  CHECK(total == 80);
}

TEST_CASE("portfolio returns") {
  const auto window = MonthWindow::parse("2003-01..2003-03");
  std::vector<MonthlyReturnRecord> rets{{"A", {2003, 1}, 0.02}, {"B", {2003, 1}, 0.04}, {"A", {2003, 2}, 0.01}};
  Panel panel(fundamentals_for({"A", "B"}, 2002, 2002), rets, fixture::flat_factors(window, 0.001), window);
  Portfolio p{"P", {{2003, {{"A", 1.0}, {"B", 3.0}}}}};
  const auto ew = portfolio_returns(p, panel, window);
  REQUIRE(ew.months.size() == 2);  // March has no member return
  CHECK_THAT(ew.returns[0], WithinAbs(0.03, 1e-15));
  CHECK(ew.n_firms[0] == 2);
  CHECK_THAT(ew.returns[1], WithinAbs(0.01, 1e-15));
  CHECK_THAT(ew.excess_returns[0], WithinAbs(0.029, 1e-15));
  const auto vw = portfolio_returns(p, panel, window, Weighting::Value);
  CHECK_THAT(vw.returns[0], WithinAbs(0.035, 1e-15));

  Portfolio single{"S", {{2003, {{"B", 5.0}}}}};
  CHECK(portfolio_returns(single, panel, window).returns == std::vector<double>{0.04});

  SECTION("matches the firm loop on a larger portfolio") {
    const auto uni = make_universe(50, MonthWindow::parse("2003-01..2004-12"), 12, 0.1);
    const auto big_panel = panel_for(uni);
    const auto sorted = quantile_sort(uni.derived, Variable::MTB, 1, 2003, 2004);
    for (bool value : {false, true}) {
      const auto got = portfolio_returns(sorted[0], big_panel, uni.window, value ? Weighting::Value : Weighting::Equal);
      const auto want = oracle::portfolio_loop(sorted[0], big_panel, uni.window, value);
      REQUIRE(got.months.size() == want.size());
      for (std::size_t i = 0; i < got.months.size(); ++i) {
        CHECK_THAT(got.returns[i], WithinAbs(want.at(got.months[i]), 1e-12));
        CHECK(got.excess_returns[i] == got.returns[i] - 0.002);
      }
    }
  }
}

TEST_CASE("membership rows") {
  Portfolio p{"MTB1", {{2003, {{"B", 1.0}, {"C", 1.0}}}, {2004, {{"A", 1.0}}}}};
  CHECK(write_memberships({p}, "late:") == "2003,late:MTB1,B\n2003,late:MTB1,C\n2004,late:MTB1,A\n");
}
