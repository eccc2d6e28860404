#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <functional>

#include "fixtures.hpp"
#include "intan/calendar.hpp"
#include "intan/csv.hpp"
#include "intan/digest.hpp"
#include "intan/error.hpp"
#include "intan/keyvalue.hpp"
#include "intan/panel.hpp"
#include "intan/rng.hpp"

using namespace intan;

namespace {

const char* kFundamentalsHeader =
    "firm_id,fiscal_year,sic,revenue,cogs,sga_expense,rd_expense,interest_expense,net_income,total_assets,"
    "total_assets_prior,book_equity,market_equity,market_equity_june,ltg,exchange\n";

std::string fund_row(const std::string& id, int fy, const std::string& overrides_sic = "2011",
                     const std::string& rd = "5", const std::string& book = "40", const std::string& assets = "110") {
  return id + "," + std::to_string(fy) + "," + overrides_sic + ",100,50,20," + rd + ",1,8," + assets + ",90," + book +
         ",80,85,12.5,NYSE\n";
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an intan::Error");
  return ErrorCode::InvalidSpec;
}

}  // namespace

TEST_CASE("calendar month arithmetic") {
  CalendarMonth m{1963, 7};
  CHECK(m.plus(6) == CalendarMonth{1964, 1});
  CHECK(m.plus(-7) == CalendarMonth{1962, 12});
  CHECK(CalendarMonth::from_index(m.index()) == m);
  CHECK(CalendarMonth::parse("2022-12") == CalendarMonth{2022, 12});
  CHECK(code_of([] { CalendarMonth::parse("2022-13"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { CalendarMonth::parse("22-1x"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("default study windows have 354 and 360 months") {
  CHECK(MonthWindow::parse("1963-07..1992-12").size() == 354);
  CHECK(MonthWindow::parse("1993-01..2022-12").size() == 360);
  CHECK(MonthWindow::parse("1993-01..2022-12").str() == "1993-01..2022-12");
}

TEST_CASE("months_excluding yields the complement in order") {
  const auto late = MonthWindow::parse("1993-01..2022-12");
  const auto bubble = MonthWindow::parse("1995-01..2000-12");
  const auto rest = months_excluding(late, bubble);
  CHECK(rest.size() == 360 - 72);
  CHECK(rest[23] == CalendarMonth{1994, 12});
  CHECK(rest[24] == CalendarMonth{2001, 1});
  CHECK(std::is_sorted(rest.begin(), rest.end()));
}

TEST_CASE("csv number formatting round-trips") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.125, 0.0}) {
    CHECK(csv::parse_double(csv::format_double(v)).value() == v);
  }
  CHECK(csv::format_double(std::nan("")).empty());
  CHECK_FALSE(csv::parse_double("").has_value());
  CHECK_FALSE(csv::parse_double("1.2.3").has_value());
}

TEST_CASE("csv parse skips blanks and comments") {
  auto t = csv::parse("# note\na,b\n\n1,2\n3,4\n", ',');
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.row_numbers[1] == 5);
}

TEST_CASE("fundamentals loader") {
  SECTION("valid rows load and blank rd becomes zero") {
    auto res = parse_fundamentals(std::string(kFundamentalsHeader) + fund_row("A", 2000) + fund_row("B", 2000, "2011", ""));
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[1].rd_expense == 0.0);
    CHECK(res.records[0].ltg.value() == 12.5);
    CHECK(res.quarantined.empty());
  }
  SECTION("invalid rows are quarantined with a reason") {
    auto res = parse_fundamentals(std::string(kFundamentalsHeader) + fund_row("A", 2000) +
                                  fund_row("B", 2000, "2011", "5", "40", "0") + fund_row("C", 2000, "20X1") +
                                  fund_row("D", 2000, "2011", "-1"));
    CHECK(res.records.size() == 1);
    REQUIRE(res.quarantined.size() == 3);
    CHECK(res.quarantined[0].row == 3);
    CHECK(res.quarantined[0].reason == "invariant violated: total_assets > 0");
  }
  SECTION("blank book equity counts as a missing-data drop") {
    auto res = parse_fundamentals(std::string(kFundamentalsHeader) + fund_row("A", 2000) + fund_row("B", 2000, "2011", "5", ""));
    CHECK(res.records.size() == 1);
    CHECK(res.dropped_missing == 1);
  }
  SECTION("strict mode throws on the first invalid row") {
    CHECK(code_of([] {
            parse_fundamentals(std::string(kFundamentalsHeader) + fund_row("A", 2000, "1"), {',', true});
          }) == ErrorCode::InvalidRecord);
  }
  SECTION("duplicates, empty files and missing columns") {
    CHECK(code_of([] { parse_fundamentals(std::string(kFundamentalsHeader) + fund_row("A", 2000) + fund_row("A", 2000)); }) ==
          ErrorCode::DuplicateKey);
    CHECK(code_of([] { parse_fundamentals(kFundamentalsHeader); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { parse_fundamentals("firm_id,fiscal_year\nA,2000\n"); }) == ErrorCode::SchemaMismatch);
  }
  SECTION("writer output reloads to equal records") {
    auto res = parse_fundamentals(std::string(kFundamentalsHeader) + fund_row("A", 2000) + fund_row("B", 2001));
    auto again = parse_fundamentals(write_fundamentals(res.records));
    CHECK(again.records == res.records);
  }
}

TEST_CASE("returns loader rejects impossible returns") {
  auto res = parse_returns("firm_id,year,month,total_return\nA,2000,1,0.01\nA,2000,2,-1\nA,2000,13,0.0\n");
  CHECK(res.records.size() == 1);
  CHECK(res.quarantined.size() == 2);
  CHECK(code_of([] { parse_returns("firm_id,year,month,total_return\nA,2000,1,0.01\nA,2000,1,0.02\n"); }) ==
        ErrorCode::DuplicateKey);
}

TEST_CASE("factor loader requires a gap-free window") {
  const auto window = MonthWindow::parse("2000-01..2000-03");
  std::string text = "year,month,mktrf,smb,hml,rmw,cma,umd,rf\n";
  text += "1999,12,9,9,9,9,9,9,9\n2000,1,1,2,3,4,5,6,0.1\n2000,3,1,2,3,4,5,6,0.1\n";
  try {
    parse_factors(text, window);
    FAIL("expected GapInSeries");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GapInSeries);
    CHECK(std::string(e.what()).find("2000-02") != std::string::npos);
  }
  text += "2000,2,1,2,3,4,5,6,0.1\n";
  auto f = parse_factors(text, window);
  REQUIRE(f.size() == 3);
  CHECK(f[1].month == CalendarMonth{2000, 2});
  CHECK(f[0].hml == 3.0);
  CHECK(parse_factors(write_factors(f), window) == f);
}

TEST_CASE("panel alignment") {
  const auto window = MonthWindow::parse("2000-01..2000-06");
  std::vector<FirmYearRecord> fund{fixture::firm_year("B", 1999), fixture::firm_year("A", 1999)};
  std::vector<MonthlyReturnRecord> rets{{"A", {2000, 1}, 0.01}, {"B", {2000, 2}, 0.02}, {"A", {2001, 1}, 0.5}};
  Panel p(fund, rets, fixture::flat_factors(window, 0.001), window);
  CHECK(p.firms() == std::vector<std::string>{"A", "B"});
  CHECK(p.firm_return("A", {2000, 1}).value() == 0.01);
  CHECK_FALSE(p.firm_return("A", {2000, 2}).has_value());
  CHECK(p.returns().size() == 2);
  CHECK(p.factor({2000, 6}).rf == 0.001);
  CHECK(p.fundamentals_for("B", 1999) != nullptr);

  std::vector<MonthlyReturnRecord> orphan{{"Z", {2000, 1}, 0.01}};
  CHECK(code_of([&] { Panel(fund, orphan, fixture::flat_factors(window), window); }) == ErrorCode::OrphanReturns);
  Panel tolerant(fund, orphan, fixture::flat_factors(window), window, {true});
  CHECK(tolerant.orphan_firms() == std::vector<std::string>{"Z"});

  auto short_factors = fixture::flat_factors(MonthWindow::parse("2000-01..2000-05"));
  CHECK(code_of([&] { Panel(fund, rets, short_factors, window); }) == ErrorCode::GapInSeries);
}

TEST_CASE("key-value parsing") {
  auto kv = parse_key_values("# c\n a = 1 \nb=x, y\n", ErrorCode::InvalidConfig);
  REQUIRE(kv.size() == 2);
  CHECK(kv[0].key == "a");
  CHECK(kv[1].value == "x, y");
  CHECK(code_of([] { parse_key_values("a=1\na=2\n", ErrorCode::InvalidConfig); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_key_values("novalue\n", ErrorCode::InvalidSpec); }) == ErrorCode::InvalidSpec);
  CHECK(parse_number_list("1, 2.5,-3", "k", ErrorCode::InvalidSpec) == std::vector<double>{1, 2.5, -3});
}

TEST_CASE("rng is deterministic and roughly standard normal") {
  Rng a(42), b(42);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a.normal();
    REQUIRE(x == b.normal());
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("error categories map to exit classes") {
  CHECK(category(ErrorCode::InvalidConfig) == ErrorCategory::Validation);
  CHECK(category(ErrorCode::RankDeficient) == ErrorCategory::Numeric);
  CHECK(category(ErrorCode::MissingVariable) == ErrorCategory::Data);
  CHECK(std::string(Error(ErrorCode::EmptyCell, "x").what()).find("EmptyCell") != std::string::npos);
}
