#include "fixtures.hpp"

#include <algorithm>
#include <tuple>

#include "intan/csv.hpp"

namespace fixture {

intan::FirmYearRecord firm_year(const std::string& id, int fiscal_year, const std::string& sic,
                                intan::Exchange exchange) {
  intan::FirmYearRecord r;
  r.firm_id = id;
  r.fiscal_year = fiscal_year;
  r.sic = sic;
  r.revenue = 100;
  r.cogs = 50;
  r.sga_expense = 20;
  r.rd_expense = 5;
  r.interest_expense = 1;
  r.net_income = 8;
  r.total_assets = 110;
  r.total_assets_prior = 90;
  r.book_equity = 40;
  r.market_equity = 80;
  r.market_equity_june = 85;
  r.exchange = exchange;
  return r;
}

std::vector<intan::FactorObservation> flat_factors(const intan::MonthWindow& window, double rf) {
  std::vector<intan::FactorObservation> out;
  for (const auto& m : window.months()) {
    intan::FactorObservation f;
    f.month = m;
    f.rf = rf;
    out.push_back(f);
  }
  return out;
}

intan::DerivedFirmYear derived(const std::string& id, int fiscal_year, double intan, double june_cap,
                               intan::Exchange exchange) {
  intan::DerivedFirmYear d;
  d.firm_id = id;
  d.fiscal_year = fiscal_year;
  d.sic = "2011";
  d.exchange = exchange;
  d.intan = intan;
  d.market_equity = june_cap;
  d.market_equity_june = june_cap;
  d.avg_assets = 100;
  return d;
}

intan::DerivedSet derived_set(std::vector<intan::DerivedFirmYear> records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.fiscal_year, a.firm_id) < std::tie(b.fiscal_year, b.firm_id);
  });
  intan::DerivedSet set;
  set.records = std::move(records);
  return set;
}

intan::Panel panel_of(const intan::SynthData& data) {
  return intan::build_panel(data.fundamentals, data.returns, data.factors, data.spec.window);
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("intan_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixture

namespace fixture {

GoldenIntanft golden_intanft(const std::filesystem::path& dir) {
  const auto firms = intan::csv::read(dir / "firms.csv");
  std::vector<intan::DerivedFirmYear> recs;
  std::vector<intan::FirmYearRecord> fundamentals;
  for (const auto& row : firms.rows) {
    const int fy = static_cast<int>(*intan::csv::parse_int(row[1]));
    const auto exchange = *intan::parse_exchange(row[2]);
    recs.push_back(derived(row[0], fy, *intan::csv::parse_double(row[4]), *intan::csv::parse_double(row[3]), exchange));
    fundamentals.push_back(firm_year(row[0], fy, "2011", exchange));
  }
  const auto window = intan::MonthWindow::parse("2021-01..2021-12");
  auto returns = intan::load_returns(dir / "returns.csv");
  intan::Panel panel(std::move(fundamentals), std::move(returns.records), flat_factors(window), window);

  GoldenIntanft out;
  out.result = intan::build_intanft(panel, derived_set(std::move(recs)), window);
  const auto expected = intan::csv::read(dir / "expected.csv");
  for (const auto& row : expected.rows) out.expected.emplace_back(row[0], row[1]);
  return out;
}

}  // namespace fixture
