#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "intan/calendar.hpp"

namespace intan {

enum class Exchange { NYSE, AMEX, NASDAQ };

std::string_view to_string(Exchange e);
std::optional<Exchange> parse_exchange(std::string_view s);

/// One firm's fundamentals for one fiscal year. Currency fields share one unit.
struct FirmYearRecord {
  std::string firm_id;
  int fiscal_year = 0;
  std::string sic;
  double revenue = 0.0;
  double cogs = 0.0;
  double sga_expense = 0.0;
  double rd_expense = 0.0;  // 0 when the source cell is blank
  double interest_expense = 0.0;
  double net_income = 0.0;
  double total_assets = 0.0;
  double total_assets_prior = 0.0;
  double book_equity = 0.0;
  double market_equity = 0.0;       // end of calendar year
  double market_equity_june = 0.0;  // June of the following calendar year
  std::optional<double> ltg;
  Exchange exchange = Exchange::NYSE;

  bool operator==(const FirmYearRecord&) const = default;
};

struct MonthlyReturnRecord {
  std::string firm_id;
  CalendarMonth month;
  double total_return = 0.0;  // decimal fraction

  bool operator==(const MonthlyReturnRecord&) const = default;
};

struct FactorObservation {
  CalendarMonth month;
  double mktrf = 0.0;
  double smb = 0.0;
  double hml = 0.0;
  double rmw = 0.0;
  double cma = 0.0;
  double umd = 0.0;
  double rf = 0.0;

  bool operator==(const FactorObservation&) const = default;
};

/// A row that was read but not accepted.
struct QuarantinedRow {
  std::size_t row = 0;  // 1-based line number in the source file
  std::string reason;
};

template <typename Record>
struct LoadResult {
  std::vector<Record> records;
  std::vector<QuarantinedRow> quarantined;
  // Rows dropped because a field needed for MTB, ROE or SGA was blank (subset of quarantined).
  std::size_t dropped_missing = 0;
};

struct LoadOptions {
  char delimiter = ',';
  // Throw on the first invalid row instead of quarantining it.
  bool strict = false;
};

// Column names of the three input files, in canonical order.
extern const std::vector<std::string> kFundamentalsColumns;
extern const std::vector<std::string> kReturnsColumns;
extern const std::vector<std::string> kFactorsColumns;

LoadResult<FirmYearRecord> load_fundamentals(const std::filesystem::path& path, const LoadOptions& options = {});
LoadResult<FirmYearRecord> parse_fundamentals(std::string_view text, const LoadOptions& options = {});

LoadResult<MonthlyReturnRecord> load_returns(const std::filesystem::path& path, const LoadOptions& options = {});
LoadResult<MonthlyReturnRecord> parse_returns(std::string_view text, const LoadOptions& options = {});

/// Returns observations covering exactly `window`, ascending. Rows outside the window are ignored.
std::vector<FactorObservation> load_factors(const std::filesystem::path& path, const MonthWindow& window,
                                            const LoadOptions& options = {});
std::vector<FactorObservation> parse_factors(std::string_view text, const MonthWindow& window,
                                             const LoadOptions& options = {});

std::string write_fundamentals(const std::vector<FirmYearRecord>& records);
std::string write_returns(const std::vector<MonthlyReturnRecord>& records);
std::string write_factors(const std::vector<FactorObservation>& factors);

std::string write_quarantine(std::string_view source, const std::vector<QuarantinedRow>& rows);

struct BuildOptions {
  // Report returns whose firm has no fundamentals instead of failing.
  bool tolerate_orphans = false;
};

/// Validated, aligned, read-only view over fundamentals, returns and factors.
class Panel {
 public:
  Panel(std::vector<FirmYearRecord> fundamentals, std::vector<MonthlyReturnRecord> returns,
        std::vector<FactorObservation> factors, MonthWindow window, const BuildOptions& options = {});

  const MonthWindow& window() const noexcept { return window_; }
  const std::vector<FirmYearRecord>& fundamentals() const noexcept { return fundamentals_; }
  const std::vector<MonthlyReturnRecord>& returns() const noexcept { return returns_; }
  const std::vector<FactorObservation>& factors() const noexcept { return factors_; }
  const std::vector<std::string>& orphan_firms() const noexcept { return orphans_; }

  const FactorObservation& factor(CalendarMonth m) const;

  /// Dense firm index over firms that appear in fundamentals, sorted by firm_id.
  const std::vector<std::string>& firms() const noexcept { return firm_ids_; }
  std::optional<std::size_t> firm_index(std::string_view firm_id) const;

  /// Total return of a firm in a month, if present inside the window.
  std::optional<double> firm_return(std::size_t firm, CalendarMonth m) const;
  std::optional<double> firm_return(std::string_view firm_id, CalendarMonth m) const;

  /// Fundamentals record for (firm, fiscal year), if present.
  const FirmYearRecord* fundamentals_for(std::string_view firm_id, int fiscal_year) const;

 private:
  std::vector<FirmYearRecord> fundamentals_;
  std::vector<MonthlyReturnRecord> returns_;
  std::vector<FactorObservation> factors_;
  MonthWindow window_;
  std::vector<std::string> orphans_;
  std::vector<std::string> firm_ids_;
  std::unordered_map<std::string, std::size_t> firm_lookup_;
  std::map<std::pair<std::string, int>, std::size_t> fundamentals_lookup_;
  // Row-major [firm][month offset]; NaN marks a missing month.
  std::vector<double> return_grid_;
};

Panel build_panel(std::vector<FirmYearRecord> fundamentals, std::vector<MonthlyReturnRecord> returns,
                  std::vector<FactorObservation> factors, const MonthWindow& window,
                  const BuildOptions& options = {});

}  // namespace intan
