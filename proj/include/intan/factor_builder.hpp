#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "intan/calendar.hpp"
#include "intan/fundamentals.hpp"
#include "intan/panel.hpp"

namespace intan {

enum class Weighting { Equal, Value };
std::string_view to_string(Weighting w);
std::optional<Weighting> parse_weighting(std::string_view s);

struct BreakpointOptions {
  bool nyse_only = true;  // breakpoint universe; sorting always covers every firm
  double intan_low_pct = 30.0;
  double intan_high_pct = 70.0;
};

/// June cutpoints for the size/INTAN double sort of one formation year.
struct Breakpoints {
  int formation_year = 0;
  double size_median = 0.0;
  double intan_low = 0.0;
  double intan_high = 0.0;
};

/// Cutpoints for June of `formation_year`, from fiscal-year `formation_year - 1` records.
/// Throws InsufficientUniverse without a breakpoint firm or with fewer than 3 firms.
Breakpoints june_breakpoints(const DerivedSet& derived, int formation_year, const BreakpointOptions& options = {});

struct FactorSeries {
  std::string name;
  std::vector<CalendarMonth> months;
  std::vector<double> values;
};

struct PortfolioMember {
  std::string firm_id;
  double weight_base = 0.0;  // market cap used for value weighting
};

/// One portfolio's membership by formation year, members in firm_id order.
struct Portfolio {
  std::string label;
  std::map<int, std::vector<PortfolioMember>> members;
};

struct IntanftOptions {
  BreakpointOptions breakpoints;
  Weighting weighting = Weighting::Value;  // within each of the six cells
};

struct IntanftResult {
  FactorSeries series;
  std::vector<Breakpoints> breakpoints;  // one per formation year
  // Cells "S/L", "S/M", "S/H", "B/L", "B/M", "B/H"; formation year is the June of formation.
  std::vector<Portfolio> cells;
};

/// INTANFT = (S/H + B/H)/2 - (S/L + B/L)/2 for every month of `window`. Portfolios formed in
/// June t are held July t through June t+1. Small means June cap <= size median, Low means
/// INTAN <= low cut, High means INTAN > high cut.
/// Throws EmptyCell naming the year and cell when a used cell has no members, or none of
/// its members has a return in some month.
IntanftResult build_intanft(const Panel& panel, const DerivedSet& derived, const MonthWindow& window,
                            const IntanftOptions& options = {});

/// Quintile-style sort: for each holding year Y in [first_year, last_year], firms with the
/// variable at fiscal year Y-1 are ranked by (value, firm_id) and split into n_bins groups of
/// near-equal size; the n % n_bins leftover firms go to the lowest bins. Labels are
/// "<VAR>1".."<VAR>n", 1 holding the lowest values. Value weights use December market cap.
/// Throws InsufficientUniverse when a year has fewer than n_bins firms.
std::vector<Portfolio> quantile_sort(const DerivedSet& derived, Variable variable, int n_bins, int first_year,
                                     int last_year);

struct EmptyCellReport {
  int year = 0;
  std::string label;
};

struct DoubleSort {
  std::vector<Portfolio> cells;  // a-major order, labels "<A>i/<B>j"
  std::vector<EmptyCellReport> empty_cells;
};

/// Independent sorts of the firms that have both variables; each cell is the intersection
/// of one bin of each sort.
DoubleSort independent_double_sort(const DerivedSet& derived, Variable a, int a_bins, Variable b, int b_bins,
                                   int first_year, int last_year);

struct PortfolioSeries {
  std::string label;
  Weighting weighting = Weighting::Equal;
  std::vector<CalendarMonth> months;
  std::vector<double> returns;
  std::vector<double> excess_returns;  // returns[i] - rf[i]
  std::vector<std::size_t> n_firms;    // members with a return that month
};

/// Monthly weighted mean return of the members with a return that month; the holding year is
/// the calendar year of the month. Months without any member return are omitted.
PortfolioSeries portfolio_returns(const Portfolio& portfolio, const Panel& panel, const MonthWindow& window,
                                  Weighting weighting = Weighting::Equal);

/// CSV rows (no header) formation_year, portfolio_label, firm_id; labels get `prefix`.
std::string write_memberships(const std::vector<Portfolio>& portfolios, std::string_view prefix = "");

}  // namespace intan
