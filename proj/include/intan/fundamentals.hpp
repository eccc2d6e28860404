#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intan/calendar.hpp"
#include "intan/econometrics.hpp"
#include "intan/panel.hpp"

namespace intan {

/// Firm-level variables available for statistics and sorts.
enum class Variable { MTB, ROE, RD, SGA, OP, INTAN, LTG };

std::string_view to_string(Variable v);
std::optional<Variable> parse_variable(std::string_view s);

/// True iff the SIC code starts with 283, 357, 366, 38, 48 or 737.
/// Throws MalformedSic unless `sic` is a 2-4 digit string.
bool classify_tech(std::string_view sic);

/// One firm-year prepared for the SG&A expectation model. SG&A and revenue are scaled
/// by average total assets.
struct SgaObservation {
  std::string firm_id;
  int fiscal_year = 0;
  std::string sic;
  double scaled_sga = 0.0;
  double scaled_revenue = 0.0;
  bool revenue_decrease = false;  // revenue below the firm's previous fiscal year
  bool loss = false;              // net income < 0
  double avg_assets = 0.0;
};

enum class FallbackLevel { SIC3, SIC2, YEAR_POOLED };
std::string_view to_string(FallbackLevel level);

/// SG&A_scaled = alpha + beta * Revenue_scaled + gamma * Revenue_Decrease + lambda * Loss + e
struct SgaModelFit {
  std::string industry;  // SIC prefix of the estimation group; empty when year-pooled
  int year = 0;
  FallbackLevel level = FallbackLevel::SIC3;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  std::array<double, 4> std_errors{};  // alpha, beta, gamma, lambda; 0 when not estimated
  // A dummy that is constant within the group is collinear with the intercept; it is
  // then left out of the fit and its coefficient is fixed at 0.
  bool gamma_estimated = true;
  bool lambda_estimated = true;
  std::size_t n_obs = 0;
  std::vector<std::size_t> estimation_sample;  // indices into the observation span

  double predict(const SgaObservation& obs) const;
};

struct SgaFitSet {
  std::vector<SgaModelFit> fits;
  std::vector<std::size_t> fit_of;  // observation index -> fit index, or kUnassigned
  static constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
};

struct SgaOptions {
  std::size_t min_group_size = 15;
  // Leave observations of years without a usable fit unassigned instead of throwing.
  bool skip_unusable_years = false;
};

/// Builds SG&A model inputs. Firm-years with nonpositive average assets are skipped.
std::vector<SgaObservation> make_sga_observations(std::span<const FirmYearRecord> records);

/// Fits the SG&A expectation model by (3-digit SIC, year). Groups below the minimum size
/// fall back to the firm's (2-digit SIC, year) group, then to all firms of that year.
/// Every observation maps to exactly one fit. Throws NoUsableFit when a year has fewer
/// than the minimum number of firm-years or no level yields a full-rank fit.
SgaFitSet fit_sga_model(std::span<const SgaObservation> observations, const SgaOptions& options = {});

/// (actual scaled SG&A - predicted scaled SG&A) * average total assets.
double sga_investment_component(const SgaObservation& obs, const SgaModelFit& fit);

/// (R&D + SG&A investment component) / average total assets. Throws InvalidRecord when
/// average assets are not positive.
double compute_intan(double rd_expense, double sga_component, double avg_assets);

struct DerivedFirmYear {
  std::string firm_id;
  int fiscal_year = 0;
  std::string sic;
  Exchange exchange = Exchange::NYSE;
  bool is_tech = false;
  std::optional<double> mtb;  // absent when book equity <= 0
  std::optional<double> roe;
  std::optional<double> op;
  std::optional<double> rd_intensity;  // absent when revenue <= 0
  std::optional<double> sga_intensity;
  double intan = 0.0;
  double sga_investment_component = 0.0;
  double avg_assets = 0.0;
  double market_equity = 0.0;
  double market_equity_june = 0.0;
  std::optional<double> ltg;
  FallbackLevel sga_fit_level = FallbackLevel::SIC3;

  std::optional<double> value(Variable v) const;
};

struct Diagnostic {
  std::string firm_id;
  int fiscal_year = 0;
  std::string reason;
};

struct DeriveOptions {
  SgaOptions sga;
  // Symmetric percentile clamp applied per fiscal year to every ratio; 0 disables.
  double winsor_pct = 0.0;
};

struct DerivedSet {
  std::vector<DerivedFirmYear> records;  // sorted by (fiscal_year, firm_id)
  std::vector<SgaObservation> observations;
  SgaFitSet sga_fits;
  std::vector<Diagnostic> diagnostics;

  /// Records of one fiscal year, in firm_id order.
  std::vector<const DerivedFirmYear*> year(int fiscal_year) const;
};

DerivedSet derive_all(std::span<const FirmYearRecord> records, const DeriveOptions& options = {});
DerivedSet derive_all(const Panel& panel, const DeriveOptions& options = {});

std::string write_diagnostics(const std::vector<Diagnostic>& diagnostics);

enum class FirmGroup { All, Tech, NonTech };
std::string_view to_string(FirmGroup g);

struct SummaryStat {
  double mean = 0.0;
  double median = 0.0;
  std::size_t n = 0;
};

struct PeriodSummary {
  MonthWindow window;
  SummaryStat first_year;
  SummaryStat last_year;
  SummaryStat whole;
};

struct DescriptiveRow {
  FirmGroup group = FirmGroup::All;
  Variable variable = Variable::MTB;
  std::vector<PeriodSummary> periods;
  // Later period versus earlier period; NaN when only one period or the test is undefined.
  double t_value = 0.0;
  double t_p = 1.0;
  double z_value = 0.0;
  double z_p = 1.0;
};

struct DescriptiveTable {
  std::vector<DescriptiveRow> rows;
};

/// Mean and median of MTB, ROE, RD, SGA and INTAN per firm group and period, with a Welch t
/// and rank-sum z comparing the later period to the earlier one. A firm-year belongs to a
/// period when its fiscal year lies within the period's calendar years.
DescriptiveTable descriptive_table(const DerivedSet& derived, const std::vector<MonthWindow>& periods);

}  // namespace intan
