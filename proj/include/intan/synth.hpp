#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "intan/calendar.hpp"
#include "intan/panel.hpp"

namespace intan {

inline constexpr std::size_t kSynthFactors = 7;  // MKTRF SMB HML RMW CMA UMD RF
inline constexpr std::size_t kSynthLoadings = 6;  // every factor except RF

struct SynthSpec {
  std::size_t n_firms = 100;
  MonthWindow window{{2001, 1}, {2010, 12}};
  std::uint64_t seed = 1;

  std::array<double, kSynthFactors> factor_mean{0.006, 0.002, 0.003, 0.003, 0.002, 0.005, 0.003};
  std::array<double, kSynthFactors> factor_vol{0.045, 0.03, 0.03, 0.02, 0.02, 0.04, 0.0005};
  // Row-major target correlation; identity when left empty.
  std::vector<double> factor_corr;

  std::array<double, kSynthLoadings> loading_mean{1.0, 0.3, 0.2, 0.1, 0.0, 0.0};
  std::array<double, kSynthLoadings> loading_sd{0.3, 0.4, 0.4, 0.3, 0.3, 0.2};
  double idio_vol = 0.08;

  std::size_t n_industries = 10;
  double tech_share = 0.3;
  // Per-industry SG&A coefficients are drawn around these means with sga_coef_sd.
  double sga_alpha = 0.05;
  double sga_beta = 0.2;
  double sga_gamma = 0.02;
  double sga_lambda = 0.03;
  double sga_coef_sd = 0.02;
  double sga_noise = 0.03;
  double rd_intensity_tech = 0.08;
  double rd_intensity_nontech = 0.02;
  double rd_sd = 0.02;

  double nyse_share = 0.4;
  double amex_share = 0.1;
  bool ltg = true;

  double missing_return_rate = 0.0;
  double missing_field_rate = 0.0;  // book equity left blank
};

/// Parses a `key = value` spec; list values are comma-separated. Unknown keys and invalid
/// values throw InvalidSpec.
SynthSpec parse_synth_spec(std::string_view text);
SynthSpec load_synth_spec(const std::filesystem::path& path);
/// Throws InvalidSpec unless volatilities are >= 0, rates lie in [0, 1] and the correlation
/// target is symmetric with unit diagonal and positive semidefinite.
void validate(const SynthSpec& spec);

struct SynthIndustry {
  std::string sic;
  bool tech = false;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
};

struct SynthFirm {
  std::string firm_id;
  std::size_t industry = 0;
  Exchange exchange = Exchange::NYSE;
  std::array<double, kSynthLoadings> loadings{};
};

struct SynthData {
  SynthSpec spec;
  std::vector<SynthIndustry> industries;
  std::vector<SynthFirm> firms;
  std::vector<FirmYearRecord> fundamentals;
  std::vector<MonthlyReturnRecord> returns;
  std::vector<FactorObservation> factors;
};

/// Fundamentals cover fiscal years window.start.year - 2 .. window.end.year.
/// Returns are rf + sum_k beta_k * F_k + idio_vol * z.
SynthData generate(const SynthSpec& spec);

/// Ground truth as CSV rows section,key,field,value: planted firm loadings, industry SG&A
/// coefficients, factor parameters and expected MTB quintile membership per holding year.
std::string oracle_report(const SynthData& data);

/// Writes fundamentals.csv, returns.csv, factors.csv and oracle.csv into `dir`.
void write_synth(const SynthData& data, const std::filesystem::path& dir);

}  // namespace intan
