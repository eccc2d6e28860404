#include "intan/synth.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "intan/csv.hpp"
#include "intan/error.hpp"
#include "intan/keyvalue.hpp"
#include "intan/rng.hpp"

namespace intan {

namespace {

constexpr std::array<const char*, kSynthFactors> kFactorLabels = {"MKTRF", "SMB", "HML", "RMW",
                                                                  "CMA",   "UMD", "RF"};

template <std::size_t N>
void assign_list(std::array<double, N>& dst, std::string_view value, std::string_view key) {
  const auto v = parse_number_list(value, key, ErrorCode::InvalidSpec);
  if (v.size() != N) {
    throw Error(ErrorCode::InvalidSpec, std::string(key) + ": expected " + std::to_string(N) + " values, got " +
                                            std::to_string(v.size()));
  }
  std::copy(v.begin(), v.end(), dst.begin());
}

double number(std::string_view value, std::string_view key) {
  auto v = csv::parse_double(value);
  if (!v) throw Error(ErrorCode::InvalidSpec, std::string(key) + ": '" + std::string(value) + "' is not a number");
  return *v;
}

std::size_t count(std::string_view value, std::string_view key) {
  auto v = csv::parse_int(value);
  if (!v || *v < 0) throw Error(ErrorCode::InvalidSpec, std::string(key) + ": expected a nonnegative integer");
  return static_cast<std::size_t>(*v);
}

bool flag(std::string_view value, std::string_view key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::InvalidSpec, std::string(key) + ": expected true or false");
}

bool is_tech_prefix(int p) { return p == 283 || p == 357 || p == 366 || p / 10 == 38 || p / 10 == 48 || p == 737; }

std::vector<std::string> tech_codes() {
  std::vector<std::string> out{"2830", "3570", "3660"};
  for (int p = 380; p <= 389; ++p) out.push_back(std::to_string(p) + "0");
  for (int p = 480; p <= 489; ++p) out.push_back(std::to_string(p) + "0");
  out.emplace_back("7370");
  return out;
}

std::vector<std::string> non_tech_codes() {
  std::vector<std::string> out;
  for (int p = 100; p <= 999; ++p) {
    if (!is_tech_prefix(p)) out.push_back(std::to_string(p) + "0");
  }
  return out;
}

Eigen::MatrixXd correlation(const SynthSpec& spec) {
  constexpr auto n = static_cast<Eigen::Index>(kSynthFactors);
  if (spec.factor_corr.empty()) return Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = spec.factor_corr[i * n + j];
  }
  return c;
}

// Returns L with L * L^T equal to the correlation target.
Eigen::MatrixXd correlation_root(const SynthSpec& spec) {
  const auto c = correlation(spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace

SynthSpec parse_synth_spec(std::string_view text) {
  SynthSpec spec;
  std::map<std::string, std::function<void(const std::string&, const std::string&)>, std::less<>> setters{
      {"n_firms", [&](auto& v, auto& k) { spec.n_firms = count(v, k); }},
      {"window",
       [&](auto& v, auto&) {
         try {
           spec.window = MonthWindow::parse(v);
         } catch (const Error& e) {
           throw Error(ErrorCode::InvalidSpec, std::string("window: ") + e.what());
         }
       }},
      {"seed",
       [&](auto& v, auto& k) {
         auto s = csv::parse_int(v);
         if (!s || *s < 0) throw Error(ErrorCode::InvalidSpec, k + ": expected a nonnegative integer");
         spec.seed = static_cast<std::uint64_t>(*s);
       }},
      {"factor_mean", [&](auto& v, auto& k) { assign_list(spec.factor_mean, v, k); }},
      {"factor_vol", [&](auto& v, auto& k) { assign_list(spec.factor_vol, v, k); }},
      {"factor_corr", [&](auto& v, auto& k) { spec.factor_corr = parse_number_list(v, k, ErrorCode::InvalidSpec); }},
      {"loading_mean", [&](auto& v, auto& k) { assign_list(spec.loading_mean, v, k); }},
      {"loading_sd", [&](auto& v, auto& k) { assign_list(spec.loading_sd, v, k); }},
      {"idio_vol", [&](auto& v, auto& k) { spec.idio_vol = number(v, k); }},
      {"n_industries", [&](auto& v, auto& k) { spec.n_industries = count(v, k); }},
      {"tech_share", [&](auto& v, auto& k) { spec.tech_share = number(v, k); }},
      {"sga_alpha", [&](auto& v, auto& k) { spec.sga_alpha = number(v, k); }},
      {"sga_beta", [&](auto& v, auto& k) { spec.sga_beta = number(v, k); }},
      {"sga_gamma", [&](auto& v, auto& k) { spec.sga_gamma = number(v, k); }},
      {"sga_lambda", [&](auto& v, auto& k) { spec.sga_lambda = number(v, k); }},
      {"sga_coef_sd", [&](auto& v, auto& k) { spec.sga_coef_sd = number(v, k); }},
      {"sga_noise", [&](auto& v, auto& k) { spec.sga_noise = number(v, k); }},
      {"rd_intensity_tech", [&](auto& v, auto& k) { spec.rd_intensity_tech = number(v, k); }},
      {"rd_intensity_nontech", [&](auto& v, auto& k) { spec.rd_intensity_nontech = number(v, k); }},
      {"rd_sd", [&](auto& v, auto& k) { spec.rd_sd = number(v, k); }},
      {"nyse_share", [&](auto& v, auto& k) { spec.nyse_share = number(v, k); }},
      {"amex_share", [&](auto& v, auto& k) { spec.amex_share = number(v, k); }},
      {"ltg", [&](auto& v, auto& k) { spec.ltg = flag(v, k); }},
      {"missing_return_rate", [&](auto& v, auto& k) { spec.missing_return_rate = number(v, k); }},
      {"missing_field_rate", [&](auto& v, auto& k) { spec.missing_field_rate = number(v, k); }},
  };
  for (const auto& kv : parse_key_values(text, ErrorCode::InvalidSpec)) {
    auto it = setters.find(kv.key);
    if (it == setters.end()) {
      throw Error(ErrorCode::InvalidSpec, "line " + std::to_string(kv.line) + ": unknown key " + kv.key);
    }
    it->second(kv.value, kv.key);
  }
  validate(spec);
  return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) { return parse_synth_spec(csv::read_file(path)); }

void validate(const SynthSpec& spec) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
  if (spec.n_firms == 0) fail("n_firms must be positive");
  if (spec.n_industries == 0) fail("n_industries must be positive");
  if (!spec.window.start.valid() || !spec.window.end.valid() || spec.window.size() == 0) fail("window is empty");
  auto nonneg = [&](double v, const std::string& name) {
    if (!(v >= 0)) fail(name + " must be >= 0");
  };
  for (std::size_t k = 0; k < kSynthFactors; ++k) nonneg(spec.factor_vol[k], "factor_vol");
  for (std::size_t k = 0; k < kSynthLoadings; ++k) nonneg(spec.loading_sd[k], "loading_sd");
  nonneg(spec.idio_vol, "idio_vol");
  nonneg(spec.sga_coef_sd, "sga_coef_sd");
  nonneg(spec.sga_noise, "sga_noise");
  nonneg(spec.rd_sd, "rd_sd");
  auto unit = [&](double v, const std::string& name) {
    if (!(v >= 0 && v <= 1)) fail(name + " must lie in [0, 1]");
  };
  unit(spec.tech_share, "tech_share");
  unit(spec.nyse_share, "nyse_share");
  unit(spec.amex_share, "amex_share");
  unit(spec.nyse_share + spec.amex_share, "nyse_share + amex_share");
  unit(spec.missing_return_rate, "missing_return_rate");
  unit(spec.missing_field_rate, "missing_field_rate");

  if (!spec.factor_corr.empty()) {
    if (spec.factor_corr.size() != kSynthFactors * kSynthFactors) fail("factor_corr must have 49 entries");
    const auto c = correlation(spec);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      if (c(i, i) != 1.0) fail("factor_corr diagonal must be 1");
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        if (c(i, j) != c(j, i)) fail("factor_corr must be symmetric");
        if (!(std::abs(c(i, j)) <= 1.0)) fail("factor_corr entries must lie in [-1, 1]");
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    if (eig.eigenvalues().minCoeff() < -1e-10) fail("factor_corr is not positive semidefinite");
  }
  const auto n_tech = static_cast<std::size_t>(std::lround(spec.tech_share * static_cast<double>(spec.n_industries)));
  if (n_tech > tech_codes().size() || spec.n_industries - n_tech > non_tech_codes().size()) {
    fail("too many industries for distinct 3-digit SIC codes");
  }
}

SynthData generate(const SynthSpec& spec) {
  validate(spec);
  SynthData data;
  data.spec = spec;
  Rng rng(spec.seed);

  const auto n_tech = static_cast<std::size_t>(std::lround(spec.tech_share * static_cast<double>(spec.n_industries)));
  const auto tech = tech_codes();
  const auto other = non_tech_codes();
  for (std::size_t j = 0; j < spec.n_industries; ++j) {
    SynthIndustry ind;
    ind.tech = j < n_tech;
    ind.sic = ind.tech ? tech[j] : other[j - n_tech];
    ind.alpha = rng.normal(spec.sga_alpha, spec.sga_coef_sd);
    ind.beta = rng.normal(spec.sga_beta, spec.sga_coef_sd);
    ind.gamma = rng.normal(spec.sga_gamma, spec.sga_coef_sd);
    ind.lambda = rng.normal(spec.sga_lambda, spec.sga_coef_sd);
    data.industries.push_back(ind);
  }

  const auto root = correlation_root(spec);
  for (const auto& m : spec.window.months()) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(kSynthFactors));
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
    const Eigen::VectorXd x = root * z;
    std::array<double, kSynthFactors> f{};
    for (std::size_t k = 0; k < kSynthFactors; ++k) {
      f[k] = spec.factor_mean[k] + spec.factor_vol[k] * x(static_cast<Eigen::Index>(k));
    }
    data.factors.push_back({m, f[0], f[1], f[2], f[3], f[4], f[5], f[6]});
  }

  const int width = static_cast<int>(std::to_string(spec.n_firms).size());
  for (std::size_t i = 0; i < spec.n_firms; ++i) {
    SynthFirm firm;
    std::string num = std::to_string(i + 1);
    firm.firm_id = "F" + std::string(width - num.size(), '0') + num;
    firm.industry = i % spec.n_industries;
    const double u = rng.uniform();
    firm.exchange = u < spec.nyse_share                     ? Exchange::NYSE
                    : u < spec.nyse_share + spec.amex_share ? Exchange::AMEX
                                                            : Exchange::NASDAQ;
    for (std::size_t k = 0; k < kSynthLoadings; ++k) firm.loadings[k] = rng.normal(spec.loading_mean[k], spec.loading_sd[k]);
    data.firms.push_back(firm);
  }

  const int first_fy = spec.window.start.year - 2;
  const int last_fy = spec.window.end.year;
  for (const auto& firm : data.firms) {
    const auto& ind = data.industries[firm.industry];
    double assets_prior = std::exp(rng.normal(5.0, 1.0));
    const double mtb_effect = rng.normal(0.5, 0.6);
    double prior_revenue = std::nan("");
    for (int fy = first_fy; fy <= last_fy; ++fy) {
      FirmYearRecord r;
      r.firm_id = firm.firm_id;
      r.fiscal_year = fy;
      r.sic = ind.sic;
      r.exchange = firm.exchange;
      r.total_assets_prior = assets_prior;
      r.total_assets = assets_prior * std::exp(rng.normal(0.05, 0.1));
      const double avg = 0.5 * (r.total_assets + r.total_assets_prior);
      const double scaled_revenue = rng.uniform(0.3, 1.5);
      r.revenue = scaled_revenue * avg;
      r.net_income = rng.normal(0.03, 0.08) * avg;
      const bool decrease = !std::isnan(prior_revenue) && r.revenue < prior_revenue;
      const bool loss = r.net_income < 0;
      const double scaled_sga = ind.alpha + ind.beta * scaled_revenue + ind.gamma * (decrease ? 1.0 : 0.0) +
                                ind.lambda * (loss ? 1.0 : 0.0) + spec.sga_noise * rng.normal();
      r.sga_expense = scaled_sga * avg;
      const double rd_mean = ind.tech ? spec.rd_intensity_tech : spec.rd_intensity_nontech;
      r.rd_expense = std::max(0.0, rng.normal(rd_mean, spec.rd_sd)) * avg;
      r.cogs = r.revenue * rng.uniform(0.4, 0.7);
      r.interest_expense = 0.01 * avg;
      r.book_equity = avg * rng.uniform(0.2, 0.6);
      r.market_equity = r.book_equity * std::exp(mtb_effect + rng.normal(0.0, 0.15));
      r.market_equity_june = r.market_equity * std::exp(rng.normal(0.0, 0.1));
      const double ltg = rng.normal(15.0, 5.0);
      if (spec.ltg) r.ltg = ltg;
      if (rng.uniform() < spec.missing_field_rate) r.book_equity = std::nan("");
      data.fundamentals.push_back(r);
      prior_revenue = r.revenue;
      assets_prior = r.total_assets;
    }
  }

  for (const auto& firm : data.firms) {
    const auto& b = firm.loadings;
    for (const auto& f : data.factors) {
      const bool missing = rng.uniform() < spec.missing_return_rate;
      const double z = rng.normal();
      if (missing) continue;
      const double systematic = b[0] * f.mktrf + b[1] * f.smb + b[2] * f.hml + b[3] * f.rmw + b[4] * f.cma + b[5] * f.umd;
      data.returns.push_back({firm.firm_id, f.month, f.rf + systematic + spec.idio_vol * z});
    }
  }
  return data;
}

std::string oracle_report(const SynthData& data) {
  const auto& spec = data.spec;
  std::ostringstream out;
  out << "section,key,field,value\n";
  auto row = [&](std::string_view section, std::string_view key, std::string_view field, const std::string& value) {
    out << section << ',' << key << ',' << field << ',' << value << '\n';
  };
  row("param", "generator", "", Rng::kName);
  row("param", "seed", "", std::to_string(spec.seed));
  row("param", "n_firms", "", std::to_string(spec.n_firms));
  row("param", "window", "", spec.window.str());
  row("param", "idio_vol", "", csv::format_double(spec.idio_vol));
  row("param", "sga_noise", "", csv::format_double(spec.sga_noise));
  for (std::size_t k = 0; k < kSynthFactors; ++k) {
    row("factor", kFactorLabels[k], "mean", csv::format_double(spec.factor_mean[k]));
    row("factor", kFactorLabels[k], "vol", csv::format_double(spec.factor_vol[k]));
  }
  for (const auto& ind : data.industries) {
    row("industry", ind.sic, "tech", ind.tech ? "1" : "0");
    row("industry", ind.sic, "alpha", csv::format_double(ind.alpha));
    row("industry", ind.sic, "beta", csv::format_double(ind.beta));
    row("industry", ind.sic, "gamma", csv::format_double(ind.gamma));
    row("industry", ind.sic, "lambda", csv::format_double(ind.lambda));
  }
  for (const auto& firm : data.firms) {
    row("firm", firm.firm_id, "industry", data.industries[firm.industry].sic);
    row("firm", firm.firm_id, "exchange", std::string(to_string(firm.exchange)));
    for (std::size_t k = 0; k < kSynthLoadings; ++k) {
      row("loading", firm.firm_id, kFactorLabels[k], csv::format_double(firm.loadings[k]));
    }
  }

  // Expected MTB quintiles: rank by (MTB, firm_id) among firm-years with positive book equity.
  std::map<int, std::vector<std::pair<double, std::string>>> by_year;
  for (const auto& r : data.fundamentals) {
    if (r.book_equity > 0) by_year[r.fiscal_year + 1].emplace_back(r.market_equity / r.book_equity, r.firm_id);
  }
  for (int year = spec.window.start.year; year <= spec.window.end.year; ++year) {
    auto& firms = by_year[year];
    std::sort(firms.begin(), firms.end());
    const std::size_t n = firms.size();
    std::map<std::string, int> quintile;
    std::size_t taken = 0;
    for (int q = 0; q < 5; ++q) {
      const std::size_t size = n / 5 + (static_cast<std::size_t>(q) < n % 5 ? 1 : 0);
      for (std::size_t i = taken; i < taken + size; ++i) quintile[firms[i].second] = q + 1;
      taken += size;
    }
    for (const auto& [id, q] : quintile) row("mtb_quintile", std::to_string(year), "MTB" + std::to_string(q), id);
  }
  return out.str();
}

void write_synth(const SynthData& data, const std::filesystem::path& dir) {
  csv::write_file(dir / "fundamentals.csv", write_fundamentals(data.fundamentals));
  csv::write_file(dir / "returns.csv", write_returns(data.returns));
  csv::write_file(dir / "factors.csv", write_factors(data.factors));
  csv::write_file(dir / "oracle.csv", oracle_report(data));
}

}  // namespace intan
