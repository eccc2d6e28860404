#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "intan/factor_builder.hpp"
#include "intan/fundamentals.hpp"
#include "intan/panel.hpp"
#include "intan/synth.hpp"

namespace fixture {

/// A plausible firm-year; callers override the fields a test cares about.
intan::FirmYearRecord firm_year(const std::string& id, int fiscal_year, const std::string& sic = "2011",
                                intan::Exchange exchange = intan::Exchange::NYSE);

/// Factor rows with every factor 0 and a constant risk-free rate.
std::vector<intan::FactorObservation> flat_factors(const intan::MonthWindow& window, double rf = 0.0);

intan::DerivedFirmYear derived(const std::string& id, int fiscal_year, double intan, double june_cap,
                               intan::Exchange exchange = intan::Exchange::NYSE);

/// Sorts records by (fiscal_year, firm_id) as DerivedSet requires.
intan::DerivedSet derived_set(std::vector<intan::DerivedFirmYear> records);

intan::Panel panel_of(const intan::SynthData& data);

/// Fresh empty directory under the system temp directory.
std::filesystem::path temp_dir(const std::string& name);

}  // namespace fixture

namespace fixture {

struct GoldenIntanft {
  intan::IntanftResult result;
  std::vector<std::pair<std::string, std::string>> expected;  // month, canonical value
};

/// Runs the engine on the hand-computed 8-firm INTANFT fixture in `dir`.
GoldenIntanft golden_intanft(const std::filesystem::path& dir);

}  // namespace fixture
