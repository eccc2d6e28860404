#include <algorithm>
#include <functional>
#include <sstream>

#include "intan/csv.hpp"
#include "intan/keyvalue.hpp"
#include "intan/study.hpp"

namespace intan {

namespace {

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); }

bool parse_flag(std::string_view value, std::string_view key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  invalid(std::string(key) + ": expected true or false");
}

double parse_number(std::string_view value, std::string_view key) {
  auto v = csv::parse_double(value);
  if (!v) invalid(std::string(key) + ": '" + std::string(value) + "' is not a number");
  return *v;
}

Weighting weighting_value(std::string_view value, std::string_view key) {
  auto w = parse_weighting(value);
  if (!w) invalid(std::string(key) + ": expected equal or value");
  return *w;
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view value) {
  std::filesystem::path p{std::string(value)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

std::vector<std::string> factor_list(std::string_view value, std::string_view key) {
  static const std::vector<std::string> allowed = {"MKTRF", "SMB", "HML", "RMW", "CMA", "UMD"};
  std::vector<std::string> out;
  for (const auto& item : csv::split(value, ',')) {
    std::string name{csv::trim(item)};
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      invalid(std::string(key) + ": unknown factor '" + name + "'");
    }
    if (std::find(out.begin(), out.end(), name) != out.end()) invalid(std::string(key) + ": " + name + " repeated");
    out.push_back(name);
  }
  if (out.empty()) invalid(std::string(key) + ": at least one factor required");
  return out;
}

}  // namespace

std::vector<std::string> parse_table_list(std::string_view text) {
  std::vector<std::string> wanted;
  for (const auto& item : csv::split(text, ',')) {
    std::string id{csv::trim(item)};
    std::transform(id.begin(), id.end(), id.begin(), [](unsigned char c) { return std::toupper(c); });
    if (id.empty()) continue;
    if (std::find(kAllTables.begin(), kAllTables.end(), id) == kAllTables.end()) {
      invalid("unknown table '" + id + "'");
    }
    wanted.push_back(id);
  }
  if (wanted.empty()) invalid("no tables selected");
  std::vector<std::string> out;
  for (const auto& id : kAllTables) {
    if (std::find(wanted.begin(), wanted.end(), id) != wanted.end()) out.push_back(id);
  }
  return out;
}

StudyConfig parse_study_config(std::string_view text, const std::filesystem::path& base_dir) {
  StudyConfig c;
  auto window = [](std::string_view v, std::string_view key) {
    try {
      return MonthWindow::parse(v);
    } catch (const Error& e) {
      invalid(std::string(key) + ": " + e.what());
    }
  };
  using Setter = std::function<void(const std::string&, const std::string&)>;
  std::map<std::string, Setter, std::less<>> setters{
      {"fundamentals", [&](auto& v, auto&) { c.fundamentals = resolve(base_dir, v); }},
      {"returns", [&](auto& v, auto&) { c.returns = resolve(base_dir, v); }},
      {"factors", [&](auto& v, auto&) { c.factors = resolve(base_dir, v); }},
      {"early_window",
       [&](auto& v, auto& k) {
         if (v == "none") {
           c.early_window.reset();
         } else {
           c.early_window = window(v, k);
         }
       }},
      {"late_window", [&](auto& v, auto& k) { c.late_window = window(v, k); }},
      {"bubble_window", [&](auto& v, auto& k) { c.bubble_window = window(v, k); }},
      {"weighting", [&](auto& v, auto& k) { c.weighting = weighting_value(v, k); }},
      {"intanft_weighting", [&](auto& v, auto& k) { c.intanft.weighting = weighting_value(v, k); }},
      {"breakpoint_universe",
       [&](auto& v, auto& k) {
         if (v == "NYSE") {
           c.intanft.breakpoints.nyse_only = true;
         } else if (v == "ALL") {
           c.intanft.breakpoints.nyse_only = false;
         } else {
           invalid(k + ": expected NYSE or ALL");
         }
       }},
      {"intan_low_pct", [&](auto& v, auto& k) { c.intanft.breakpoints.intan_low_pct = parse_number(v, k); }},
      {"intan_high_pct", [&](auto& v, auto& k) { c.intanft.breakpoints.intan_high_pct = parse_number(v, k); }},
      {"sga_threshold",
       [&](auto& v, auto& k) {
         auto n = csv::parse_int(v);
         if (!n || *n < 5) invalid(k + ": expected an integer >= 5");
         c.sga_threshold = static_cast<std::size_t>(*n);
       }},
      {"winsorize_pct",
       [&](auto& v, auto& k) {
         c.winsorize_pct = parse_number(v, k);
         if (!(c.winsorize_pct >= 0 && c.winsorize_pct < 50)) invalid(k + ": expected a value in [0, 50)");
       }},
      {"spanning_factors", [&](auto& v, auto& k) { c.spanning_factors = factor_list(v, k); }},
      {"output_dir", [&](auto& v, auto&) { c.output_dir = resolve(base_dir, v); }},
      {"tables", [&](auto& v, auto&) { c.tables = parse_table_list(v); }},
      {"strict", [&](auto& v, auto& k) { c.strict = parse_flag(v, k); }},
      {"tolerate_orphans", [&](auto& v, auto& k) { c.tolerate_orphans = parse_flag(v, k); }},
  };
  for (const auto& kv : parse_key_values(text, ErrorCode::InvalidConfig)) {
    auto it = setters.find(kv.key);
    if (it == setters.end()) invalid("line " + std::to_string(kv.line) + ": unknown key " + kv.key);
    it->second(kv.value, kv.key);
  }

  for (auto [path, key] : {std::pair{&c.fundamentals, "fundamentals"}, std::pair{&c.returns, "returns"},
                           std::pair{&c.factors, "factors"}}) {
    if (path->empty()) invalid(std::string("missing required key ") + key);
  }
  const auto& bp = c.intanft.breakpoints;
  if (!(bp.intan_low_pct >= 0 && bp.intan_low_pct <= bp.intan_high_pct && bp.intan_high_pct <= 100)) {
    invalid("INTAN breakpoints must satisfy 0 <= intan_low_pct <= intan_high_pct <= 100");
  }
  if (c.early_window && c.early_window->overlaps(c.late_window)) {
    invalid("early_window " + c.early_window->str() + " overlaps late_window " + c.late_window.str());
  }
  if (!c.late_window.contains(c.bubble_window)) {
    invalid("bubble_window " + c.bubble_window.str() + " lies outside late_window " + c.late_window.str());
  }
  if (c.bubble_window == c.late_window) invalid("bubble_window must leave a non-empty complement");
  return c;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  return parse_study_config(csv::read_file(path), path.parent_path());
}

MonthWindow study_window(const StudyConfig& config) {
  MonthWindow w = config.late_window;
  if (config.early_window) {
    w.start = std::min(w.start, config.early_window->start);
    w.end = std::max(w.end, config.early_window->end);
  }
  return w;
}

std::string StudyConfig::canonical() const {
  std::ostringstream out;
  const auto& bp = intanft.breakpoints;
  out << "fundamentals = " << fundamentals.generic_string() << '\n'
      << "returns = " << returns.generic_string() << '\n'
      << "factors = " << factors.generic_string() << '\n'
      << "early_window = " << (early_window ? early_window->str() : "none") << '\n'
      << "late_window = " << late_window.str() << '\n'
      << "bubble_window = " << bubble_window.str() << '\n'
      << "weighting = " << to_string(weighting) << '\n'
      << "intanft_weighting = " << to_string(intanft.weighting) << '\n'
      << "breakpoint_universe = " << (bp.nyse_only ? "NYSE" : "ALL") << '\n'
      << "intan_low_pct = " << csv::format_double(bp.intan_low_pct) << '\n'
      << "intan_high_pct = " << csv::format_double(bp.intan_high_pct) << '\n'
      << "spanning_factors = ";
  for (std::size_t i = 0; i < spanning_factors.size(); ++i) out << (i ? "," : "") << spanning_factors[i];
  out << '\n'
      << "sga_threshold = " << sga_threshold << '\n'
      << "winsorize_pct = " << csv::format_double(winsorize_pct) << '\n'
      << "tables = ";
  for (std::size_t i = 0; i < tables.size(); ++i) out << (i ? "," : "") << tables[i];
  out << '\n'
      << "strict = " << (strict ? "true" : "false") << '\n'
      << "tolerate_orphans = " << (tolerate_orphans ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace intan
