#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "intan/csv.hpp"
#include "intan/digest.hpp"
#include "intan/study.hpp"

namespace intan {

namespace {

std::string field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string fixed(double v, int precision) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  std::string s = buf;
  // Avoid "-0.000".
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string cell_text(const TableCell& c, const TablePanel& p) {
  if (std::isnan(c.value)) return "";
  std::string s = fixed(c.value, p.precision) + c.stars;
  if (c.stat) s += " (" + fixed(*c.stat, p.stat_precision) + ")";
  return s;
}

}  // namespace

std::string render_csv(const TableArtifact& table) {
  std::ostringstream out;
  out << "table_id,panel,row,column,value,stat,stars\n";
  for (const auto& p : table.panels) {
    for (const auto& row : p.rows) {
      for (std::size_t j = 0; j < row.cells.size(); ++j) {
        const auto& c = row.cells[j];
        out << table.id << ',' << field(p.name) << ',' << field(row.label) << ',' << field(p.columns.at(j)) << ','
            << csv::format_double(c.value) << ',' << (c.stat ? csv::format_double(*c.stat) : "") << ',' << c.stars
            << '\n';
      }
    }
  }
  return out.str();
}

std::string render_text(const TableArtifact& table) {
  std::ostringstream out;
  out << table.id << "  " << table.title << '\n';
  for (const auto& p : table.panels) {
    std::vector<std::vector<std::string>> grid;
    grid.push_back({""});
    for (const auto& c : p.columns) grid.back().push_back(c);
    for (const auto& row : p.rows) {
      grid.push_back({row.label});
      for (const auto& c : row.cells) grid.back().push_back(cell_text(c, p));
    }
    std::vector<std::size_t> width;
    for (const auto& line : grid) {
      if (width.size() < line.size()) width.resize(line.size(), 0);
      for (std::size_t j = 0; j < line.size(); ++j) width[j] = std::max(width[j], line[j].size());
    }
    out << '\n' << p.name << "  [" << p.stat_label << " in parentheses]\n";
    for (const auto& line : grid) {
      std::string text;
      for (std::size_t j = 0; j < line.size(); ++j) {
        if (j == 0) {
          text += line[j] + std::string(width[j] - line[j].size(), ' ');
        } else {
          text += "  " + std::string(width[j] - line[j].size(), ' ') + line[j];
        }
      }
      while (!text.empty() && text.back() == ' ') text.pop_back();
      out << text << '\n';
    }
  }
  return out.str();
}

std::string render_regressions(const std::vector<RegressionRecord>& records) {
  std::ostringstream out;
  out << "panel,portfolio,term,estimate,std_error,t_stat,p_value\n";
  for (const auto& r : records) {
    const auto prefix = field(r.panel) + ',' + field(r.portfolio) + ',';
    const auto& f = r.fit;
    for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
      out << prefix << f.names[i] << ',' << csv::format_double(f.coefficients[i]) << ','
          << csv::format_double(f.std_errors[i]) << ',' << csv::format_double(f.t_stats[i]) << ','
          << csv::format_double(f.p_values[i]) << '\n';
    }
    out << prefix << "r_squared," << csv::format_double(f.r_squared) << ",,,\n";
    out << prefix << "sigma," << csv::format_double(f.sigma) << ",,,\n";
    out << prefix << "n_obs," << f.n_obs << ",,,\n";
  }
  return out.str();
}

std::string render_residuals(const std::vector<RegressionRecord>& records) {
  std::ostringstream out;
  out << "panel,portfolio,month,response,fitted,residual\n";
  for (const auto& r : records) {
    for (std::size_t t = 0; t < r.months.size(); ++t) {
      out << field(r.panel) << ',' << field(r.portfolio) << ',' << r.months[t].str() << ','
          << csv::format_double(r.response[t]) << ',' << csv::format_double(r.fit.fitted[t]) << ','
          << csv::format_double(r.fit.residuals[t]) << '\n';
    }
  }
  return out.str();
}

std::string render_portfolios(const std::vector<PortfolioRecord>& records) {
  std::ostringstream out;
  out << "panel,portfolio,weighting,month,return,excess_return,n_firms\n";
  for (const auto& r : records) {
    const auto& s = r.series;
    for (std::size_t t = 0; t < s.months.size(); ++t) {
      out << field(r.panel) << ',' << field(s.label) << ',' << to_string(s.weighting) << ',' << s.months[t].str()
          << ',' << csv::format_double(s.returns[t]) << ',' << csv::format_double(s.excess_returns[t]) << ','
          << s.n_firms[t] << '\n';
    }
  }
  return out.str();
}

int exit_code_for(ErrorCode code) {
  switch (category(code)) {
    case ErrorCategory::Validation: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Numeric: return 4;
  }
  return 4;
}

int RunSummary::exit_code() const {
  for (const auto& t : tables) {
    if (!t.ok) return t.error ? exit_code_for(*t.error) : 4;
  }
  return 0;
}

LoadedData load_inputs(const StudyConfig& config) {
  LoadOptions opts;
  opts.strict = config.strict;
  LoadedData data;
  data.fundamentals = load_fundamentals(config.fundamentals, opts);
  data.returns = load_returns(config.returns, opts);
  data.factors = load_factors(config.factors, study_window(config), opts);
  return data;
}

RunSummary run_all(const StudyConfig& config) {
  auto data = load_inputs(config);
  const std::string quarantine =
      write_quarantine("fundamentals", data.fundamentals.quarantined) +
      [&] {
        auto s = write_quarantine("returns", data.returns.quarantined);
        return s.substr(s.find('\n') + 1);  // drop the repeated header
      }();
  nlohmann::json inputs;
  inputs["fundamentals"] = {{"path", config.fundamentals.generic_string()},
                            {"sha256", sha256_file(config.fundamentals)},
                            {"rows", data.fundamentals.records.size()},
                            {"quarantined", data.fundamentals.quarantined.size()}};
  inputs["returns"] = {{"path", config.returns.generic_string()},
                       {"sha256", sha256_file(config.returns)},
                       {"rows", data.returns.records.size()},
                       {"quarantined", data.returns.quarantined.size()}};
  inputs["factors"] = {{"path", config.factors.generic_string()},
                       {"sha256", sha256_file(config.factors)},
                       {"rows", data.factors.size()}};

  BuildOptions build;
  build.tolerate_orphans = config.tolerate_orphans;
  Study study(config, build_panel(std::move(data.fundamentals.records), std::move(data.returns.records),
                                  std::move(data.factors), study_window(config), build));

  const auto& dir = config.output_dir;
  std::filesystem::create_directories(dir);
  nlohmann::json artifacts = nlohmann::json::object();
  auto emit = [&](const std::string& name, const std::string& text) {
    csv::write_file(dir / name, text);
    artifacts[name] = sha256_hex(text);
    return name;
  };

  RunSummary summary;
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& id : config.tables) {
    TableStatus status{id, false, std::nullopt, ""};
    nlohmann::json entry;
    try {
      auto result = study.run_table(id);
      std::vector<std::string> files{emit(id + ".csv", render_csv(result.artifact)),
                                     emit(id + ".txt", render_text(result.artifact))};
      if (!result.regressions.empty()) {
        files.push_back(emit(id + "_regressions.csv", render_regressions(result.regressions)));
        files.push_back(emit(id + "_residuals.csv", render_residuals(result.regressions)));
      }
      if (!result.portfolios.empty()) files.push_back(emit(id + "_portfolios.csv", render_portfolios(result.portfolios)));
      status.ok = true;
      entry = {{"status", "ok"}, {"artifacts", files}};
    } catch (const Error& e) {
      status.error = e.code();
      status.message = e.what();
      entry = {{"status", "error"}, {"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
    tables[id] = entry;
    summary.tables.push_back(std::move(status));
  }

  std::ostringstream series;
  series << "series,month,value\n";
  for (const auto& [name, s] : study.series()) {
    for (std::size_t t = 0; t < s.months.size(); ++t) {
      series << name << ',' << s.months[t].str() << ',' << csv::format_double(s.values[t]) << '\n';
    }
  }
  emit("series.csv", series.str());
  std::string members = "formation_year,portfolio_label,firm_id\n";
  for (const auto& [key, ports] : study.memberships()) members += write_memberships(ports, key + ":");
  emit("memberships.csv", members);
  if (const auto fits = study.spanning_fits(); !fits.empty()) emit("spanning.csv", render_regressions(fits));
  emit("diagnostics.csv", write_diagnostics(study.derived().diagnostics));
  emit("quarantine.csv", quarantine);

  nlohmann::json manifest;
  manifest["config"] = config.canonical();
  manifest["config_sha256"] = sha256_hex(config.canonical());
  manifest["panel_window"] = study_window(config).str();
  manifest["inputs"] = inputs;
  manifest["tables"] = tables;
  manifest["artifacts"] = artifacts;
  summary.manifest = dir / "manifest.json";
  csv::write_file(summary.manifest, manifest.dump(2) + "\n");
  return summary;
}

}  // namespace intan
