#include <CLI11.hpp>
#include <iostream>

#include "intan/study.hpp"
#include "intan/synth.hpp"

namespace {

int report(const intan::Error& e) {
  std::cerr << "error: " << e.what() << '\n';
  return intan::exit_code_for(e.code());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intangible-investment factor study"};
  app.require_subcommand(1);

  std::string config_path;
  std::string tables;
  std::string out_dir;
  bool strict = false;
  auto* run = app.add_subcommand("run", "Build the selected tables");
  run->add_option("--config", config_path, "Study config file")->required();
  run->add_option("--tables", tables, "Comma-separated table ids, e.g. T1,T4,T5");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--strict", strict, "Fail on the first invalid input row");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check config, inputs and windows without building tables");
  validate->add_option("--config", validate_path, "Study config file")->required();

  std::string spec_path;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic panel with ground truth");
  synth->add_option("--spec", spec_path, "Synth spec file")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      auto config = intan::load_study_config(config_path);
      if (!tables.empty()) config.tables = intan::parse_table_list(tables);
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (strict) config.strict = true;
      const auto summary = intan::run_all(config);
      for (const auto& t : summary.tables) {
        if (t.ok) {
          std::cout << t.id << " ok\n";
        } else {
          std::cout << t.id << " error " << (t.error ? intan::to_string(*t.error) : "?") << ": " << t.message << '\n';
        }
      }
      std::cout << "manifest " << summary.manifest.string() << '\n';
      return summary.exit_code();
    }
    if (*validate) {
      const auto config = intan::load_study_config(validate_path);
      auto data = intan::load_inputs(config);
      const auto n_fund = data.fundamentals.records.size();
      const auto n_ret = data.returns.records.size();
      const auto n_quarantined = data.fundamentals.quarantined.size() + data.returns.quarantined.size();
      intan::BuildOptions build;
      build.tolerate_orphans = config.tolerate_orphans;
      auto panel = intan::build_panel(std::move(data.fundamentals.records), std::move(data.returns.records),
                                      std::move(data.factors), intan::study_window(config), build);
      std::cout << "panel window " << panel.window().str() << " (" << panel.window().size() << " months)\n"
                << "fundamentals " << n_fund << " rows, returns " << n_ret << " rows, quarantined " << n_quarantined
                << ", firms " << panel.firms().size() << '\n';
      if (config.early_window) {
        std::cout << "early window " << config.early_window->str() << " (" << config.early_window->size()
                  << " months)\n";
      }
      std::cout << "late window " << config.late_window.str() << " (" << config.late_window.size() << " months)\n";
      return 0;
    }
    if (*synth) {
      const auto spec = intan::load_synth_spec(spec_path);
      intan::write_synth(intan::generate(spec), synth_out);
      std::cout << "wrote " << synth_out << '\n';
      return 0;
    }
  } catch (const intan::Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
