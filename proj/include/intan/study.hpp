#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intan/calendar.hpp"
#include "intan/econometrics.hpp"
#include "intan/error.hpp"
#include "intan/factor_builder.hpp"
#include "intan/fundamentals.hpp"
#include "intan/orthogonalizer.hpp"
#include "intan/panel.hpp"

namespace intan {

inline const std::vector<std::string> kAllTables = {"T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8", "T9"};

struct StudyConfig {
  std::filesystem::path fundamentals;
  std::filesystem::path returns;
  std::filesystem::path factors;
  std::optional<MonthWindow> early_window = MonthWindow{{1963, 7}, {1992, 12}};
  MonthWindow late_window{{1993, 1}, {2022, 12}};
  // Table 9 splits the late window into this window and its complement.
  MonthWindow bubble_window{{1995, 1}, {2000, 12}};
  Weighting weighting = Weighting::Equal;  // test portfolios
  IntanftOptions intanft;
  // Regressors of the INTANFT spanning regression; any of MKTRF, SMB, HML, RMW, CMA, UMD.
  std::vector<std::string> spanning_factors = {"MKTRF", "SMB", "HML", "RMW", "CMA"};
  std::size_t sga_threshold = 15;
  double winsorize_pct = 0.0;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> tables = kAllTables;
  bool strict = false;
  bool tolerate_orphans = false;

  /// Fixed-order `key = value` rendering of every setting; hashed into the manifest.
  std::string canonical() const;
};

/// Parses a `key = value` config. Relative paths resolve against `base_dir`. Throws
/// InvalidConfig on unknown keys, malformed values, overlapping early/late windows or a
/// bubble window outside the late window.
StudyConfig parse_study_config(std::string_view text, const std::filesystem::path& base_dir = {});
StudyConfig load_study_config(const std::filesystem::path& path);

/// "T1,T4" style list; throws InvalidConfig on unknown ids. Result is in T1..T9 order.
std::vector<std::string> parse_table_list(std::string_view text);

/// Smallest window containing every configured window.
MonthWindow study_window(const StudyConfig& config);

struct TableCell {
  double value = std::numeric_limits<double>::quiet_NaN();  // NaN renders blank
  std::optional<double> stat;  // t-statistic, p-value or median; see the table's stat_label
  std::string stars;
};

struct TableRow {
  std::string label;
  std::vector<TableCell> cells;
};

struct TablePanel {
  std::string name;
  std::vector<std::string> columns;
  std::vector<TableRow> rows;
  std::string stat_label = "t";
  int precision = 3;
  int stat_precision = 2;
};

struct TableArtifact {
  std::string id;
  std::string title;
  std::vector<TablePanel> panels;
};

struct RegressionRecord {
  std::string panel;
  std::string portfolio;
  std::vector<CalendarMonth> months;
  std::vector<double> response;
  RegressionResult fit;
};

struct PortfolioRecord {
  std::string panel;
  PortfolioSeries series;
};

struct TableOutput {
  TableArtifact artifact;
  std::vector<RegressionRecord> regressions;
  std::vector<PortfolioRecord> portfolios;
};

struct LoadedData {
  LoadResult<FirmYearRecord> fundamentals;
  LoadResult<MonthlyReturnRecord> returns;
  std::vector<FactorObservation> factors;
};

/// Reads and validates the three inputs named by the config.
LoadedData load_inputs(const StudyConfig& config);

/// Tables over one read-only panel. Intermediate factors and sorts are computed on first use
/// and shared between tables.
class Study {
 public:
  Study(StudyConfig config, Panel panel);

  const StudyConfig& config() const noexcept { return config_; }
  const Panel& panel() const noexcept { return panel_; }
  const DerivedSet& derived();

  /// Throws Error (MissingVariable, WindowUncovered, ...) when the table cannot be built.
  TableOutput run_table(std::string_view id);

  /// INTANFT over a configured window.
  const IntanftResult& intanft(const MonthWindow& window);
  /// INTANFT regressed on MKTRF, SMB, HML, RMW and CMA over a configured window.
  const SpanningFit& intanft_org(const MonthWindow& window);
  const RmwDecomposition& rmw_decomposition();

  /// Every sort and INTANFT cell set built so far, keyed "<window>:<sort>".
  const std::map<std::string, std::vector<Portfolio>>& memberships() const noexcept { return memberships_; }
  /// Spanning regressions run so far: INTANFT keyed by window, plus "RMW[<late window>]" once the
  /// RMW decomposition exists.
  std::vector<RegressionRecord> spanning_fits() const;
  /// Every factor series built so far, keyed by "<name>[<window>]".
  const std::map<std::string, FactorSeries>& series() const noexcept { return series_; }

 private:
  struct Period {
    std::string name;  // panel title suffix
    MonthWindow window;
  };
  std::vector<Period> periods() const;
  const std::vector<Portfolio>& sort(const MonthWindow& window, Variable v, int n_bins);
  const DoubleSort& double_sort(const MonthWindow& window, Variable a, Variable b);
  const FactorSeries& factor(const MonthWindow& window, std::string_view name);

  TableOutput table1();
  TableOutput table2();
  TableOutput table3();
  TableOutput factor_model_table(std::string id, std::string title, bool orthogonal,
                                 const std::vector<std::pair<std::string, Variable>>& sorts);
  TableOutput table7();
  TableOutput table8();
  TableOutput table9();

  StudyConfig config_;
  Panel panel_;
  std::unique_ptr<DerivedSet> derived_;
  std::map<std::string, IntanftResult> intanft_;
  std::map<std::string, SpanningFit> intanft_org_;
  std::unique_ptr<RmwDecomposition> rmw_;
  std::map<std::string, std::vector<Portfolio>> memberships_;
  std::map<std::string, DoubleSort> double_sorts_;
  std::map<std::string, FactorSeries> series_;
  std::map<std::string, FactorSeries> factor_cache_;
};

/// Long-format CSV: table_id, panel, row, column, value, stat, stars.
std::string render_csv(const TableArtifact& table);
/// Aligned plain-text rendering with stats in parentheses.
std::string render_text(const TableArtifact& table);
std::string render_regressions(const std::vector<RegressionRecord>& records);
std::string render_residuals(const std::vector<RegressionRecord>& records);
std::string render_portfolios(const std::vector<PortfolioRecord>& records);

struct TableStatus {
  std::string id;
  bool ok = false;
  std::optional<ErrorCode> error;
  std::string message;
};

struct RunSummary {
  std::vector<TableStatus> tables;
  std::filesystem::path manifest;
  /// 0 when every table succeeded, otherwise the exit code of the first failure.
  int exit_code() const;
};

/// Loads inputs, runs the selected tables in T1..T9 order and writes every artifact plus
/// manifest.json into the output directory. Input or panel errors propagate; table errors
/// are recorded in the summary and manifest.
RunSummary run_all(const StudyConfig& config);

/// Exit code for an error category: 2 validation, 3 data, 4 numeric.
int exit_code_for(ErrorCode code);

}  // namespace intan
