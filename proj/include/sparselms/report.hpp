#pragma once

// Experiment reports and their CSV / JSON / SVG renderings. The JSON
// layout is described in docs/report_schema.md.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparselms/config.hpp"
#include "sparselms/harness.hpp"

namespace sparselms {

inline constexpr int kReportSchemaVersion = 1;

struct AnalysisBlock {
  std::size_t iteration = 0;
  double sigma2_n = 0.0;
  double eta = 0.0;
  double xi_standard = 0.0;
  double alpha_prime = 0.0;
  double beta_prime = 0.0;
  double beta_bound = 0.0;
  double xi_rl1_predicted = 0.0;
  std::optional<double> rho_star;
  /// Steady-state mean of the emse metric per algorithm, when recorded.
  std::map<std::string, double> xi_empirical;

  bool operator==(const AnalysisBlock&) const = default;
};

struct CaseReport {
  std::string label;
  ConfigMap parameters;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::size_t completed_runs = 0;
  std::size_t diverged_runs = 0;
  std::size_t iterations = 0;
  double mean_noise_variance = 0.0;
  std::vector<std::string> algorithms;
  std::vector<std::string> metrics;
  /// Keyed "<algorithm>_<metric>".
  std::map<std::string, SeriesStats> series;
  std::map<std::string, SteadyStats> steady;
  std::vector<std::string> divergence_messages;
  std::optional<AnalysisBlock> analysis;

  const SeriesStats& at(std::string_view algorithm, std::string_view metric) const;
  const SteadyStats& steady_at(std::string_view algorithm, std::string_view metric) const;

  bool operator==(const CaseReport&) const = default;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool operator==(const ResultTable&) const = default;
};

struct Report {
  int schema_version = kReportSchemaVersion;
  std::string preset;
  std::string description;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::optional<double> wall_time_s;
  std::vector<CaseReport> cases;
  std::optional<ResultTable> table;

  bool operator==(const Report&) const = default;
};

std::string series_key(std::string_view algorithm, std::string_view metric);

/// Packs a Monte-Carlo result (plus the reweighted-l1 analysis, when
/// enabled) into a case report.
CaseReport make_case_report(std::string label, const ConfigMap& parameters,
                            const ResolvedExperiment& resolved, const MonteCarloResult& result);

/// Header `iteration,<algo>_<metric>,...` then one row per iteration, 17
/// significant digits.
std::string case_csv(const CaseReport& report);
std::string table_csv(const ResultTable& table);
void write_csv(const CaseReport& report, const std::string& path);
void write_table_csv(const ResultTable& table, const std::string& path);

std::string report_to_json(const Report& report);
Report report_from_json(std::string_view text);
void write_json(const Report& report, const std::string& path);
Report read_json(const std::string& path);

// SVG line charts.

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label;
  bool db_scale = false;
  int width = 800;
  int height = 500;
};

/// 10 log10(v).
double to_db(double value);

/// "Nice" tick positions (1, 2, 5 x 10^k steps) covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

/// Standalone SVG document: one polyline per series (a circle marker for
/// single-point series), legend, axes with tick labels. With db_scale the
/// y values are mapped through to_db; non-positive values are dropped.
std::string render_line_chart(std::span<const LineSeries> series, const ChartOptions& options);

/// Chart of `metric` for every algorithm of a case. Throws UsageError for
/// a metric the case does not carry.
std::string render_svg_string(const CaseReport& report, std::string_view metric, bool log_scale);
void render_svg(const CaseReport& report, std::string_view metric, bool log_scale,
                const std::string& path);

}  // namespace sparselms
