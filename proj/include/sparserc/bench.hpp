#pragma once

#include "sparserc/exact_l0.hpp"
#include "sparserc/graph.hpp"
#include "sparserc/io.hpp"
#include "sparserc/metrics.hpp"
#include "sparserc/sem.hpp"
#include "sparserc/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sparserc {

struct Sweep {
  /// Dotted path such as "data.n" or "graph.edges_per_vertex".
  std::string parameter;
  std::vector<double> values;
};

struct ExperimentSpec {
  std::string name = "experiment";
  GraphGenConfig graph;
  DataGenConfig data;
  SolverConfig solver;
  int repetitions = 5;
  std::optional<Sweep> sweep;
  bool run_l0_oracle = false;
  std::filesystem::path output_dir = "results";
  std::uint64_t base_seed = 0;
  /// Worker threads; 0 means one per available core.
  int jobs = 0;
  double timeout_s = 600.0;
  double frc_epsilon = 0.1;
  double frc_delta = 0.1;
  double c_support_frac = 0.1;

  void validate() const;
};

/// Parses the TOML experiment format; unknown keys are rejected. A given
/// `scale_override` replaces the file's `scale` key.
ExperimentSpec parse_experiment_spec(const std::string& toml_text, const std::string& source = "<string>",
                                     std::optional<int> scale_override = std::nullopt);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path,
                                    std::optional<int> scale_override = std::nullopt);

/// Multiplies the node count (and nothing else) by `scale`.
void apply_scale(ExperimentSpec& spec, int scale);

/// Sets one numeric field addressed by a dotted path.
void set_parameter(ExperimentSpec& spec, const std::string& path, double value);

/// Seed of repetition `rep`: mix64(base ^ mix64(rep)).
std::uint64_t repetition_seed(std::uint64_t base_seed, int rep);

struct RunRecord {
  MetricsReport metrics;
  std::string status = "ok";
  std::optional<double> sweep_value;
  std::optional<FrcAudit> frc;
  std::optional<L0Result> oracle;
  bool oracle_matches_truth = false;
  int repetition = 0;
};

/// Generates, solves and scores one repetition. Errors are captured in
/// `status` instead of being thrown.
RunRecord run_repetition(const ExperimentSpec& spec, int rep, std::optional<double> sweep_value);

struct AggregateRow {
  std::optional<double> sweep_value;
  std::string metric;
  long count;
  double mean;
  double std;  ///< population standard deviation
};

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records);

struct ExperimentOutcome {
  std::filesystem::path report_dir;
  std::vector<RunRecord> records;
  std::vector<AggregateRow> aggregates;
  int failed = 0;
};

/// Runs every (sweep value, repetition) pair on a worker pool and writes
/// runs.csv, frc_audit.csv, aggregate.csv, spec.txt, oracle.csv (when the
/// oracle ran) and plots/*.svg (when sweeping) into spec.output_dir.
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

const std::vector<std::string>& run_columns();
std::vector<std::string> run_row(const RunRecord& record);
RunRecord parse_run_row(const std::vector<std::string>& fields);

struct ExternalReport {
  SolveResult solve;
  std::optional<MetricsReport> metrics;
};

/// Solves a dataset read from CSV and optionally scores it against a truth
/// adjacency CSV. Outputs go to `out_dir`.
ExternalReport run_external(const std::filesystem::path& data_csv,
                            const std::optional<std::filesystem::path>& truth_csv,
                            const SolverConfig& solver, const std::filesystem::path& out_dir,
                            const SolveControl& control = {});

/// Structural and weight metrics of an estimate against a truth adjacency;
/// varsortability is filled in when data is supplied.
MetricsReport compare_graphs(const Matrix& est, const Matrix& truth, const Matrix* data = nullptr);

KeyValues to_key_values(const SolverConfig& cfg);
KeyValues to_key_values(const GraphGenConfig& cfg);
KeyValues to_key_values(const DataGenConfig& cfg);

/// adjacency_raw.csv, adjacency.csv, edges.txt, trace.csv and summary.txt.
void write_solve_result(const std::filesystem::path& dir, const SolveResult& result, const SolverConfig& cfg);

/// data.csv, truth.csv, truth_edges.txt, root_causes.csv and meta.txt.
void write_dataset(const std::filesystem::path& dir, const Dataset& ds, const GraphGenConfig& graph);

void write_l0_result(const std::filesystem::path& dir, const L0Result& result);

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std;
};

/// Minimal standalone SVG line chart with error bars.
void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const PlotSeries& series);

}  // namespace sparserc
