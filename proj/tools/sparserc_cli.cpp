#include "sparserc/bench.hpp"
#include "sparserc/rng.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

using namespace sparserc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> scale;
  std::string out;
  std::optional<int> jobs;
  std::optional<int> timeout_s;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* config = cmd->add_option("--config", c.config, "TOML experiment config");
  if (config_required) config->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Base seed");
  cmd->add_option("--scale", c.scale, "Node-count multiplier")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--timeout-s", c.timeout_s, "Per-run wall-clock limit in seconds")->check(CLI::PositiveNumber);
}

ExperimentSpec load_spec(const Common& c) {
  ExperimentSpec spec;
  if (!c.config.empty()) {
    spec = load_experiment_spec(c.config, c.scale);
  } else if (c.scale) {
    apply_scale(spec, *c.scale);
  }
  if (c.seed) spec.base_seed = *c.seed;
  if (!c.out.empty()) spec.output_dir = c.out;
  if (c.jobs) spec.jobs = *c.jobs;
  if (c.timeout_s) spec.timeout_s = *c.timeout_s;
  spec.validate();
  return spec;
}

void print_metrics(const MetricsReport& m) {
  auto opt = [](const auto& v) { return v ? format_double(static_cast<double>(*v)) : std::string("n/a"); };
  std::cout << "shd " << m.shd << '\n'
            << "sid " << opt(m.sid) << '\n'
            << "tpr " << opt(m.tpr) << '\n'
            << "fpr " << format_double(m.fpr) << '\n'
            << "total_edges " << m.total_edges << '\n'
            << "nmse " << opt(m.nmse_weights) << '\n'
            << "avg_l1 " << opt(m.avg_l1) << '\n'
            << "max_l1 " << opt(m.max_l1) << '\n'
            << "avg_l2 " << opt(m.avg_l2) << '\n'
            << "varsortability " << opt(m.varsortability) << '\n';
}

int cmd_generate(const Common& c) {
  ExperimentSpec spec = load_spec(c);
  GraphGenConfig graph = spec.graph;
  DataGenConfig data = spec.data;
  graph.seed = derive_seed(spec.base_seed, 1);
  data.seed = derive_seed(spec.base_seed, 2);
  const WeightedDag truth = generate_random_dag(graph);
  const RootCauses rc = sample_root_causes(truth, data);
  Dataset ds = synthesize(truth, rc, data.standardize);
  ds.gen_config = data;
  const std::filesystem::path out = c.out.empty() ? std::filesystem::path("dataset") : std::filesystem::path(c.out);
  write_dataset(out, ds, graph);
  std::cout << "wrote " << ds.x.rows() << "x" << ds.x.cols() << " dataset with " << truth.edge_count()
            << " edges to " << out.string() << '\n';
  return kExitOk;
}

int cmd_solve(const Common& c, const std::string& data_csv, const std::string& truth_csv) {
  ExperimentSpec spec = load_spec(c);
  SolverConfig solver = spec.solver;
  solver.seed = spec.base_seed;
  const std::filesystem::path out = c.out.empty() ? std::filesystem::path("solve_out") : std::filesystem::path(c.out);

  SolveControl control;
  control.deadline = std::chrono::steady_clock::now() +
                     std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                         std::chrono::duration<double>(spec.timeout_s));
  std::optional<std::filesystem::path> truth;
  if (!truth_csv.empty()) truth = truth_csv;
  const ExternalReport report = run_external(data_csv, truth, solver, out, control);
  std::cout << "edges " << report.solve.weights.edge_count() << '\n'
            << "repaired_edges " << report.solve.repaired_edges << '\n'
            << "runtime_s " << format_double(report.solve.runtime_seconds) << '\n';
  if (report.metrics) print_metrics(*report.metrics);
  return kExitOk;
}

int cmd_bench(const Common& c) {
  const ExperimentSpec spec = load_spec(c);
  const ExperimentOutcome outcome = run_experiment(spec);
  for (const auto& row : outcome.aggregates) {
    if (row.metric != "shd" && row.metric != "sid" && row.metric != "tpr" && row.metric != "nmse") continue;
    if (row.sweep_value) std::cout << spec.sweep->parameter << "=" << format_double(*row.sweep_value) << ' ';
    std::cout << row.metric << ' '
              << (row.count ? format_double(row.mean) + " +- " + format_double(row.std) : std::string("n/a"))
              << " (n=" << row.count << ")\n";
  }
  std::cout << "report " << outcome.report_dir.string() << '\n';
  if (outcome.failed > 0) {
    std::cerr << outcome.failed << " of " << outcome.records.size() << " repetitions failed\n";
    return kExitFailed;
  }
  return kExitOk;
}

int cmd_oracle(const Common& c, const std::string& data_csv) {
  const Matrix x = read_matrix_csv(data_csv);
  L0Config cfg;
  cfg.seed = c.seed.value_or(0);
  const L0Result result = solve_l0(x, cfg);
  const std::filesystem::path out = c.out.empty() ? std::filesystem::path("oracle_out") : std::filesystem::path(c.out);
  write_l0_result(out, result);
  std::cout << "best_l0 " << result.best_l0 << '\n'
            << "dags " << result.num_dags_enumerated << '\n'
            << "ties " << result.ties.size() << '\n'
            << "edges";
  for (const auto& [i, j] : result.best_support) std::cout << ' ' << i << "->" << j;
  std::cout << '\n';
  for (const auto& w : result.warnings) std::cerr << w << '\n';
  return kExitOk;
}

int cmd_metrics(const std::string& est_csv, const std::string& truth_csv, const std::string& data_csv,
                const std::string& out) {
  const Matrix est = read_matrix_csv(est_csv);
  const Matrix truth = read_matrix_csv(truth_csv);
  std::optional<Matrix> data;
  if (!data_csv.empty()) data = read_matrix_csv(data_csv);
  const MetricsReport m = compare_graphs(est, truth, data ? &*data : nullptr);
  print_metrics(m);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream f(std::filesystem::path(out) / "metrics.csv");
    f << join_csv(metrics_columns()) << '\n' << join_csv(to_csv_fields(m)) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse root-cause DAG learning and benchmarks"};
  app.require_subcommand(1);

  Common gen_opts, solve_opts, bench_opts, oracle_opts, metrics_opts;
  std::string data_csv, truth_csv, est_csv;

  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
  add_common(gen, gen_opts, false);

  auto* slv = app.add_subcommand("solve", "Learn a DAG from a data CSV");
  add_common(slv, solve_opts, false);
  slv->add_option("--data", data_csv, "n x d data CSV")->required()->check(CLI::ExistingFile);
  slv->add_option("--truth", truth_csv, "d x d truth adjacency CSV")->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "Run an experiment config");
  add_common(bench, bench_opts, true);

  auto* oracle = app.add_subcommand("oracle", "Exact L0 search over all DAGs (d <= 5)");
  add_common(oracle, oracle_opts, false);
  oracle->add_option("--data", data_csv, "n x d data CSV")->required()->check(CLI::ExistingFile);

  auto* met = app.add_subcommand("metrics", "Compare an estimated adjacency with the truth");
  add_common(met, metrics_opts, false);
  met->add_option("--est", est_csv, "Estimated adjacency CSV")->required()->check(CLI::ExistingFile);
  met->add_option("--truth", truth_csv, "Truth adjacency CSV")->required()->check(CLI::ExistingFile);
  met->add_option("--data", data_csv, "Data CSV for varsortability")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(gen_opts);
    if (*slv) return cmd_solve(solve_opts, data_csv, truth_csv);
    if (*bench) return cmd_bench(bench_opts);
    if (*oracle) return cmd_oracle(oracle_opts, data_csv);
    if (*met) return cmd_metrics(est_csv, truth_csv, data_csv, metrics_opts.out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::InvalidConfig:
      case ErrorKind::ParseError:
      case ErrorKind::IoError:
      case ErrorKind::ShapeMismatch:
        return kExitConfig;
      default:
        return kExitFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitOk;
}
