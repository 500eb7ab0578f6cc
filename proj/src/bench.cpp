#include "sparserc/bench.hpp"
#include "sparserc/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace sparserc {

namespace {

enum SeedStream : std::uint64_t { kGraphStream = 1, kDataStream = 2, kSolverStream = 3, kOracleStream = 4 };

std::string status_for(const Error& err) {
  if (err.kind() == ErrorKind::Timeout) return "timeout";
  return std::string("error:") + to_string(err.kind());
}

EdgeSet support_edges(const Matrix& w) {
  EdgeSet edges;
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j)
      if (w(i, j) != 0.0) edges.emplace_back(i, j);
  return edges;
}

std::ofstream open_report(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  return out;
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : "na"; }

}  // namespace

std::uint64_t repetition_seed(std::uint64_t base_seed, int rep) {
  return derive_seed(base_seed, static_cast<std::uint64_t>(rep));
}

MetricsReport compare_graphs(const Matrix& est, const Matrix& truth, const Matrix* data) {
  require_same_shape(est, truth, "compare_graphs");
  require_square(truth, "compare_graphs");
  const BinaryMatrix est_bin = support(est);
  const BinaryMatrix truth_bin = support(truth);
  MetricsReport r;
  r.d = truth.rows();
  r.n = data ? data->rows() : 0;
  r.shd = shd(est_bin, truth_bin);
  r.sid = sid(est_bin, truth_bin);
  const EdgeRates rates = edge_rates(est_bin, truth_bin);
  r.tpr = rates.tpr;
  r.fpr = rates.fpr;
  r.total_edges = rates.total_edges;
  const long truth_edges = truth_bin.sum();
  if (truth_edges > 0) {
    const WeightLosses wl = weight_losses(est, truth, truth_edges);
    r.avg_l1 = wl.avg_l1;
    r.max_l1 = wl.max_l1;
    r.avg_l2 = wl.avg_l2;
    r.nmse_weights = wl.nmse;
    if (data && data->rows() >= 2) r.varsortability = varsortability(*data, truth_bin);
  }
  return r;
}

RunRecord run_repetition(const ExperimentSpec& spec, int rep, std::optional<double> sweep_value) {
  RunRecord record;
  record.repetition = rep;
  record.sweep_value = sweep_value;
  const std::uint64_t seed = repetition_seed(spec.base_seed, rep);
  record.metrics.seed = seed;
  record.metrics.d = spec.graph.d;
  record.metrics.n = spec.data.n;
  try {
    ExperimentSpec local = spec;
    if (sweep_value) set_parameter(local, spec.sweep->parameter, *sweep_value);
    local.graph.seed = derive_seed(seed, kGraphStream);
    local.data.seed = derive_seed(seed, kDataStream);
    local.solver.seed = derive_seed(seed, kSolverStream);
    record.metrics.d = local.graph.d;
    record.metrics.n = local.data.n;

    const WeightedDag truth = generate_random_dag(local.graph);
    const RootCauses rc = sample_root_causes(truth, local.data);
    const Dataset ds = synthesize(truth, rc, local.data.standardize);
    record.frc = audit_frc(rc, truth, local.frc_epsilon, local.frc_delta);

    SolveControl control;
    control.deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(local.timeout_s));
    const SolveResult result = solve(ds.x, local.solver, control);

    MetricsReport m = compare_graphs(result.weights.weights(), truth.weights(), &ds.x);
    m.seed = seed;
    m.runtime_seconds = result.runtime_seconds;
    if ((rc.c.array() != 0.0).any()) {
      const Matrix c_hat = recover_root_causes(ds.x, result.weights);
      const RootCauseScores scores = root_cause_metrics(c_hat, rc.c, local.c_support_frac);
      m.c_tpr = scores.c_tpr;
      m.c_fpr = scores.c_fpr;
      m.c_nmse = scores.c_nmse;
    }
    record.metrics = m;

    if (local.run_l0_oracle && local.graph.d <= kMaxOracleNodes) {
      L0Config oracle_cfg;
      oracle_cfg.seed = derive_seed(seed, kOracleStream);
      record.oracle = solve_l0(ds.x, oracle_cfg);
      record.oracle_matches_truth =
          record.oracle->ties.size() == 1 && record.oracle->best_support == support_edges(truth.weights());
    }
  } catch (const Error& err) {
    record.status = status_for(err);
  } catch (const std::exception& err) {
    record.status = "error:internal";
  }
  return record;
}

const std::vector<std::string>& run_columns() {
  static const std::vector<std::string> columns = [] {
    auto c = metrics_columns();
    c.push_back("status");
    c.push_back("sweep_value");
    return c;
  }();
  return columns;
}

std::vector<std::string> run_row(const RunRecord& record) {
  auto fields = to_csv_fields(record.metrics);
  fields.push_back(record.status);
  fields.push_back(opt_double(record.sweep_value));
  return fields;
}

RunRecord parse_run_row(const std::vector<std::string>& fields) {
  if (fields.size() != run_columns().size())
    throw Error(ErrorKind::ParseError, "run row has " + std::to_string(fields.size()) + " fields");
  RunRecord record;
  record.metrics = metrics_from_csv_fields(fields);
  record.status = fields[fields.size() - 2];
  if (fields.back() != "na") record.sweep_value = parse_double(fields.back());
  return record;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records) {
  using Getter = std::optional<double> (*)(const MetricsReport&);
  static const std::vector<std::pair<std::string, Getter>> metrics = {
      {"shd", [](const MetricsReport& m) -> std::optional<double> { return static_cast<double>(m.shd); }},
      {"sid", [](const MetricsReport& m) -> std::optional<double> {
         return m.sid ? std::optional<double>(static_cast<double>(*m.sid)) : std::nullopt;
       }},
      {"tpr", [](const MetricsReport& m) { return m.tpr; }},
      {"fpr", [](const MetricsReport& m) -> std::optional<double> { return m.fpr; }},
      {"total_edges", [](const MetricsReport& m) -> std::optional<double> { return static_cast<double>(m.total_edges); }},
      {"nmse", [](const MetricsReport& m) { return m.nmse_weights; }},
      {"avg_l1", [](const MetricsReport& m) { return m.avg_l1; }},
      {"max_l1", [](const MetricsReport& m) { return m.max_l1; }},
      {"avg_l2", [](const MetricsReport& m) { return m.avg_l2; }},
      {"c_tpr", [](const MetricsReport& m) { return m.c_tpr; }},
      {"c_fpr", [](const MetricsReport& m) { return m.c_fpr; }},
      {"c_nmse", [](const MetricsReport& m) { return m.c_nmse; }},
      {"varsortability", [](const MetricsReport& m) { return m.varsortability; }},
      {"runtime_s", [](const MetricsReport& m) -> std::optional<double> { return m.runtime_seconds; }},
  };

  // Groups keep first-appearance order of sweep values.
  std::vector<std::optional<double>> groups;
  for (const auto& r : records)
    if (std::find(groups.begin(), groups.end(), r.sweep_value) == groups.end()) groups.push_back(r.sweep_value);

  std::vector<AggregateRow> rows;
  for (const auto& group : groups) {
    for (const auto& [name, get] : metrics) {
      std::vector<double> values;
      for (const auto& r : records) {
        if (r.sweep_value != group || r.status != "ok") continue;
        if (auto v = get(r.metrics)) values.push_back(*v);
      }
      AggregateRow row{group, name, static_cast<long>(values.size()), std::nan(""), std::nan("")};
      if (!values.empty()) {
        double sum = 0.0;
        for (double v : values) sum += v;
        row.mean = sum / static_cast<double>(values.size());
        double sq = 0.0;
        for (double v : values) sq += (v - row.mean) * (v - row.mean);
        row.std = std::sqrt(sq / static_cast<double>(values.size()));
      }
      rows.push_back(row);
    }
  }
  return rows;
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::filesystem::create_directories(spec.output_dir);

  struct Task {
    int rep;
    std::optional<double> sweep_value;
  };
  std::vector<Task> tasks;
  if (spec.sweep) {
    for (double v : spec.sweep->values)
      for (int rep = 0; rep < spec.repetitions; ++rep) tasks.push_back({rep, v});
  } else {
    for (int rep = 0; rep < spec.repetitions; ++rep) tasks.push_back({rep, std::nullopt});
  }

  ExperimentOutcome outcome;
  outcome.report_dir = spec.output_dir;
  outcome.records.resize(tasks.size());

  auto runs = open_report(spec.output_dir / "runs.csv");
  runs << join_csv(run_columns()) << '\n';
  runs.flush();

  // Rows are appended by a single writer in task order, whatever order the
  // workers finish in.
  std::mutex writer;
  std::vector<bool> done(tasks.size(), false);
  size_t next_to_write = 0;
  std::atomic<size_t> next_task{0};

  auto worker = [&] {
    for (;;) {
      const size_t t = next_task.fetch_add(1);
      if (t >= tasks.size()) return;
      RunRecord record = run_repetition(spec, tasks[t].rep, tasks[t].sweep_value);
      std::lock_guard<std::mutex> lock(writer);
      outcome.records[t] = std::move(record);
      done[t] = true;
      while (next_to_write < tasks.size() && done[next_to_write]) {
        runs << join_csv(run_row(outcome.records[next_to_write])) << '\n';
        ++next_to_write;
      }
      runs.flush();
    }
  };

  unsigned width = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs) : std::thread::hardware_concurrency();
  width = std::clamp(width, 1u, static_cast<unsigned>(tasks.size()));
  if (width == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < width; ++w) pool.emplace_back(worker);
  }

  for (const auto& r : outcome.records)
    if (r.status != "ok") ++outcome.failed;

  {
    auto frc = open_report(spec.output_dir / "frc_audit.csv");
    frc << "seed,sweep_value,sparsity_ratio,noise_ratio,epsilon,delta,passes\n";
    for (const auto& r : outcome.records) {
      if (!r.frc) continue;
      frc << r.metrics.seed << ',' << opt_double(r.sweep_value) << ',' << format_double(r.frc->sparsity_ratio)
          << ',' << format_double(r.frc->noise_ratio) << ',' << format_double(r.frc->epsilon) << ','
          << format_double(r.frc->delta) << ',' << (r.frc->passes ? "true" : "false") << '\n';
    }
  }

  if (std::any_of(outcome.records.begin(), outcome.records.end(), [](const auto& r) { return r.oracle.has_value(); })) {
    auto oracle = open_report(spec.output_dir / "oracle.csv");
    oracle << "seed,sweep_value,best_l0,num_dags,ties,matches_truth,exhaustive\n";
    for (const auto& r : outcome.records) {
      if (!r.oracle) continue;
      oracle << r.metrics.seed << ',' << opt_double(r.sweep_value) << ',' << r.oracle->best_l0 << ','
             << r.oracle->num_dags_enumerated << ',' << r.oracle->ties.size() << ','
             << (r.oracle_matches_truth ? "true" : "false") << ',' << (r.oracle->exhaustive ? "true" : "false")
             << '\n';
    }
  }

  outcome.aggregates = aggregate(outcome.records);
  {
    auto agg = open_report(spec.output_dir / "aggregate.csv");
    agg << "sweep_value,metric,count,mean,std\n";
    for (const auto& row : outcome.aggregates) {
      agg << opt_double(row.sweep_value) << ',' << row.metric << ',' << row.count << ','
          << (row.count ? format_double(row.mean) : "na") << ',' << (row.count ? format_double(row.std) : "na")
          << '\n';
    }
  }

  KeyValues echo = to_key_values(spec.solver);
  echo.merge(to_key_values(spec.graph));
  echo.merge(to_key_values(spec.data));
  echo.erase("graph.seed");
  echo.erase("data.seed");
  echo.erase("solver.seed");
  echo["name"] = spec.name;
  echo["repetitions"] = std::to_string(spec.repetitions);
  echo["seed"] = std::to_string(spec.base_seed);
  echo["timeout_s"] = format_double(spec.timeout_s);
  if (spec.sweep) echo["sweep.parameter"] = spec.sweep->parameter;
  write_key_values(spec.output_dir / "spec.txt", echo);

  if (spec.sweep) {
    for (const char* metric : {"shd", "sid", "tpr", "nmse", "c_tpr", "runtime_s"}) {
      PlotSeries series;
      for (const auto& row : outcome.aggregates) {
        if (row.metric != metric || row.count == 0) continue;
        series.x.push_back(*row.sweep_value);
        series.mean.push_back(row.mean);
        series.std.push_back(row.std);
      }
      if (series.x.empty()) continue;
      write_svg_plot(spec.output_dir / "plots" / (std::string(metric) + ".svg"), spec.name, spec.sweep->parameter,
                     metric, series);
    }
  }
  return outcome;
}

void write_solve_result(const std::filesystem::path& dir, const SolveResult& result, const SolverConfig& cfg) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "adjacency_raw.csv", result.weights_raw);
  write_matrix_csv(dir / "adjacency.csv", result.weights.weights());
  write_edge_list(dir / "edges.txt", result.weights.weights());
  {
    auto trace = open_report(dir / "trace.csv");
    trace << "iter,loss,h,rho\n";
    for (const auto& p : result.objective_trace)
      trace << p.iteration << ',' << format_double(p.loss) << ',' << format_double(p.h) << ','
            << format_double(p.rho) << '\n';
  }
  KeyValues summary = to_key_values(cfg);
  summary["runtime_s"] = format_double(result.runtime_seconds);
  summary["converged"] = result.converged ? "true" : "false";
  summary["repaired_edges"] = std::to_string(result.repaired_edges);
  summary["edges"] = std::to_string(result.weights.edge_count());
  summary["final_h"] = result.round_h.empty() ? "na" : format_double(result.round_h.back());
  write_key_values(dir / "summary.txt", summary);
}

void write_dataset(const std::filesystem::path& dir, const Dataset& ds, const GraphGenConfig& graph) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "data.csv", ds.x);
  KeyValues meta = to_key_values(graph);
  if (ds.ground_truth) {
    write_matrix_csv(dir / "truth.csv", ds.ground_truth->weights());
    write_edge_list(dir / "truth_edges.txt", ds.ground_truth->weights());
  }
  if (ds.root_causes) write_matrix_csv(dir / "root_causes.csv", ds.root_causes->c);
  if (ds.gen_config) meta.merge(to_key_values(*ds.gen_config));
  meta["rows"] = std::to_string(ds.x.rows());
  meta["cols"] = std::to_string(ds.x.cols());
  std::string flagged;
  for (Index j : ds.zero_variance_columns) flagged += (flagged.empty() ? "" : " ") + std::to_string(j);
  meta["zero_variance_columns"] = flagged.empty() ? "none" : flagged;
  write_key_values(dir / "meta.txt", meta);
}

void write_l0_result(const std::filesystem::path& dir, const L0Result& result) {
  std::filesystem::create_directories(dir);
  write_edge_list(dir / "best_edges.txt", result.best_weights);
  KeyValues kv;
  kv["best_l0"] = std::to_string(result.best_l0);
  kv["num_dags_enumerated"] = std::to_string(result.num_dags_enumerated);
  kv["ties"] = std::to_string(result.ties.size());
  kv["rank_deficient_supports"] = std::to_string(result.rank_deficient_supports);
  kv["exhaustive"] = result.exhaustive ? "true" : "false";
  std::string edges;
  for (const auto& [i, j] : result.best_support) edges += (edges.empty() ? "" : " ") + std::to_string(i) + "->" + std::to_string(j);
  kv["best_support"] = edges.empty() ? "none" : edges;
  write_key_values(dir / "summary.txt", kv);
}

ExternalReport run_external(const std::filesystem::path& data_csv,
                            const std::optional<std::filesystem::path>& truth_csv, const SolverConfig& solver,
                            const std::filesystem::path& out_dir, const SolveControl& control) {
  const Matrix x = read_matrix_csv(data_csv);
  std::optional<Matrix> truth;
  if (truth_csv) {
    truth = read_matrix_csv(*truth_csv);
    if (truth->rows() != truth->cols() || truth->cols() != x.cols()) {
      throw Error(ErrorKind::ShapeMismatch, "truth is " + std::to_string(truth->rows()) + "x" +
                                                std::to_string(truth->cols()) + " but data has " +
                                                std::to_string(x.cols()) + " columns");
    }
  }
  ExternalReport report{solve(x, solver, control), std::nullopt};
  write_solve_result(out_dir, report.solve, solver);
  if (truth) {
    MetricsReport m = compare_graphs(report.solve.weights.weights(), *truth, &x);
    m.seed = solver.seed;
    m.runtime_seconds = report.solve.runtime_seconds;
    auto out = open_report(out_dir / "metrics.csv");
    out << join_csv(metrics_columns()) << '\n' << join_csv(to_csv_fields(m)) << '\n';
    report.metrics = m;
  }
  return report;
}

}  // namespace sparserc
