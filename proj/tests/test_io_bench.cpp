#include "sparserc/bench.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace sparserc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sparserc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) rows.push_back(split_csv_line(line));
  return rows;
}

const char* kSmallSpec = R"(
name = "small"
repetitions = 3
seed = 42
jobs = 2

[graph]
d = 5
edges_per_vertex = 1

[data]
n = 200

[solver]
max_outer = 3
max_inner = 400
)";

int run_cli(const std::string& args) {
  const int status = std::system((std::string(SPARSERC_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 123456789.0}) CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::isinf(parse_double("-inf")));
  CHECK_THROWS_AS(parse_double("1.5x"), Error);
  CHECK_THROWS_AS(parse_int("3.0"), Error);
}

TEST_CASE("matrix CSV round trip and error locations") {
  const fs::path dir = scratch("csv");
  Matrix m(2, 3);
  m << 1.0 / 3.0, -0.0, 5e-20, 7, 8, 9;
  write_matrix_csv(dir / "m.csv", m);
  CHECK(read_matrix_csv(dir / "m.csv") == m);

  write_text(dir / "bad.csv", "1,2,3\n4,oops,6\n");
  try {
    read_matrix_csv(dir / "bad.csv");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    const std::string what = e.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("column 2") != std::string::npos);
  }
  write_text(dir / "ragged.csv", "1,2,3\n4,5\n");
  CHECK_THROWS_AS(read_matrix_csv(dir / "ragged.csv"), Error);
  CHECK_THROWS_AS(read_matrix_csv(dir / "missing.csv"), Error);
}

TEST_CASE("edge list and key-value round trips") {
  const fs::path dir = scratch("edges");
  Matrix w = Matrix::Zero(3, 3);
  w(0, 2) = -0.75;
  w(2, 1) = 0.125;
  write_edge_list(dir / "e.txt", w);
  CHECK(read_edge_list(dir / "e.txt", 3) == w);
  std::ifstream in(dir / "e.txt");
  std::string first;
  std::getline(in, first);
  CHECK(first == "0,2,-0.75");

  KeyValues kv{{"a", "1"}, {"b.c", "x y"}};
  write_key_values(dir / "kv.txt", kv);
  CHECK(read_key_values(dir / "kv.txt") == kv);
}

TEST_CASE("experiment config parsing") {
  const ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  CHECK(spec.name == "small");
  CHECK(spec.repetitions == 3);
  CHECK(spec.base_seed == 42);
  CHECK(spec.graph.d == 5);
  CHECK(spec.data.n == 200);
  CHECK(spec.solver.max_inner == 400);
  CHECK(spec.solver.lambda == 1e-3);

  const ExperimentSpec scaled = parse_experiment_spec(std::string(kSmallSpec) + "", "<s>", 4);
  CHECK(scaled.graph.d == 20);

  const ExperimentSpec sweep =
      parse_experiment_spec("[sweep]\nparameter = \"data.n\"\nvalues = [100, 250]\n");
  REQUIRE(sweep.sweep);
  CHECK(sweep.sweep->values == std::vector<double>{100, 250});

  auto kind_of = [](const std::string& text) {
    try {
      parse_experiment_spec(text, "cfg.toml");
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::IoError;
  };
  CHECK(kind_of("[graph]\nd = 5\ncolour = 1\n") == ErrorKind::InvalidConfig);
  CHECK(kind_of("repetitions = \"five\"\n") == ErrorKind::InvalidConfig);
  CHECK(kind_of("repetitions = 0\n") == ErrorKind::InvalidConfig);
  CHECK(kind_of("[data]\np = 1.5\n") == ErrorKind::InvalidConfig);
  CHECK(kind_of("[solver]\npenalty = \"barrier\"\n") == ErrorKind::InvalidConfig);
  CHECK(kind_of("[sweep]\nparameter = \"graph.colour\"\nvalues = [1]\n") == ErrorKind::InvalidConfig);
  CHECK(kind_of("[sweep]\nparameter = \"data.n\"\nvalues = []\n") == ErrorKind::InvalidConfig);
  try {
    parse_experiment_spec("name = \"x\"\n[graph\n", "cfg.toml");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("cfg.toml:2") != std::string::npos);
  }
}

TEST_CASE("bundled presets parse") {
  const fs::path configs = fs::path(SPARSERC_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& entry : fs::directory_iterator(configs)) {
    if (entry.path().extension() != ".toml") continue;
    CHECK_NOTHROW(load_experiment_spec(entry.path()));
    ++count;
  }
  CHECK(count >= 10);
  const ExperimentSpec row6 = load_experiment_spec(configs / "row06_large_weights.toml");
  CHECK(row6.graph.weight_high == 2.0);
  CHECK(row6.solver.omega == 0.4);
  CHECK(load_experiment_spec(configs / "row01_default.toml", 5).graph.d == 100);
}

TEST_CASE("repetition seeds are distinct and stable") {
  CHECK(repetition_seed(0, 0) == repetition_seed(0, 0));
  CHECK(repetition_seed(0, 0) != repetition_seed(0, 1));
  CHECK(repetition_seed(0, 1) != repetition_seed(1, 1));
}

TEST_CASE("experiment outputs are reproducible and parse back") {
  ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  spec.output_dir = scratch("bench_a");
  const ExperimentOutcome a = run_experiment(spec);
  spec.output_dir = scratch("bench_b");
  spec.jobs = 1;
  const ExperimentOutcome b = run_experiment(spec);
  CHECK(a.failed == 0);

  const auto rows_a = read_rows(a.report_dir / "runs.csv");
  const auto rows_b = read_rows(b.report_dir / "runs.csv");
  REQUIRE(rows_a.size() == 4);
  REQUIRE(rows_a.size() == rows_b.size());
  CHECK(rows_a[0] == run_columns());
  const size_t runtime_col = 17;
  REQUIRE(rows_a[0][runtime_col] == "runtime_s");
  for (size_t r = 1; r < rows_a.size(); ++r) {
    auto x = rows_a[r], y = rows_b[r];
    x[runtime_col] = y[runtime_col] = "";
    CHECK(x == y);
    const RunRecord parsed = parse_run_row(rows_a[r]);
    CHECK(parsed.metrics == a.records[r - 1].metrics);
    CHECK(parsed.status == "ok");
    CHECK(run_row(parsed) == rows_a[r]);
  }

  // Aggregates recomputed from the written rows.
  std::vector<RunRecord> parsed;
  for (size_t r = 1; r < rows_a.size(); ++r) parsed.push_back(parse_run_row(rows_a[r]));
  const auto agg_rows = read_rows(a.report_dir / "aggregate.csv");
  int checked = 0;
  for (size_t r = 1; r < agg_rows.size(); ++r) {
    const std::string& metric = agg_rows[r][1];
    if (agg_rows[r][3] == "na") continue;
    std::vector<double> values;
    for (const auto& rec : parsed) {
      const auto fields = to_csv_fields(rec.metrics);
      for (size_t c = 0; c < metrics_columns().size(); ++c)
        if (metrics_columns()[c] == metric && fields[c] != "na") values.push_back(parse_double(fields[c]));
    }
    REQUIRE(!values.empty());
    double mean = 0;
    for (double v : values) mean += v / static_cast<double>(values.size());
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean) / static_cast<double>(values.size());
    CHECK(std::abs(parse_double(agg_rows[r][3]) - mean) <= 1e-12 * std::max(1.0, std::abs(mean)));
    CHECK(std::abs(parse_double(agg_rows[r][4]) - std::sqrt(var)) <= 1e-12 * std::max(1.0, std::sqrt(var)));
    ++checked;
  }
  CHECK(checked >= 10);
  CHECK(fs::exists(a.report_dir / "frc_audit.csv"));
  CHECK(fs::exists(a.report_dir / "spec.txt"));
}

TEST_CASE("failed repetitions are recorded without aborting the rest") {
  ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  spec.output_dir = scratch("bench_timeout");
  spec.timeout_s = 1e-9;
  spec.solver.max_inner = 100000;
  const ExperimentOutcome out = run_experiment(spec);
  CHECK(out.failed == 3);
  for (const auto& r : out.records) CHECK(r.status == "timeout");
  CHECK(read_rows(out.report_dir / "runs.csv").size() == 4);
}

TEST_CASE("sweeps write one group per value and plots") {
  ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  spec.repetitions = 1;
  spec.sweep = Sweep{"data.n", {50, 100}};
  spec.output_dir = scratch("bench_sweep");
  const ExperimentOutcome out = run_experiment(spec);
  REQUIRE(out.records.size() == 2);
  CHECK(out.records[0].metrics.n == 50);
  CHECK(out.records[1].metrics.n == 100);
  CHECK(fs::exists(out.report_dir / "plots" / "shd.svg"));
}

TEST_CASE("oracle runs on tiny graphs") {
  ExperimentSpec spec = parse_experiment_spec(kSmallSpec);
  spec.graph.d = 3;
  spec.repetitions = 2;
  spec.run_l0_oracle = true;
  spec.output_dir = scratch("bench_oracle");
  const ExperimentOutcome out = run_experiment(spec);
  for (const auto& r : out.records) CHECK(r.oracle.has_value());
  CHECK(fs::exists(out.report_dir / "oracle.csv"));
}

TEST_CASE("external data round trip matches the in-process run") {
  const fs::path dir = scratch("external");
  GraphGenConfig g;
  g.d = 6;
  g.edges_per_vertex = 2;
  g.seed = 3;
  DataGenConfig dc;
  dc.n = 300;
  dc.seed = 4;
  const WeightedDag dag = generate_random_dag(g);
  Dataset ds = synthesize(dag, sample_root_causes(dag, dc), false);
  ds.gen_config = dc;
  write_dataset(dir / "data", ds, g);
  CHECK(fs::exists(dir / "data" / "meta.txt"));

  SolverConfig solver;
  solver.max_inner = 800;
  solver.max_outer = 4;
  const ExternalReport ext = run_external(dir / "data" / "data.csv", dir / "data" / "truth.csv", solver, dir / "out");
  REQUIRE(ext.metrics);
  const SolveResult local = solve(ds.x, solver);
  MetricsReport expected = compare_graphs(local.weights.weights(), dag.weights(), &ds.x);
  expected.seed = solver.seed;
  MetricsReport got = *ext.metrics;
  expected.runtime_seconds = got.runtime_seconds = 0;
  CHECK(got == expected);
  for (const char* f : {"adjacency.csv", "adjacency_raw.csv", "edges.txt", "trace.csv", "summary.txt", "metrics.csv"})
    CHECK(fs::exists(dir / "out" / f));

  write_matrix_csv(dir / "wrong_truth.csv", Matrix::Zero(5, 5));
  CHECK_THROWS_AS(run_external(dir / "data" / "data.csv", dir / "wrong_truth.csv", solver, dir / "out2"), Error);
}

TEST_CASE("CLI exit codes") {
  const fs::path dir = scratch("cli");
  write_text(dir / "small.toml", std::string(kSmallSpec) + "repetitions = 1\n");
  // Duplicate key is a TOML error.
  CHECK(run_cli("bench --config " + (dir / "small.toml").string()) == 2);
  write_text(dir / "small.toml", kSmallSpec);
  CHECK(run_cli("bench --config " + (dir / "small.toml").string() + " --out " + (dir / "r").string()) == 0);
  CHECK(run_cli("bench --config " + (dir / "small.toml").string() + " --out " + (dir / "t").string() +
                " --timeout-s 1 --jobs 1") == 0);
  std::string slow = kSmallSpec;
  slow.replace(slow.find("max_inner = 400"), 15, "max_inner = 5000000");
  slow.replace(slow.find("repetitions = 3"), 15, "repetitions = 1");
  write_text(dir / "slow.toml", slow);
  CHECK(run_cli("bench --config " + (dir / "slow.toml").string() + " --out " + (dir / "slow").string() +
                " --timeout-s 1") == 1);
  CHECK(run_cli("bench") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("generate --config " + (dir / "small.toml").string() + " --out " + (dir / "gen").string()) == 0);
  CHECK(run_cli("solve --data " + (dir / "gen" / "data.csv").string() + " --truth " +
                (dir / "gen" / "truth.csv").string() + " --config " + (dir / "small.toml").string() + " --out " +
                (dir / "s").string()) == 0);
  CHECK(run_cli("metrics --est " + (dir / "s" / "adjacency.csv").string() + " --truth " +
                (dir / "gen" / "truth.csv").string()) == 0);
  CHECK(run_cli("oracle --data " + (dir / "gen" / "data.csv").string() + " --out " + (dir / "o").string()) == 0);
  write_text(dir / "bad.csv", "1,2\nx,3\n");
  CHECK(run_cli("solve --data " + (dir / "bad.csv").string()) == 2);
}
