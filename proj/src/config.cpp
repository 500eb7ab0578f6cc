#include "sparserc/bench.hpp"

#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sparserc {

namespace {

[[noreturn]] void config_error(const std::string& source, const std::string& what) {
  throw Error(ErrorKind::InvalidConfig, source + ": " + what);
}

class TableReader {
 public:
  TableReader(const toml::table& table, std::string prefix, std::string source)
      : table_(table), prefix_(std::move(prefix)), source_(std::move(source)) {}

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    const toml::node* node = table_.get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (auto v = node->value<bool>()) {
        target = *v;
        return;
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = node->value<std::string>()) {
        target = *v;
        return;
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (auto v = node->value<double>()) {
        target = *v;
        return;
      }
    } else {
      if (auto v = node->value<std::int64_t>()) {
        if (*v < 0 && std::is_unsigned_v<T>) config_error(source_, name(key) + " must be nonnegative");
        target = static_cast<T>(*v);
        return;
      }
    }
    config_error(source_, name(key) + " has the wrong type");
  }

  void reject_unknown() const {
    for (const auto& [key, node] : table_) {
      if (!seen_.count(std::string(key.str())))
        config_error(source_, "unknown key '" + name(std::string(key.str()).c_str()) + "'");
    }
  }

  void mark(const char* key) { seen_.insert(key); }

 private:
  std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  const toml::table& table_;
  std::string prefix_;
  std::string source_;
  std::set<std::string> seen_;
};

const toml::table& subtable(const toml::table& root, const char* key, const std::string& source) {
  static const toml::table empty;
  const toml::node* node = root.get(key);
  if (!node) return empty;
  if (!node->is_table()) config_error(source, std::string("[") + key + "] must be a table");
  return *node->as_table();
}

}  // namespace

void ExperimentSpec::validate() const {
  graph.validate();
  data.validate();
  solver.validate();
  if (repetitions < 1) throw Error(ErrorKind::InvalidConfig, "repetitions must be at least 1");
  if (sweep && sweep->values.empty()) throw Error(ErrorKind::InvalidConfig, "sweep values must be nonempty");
  if (jobs < 0) throw Error(ErrorKind::InvalidConfig, "jobs must be nonnegative");
  if (!(timeout_s > 0.0)) throw Error(ErrorKind::InvalidConfig, "timeout_s must be positive");
}

ExperimentSpec parse_experiment_spec(const std::string& toml_text, const std::string& source,
                                     std::optional<int> scale_override) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& err) {
    std::ostringstream msg;
    msg << source << ":" << err.source().begin.line << ":" << err.source().begin.column << ": "
        << err.description();
    throw Error(ErrorKind::ParseError, msg.str());
  }

  ExperimentSpec spec;
  TableReader top(root, "", source);
  top.read("name", spec.name);
  top.read("repetitions", spec.repetitions);
  top.read("seed", spec.base_seed);
  top.read("run_l0_oracle", spec.run_l0_oracle);
  top.read("jobs", spec.jobs);
  top.read("timeout_s", spec.timeout_s);
  top.read("frc_epsilon", spec.frc_epsilon);
  top.read("frc_delta", spec.frc_delta);
  top.read("c_support_frac", spec.c_support_frac);
  std::string output_dir = spec.output_dir.string();
  top.read("output_dir", output_dir);
  spec.output_dir = output_dir;
  int scale = 1;
  top.read("scale", scale);
  for (const char* section : {"graph", "data", "solver", "sweep"}) top.mark(section);
  top.reject_unknown();

  {
    TableReader r(subtable(root, "graph", source), "graph", source);
    std::string type = to_string(spec.graph.graph_type);
    r.read("d", spec.graph.d);
    r.read("type", type);
    r.read("edges_per_vertex", spec.graph.edges_per_vertex);
    r.read("weight_low", spec.graph.weight_low);
    r.read("weight_high", spec.graph.weight_high);
    r.reject_unknown();
    spec.graph.graph_type = parse_graph_type(type);
  }
  {
    TableReader r(subtable(root, "data", source), "data", source);
    std::string noise = to_string(spec.data.noise_dist);
    r.read("p", spec.data.p);
    r.read("n", spec.data.n);
    r.read("noise", noise);
    r.read("sigma", spec.data.sigma);
    r.read("fixed_support", spec.data.fixed_support);
    r.read("standardize", spec.data.standardize);
    r.reject_unknown();
    spec.data.noise_dist = parse_noise_dist(noise);
  }
  {
    TableReader r(subtable(root, "solver", source), "solver", source);
    SolverConfig& s = spec.solver;
    std::string penalty = s.penalty == PenaltyMode::FixedPenalty ? "fixed" : "augmented_lagrangian";
    r.read("lambda", s.lambda);
    r.read("learning_rate", s.learning_rate);
    r.read("omega", s.omega);
    r.read("max_outer", s.max_outer);
    r.read("max_inner", s.max_inner);
    r.read("h_tol", s.h_tol);
    r.read("rho_init", s.rho_init);
    r.read("rho_mult", s.rho_mult);
    r.read("rho_max", s.rho_max);
    r.read("adam_beta1", s.adam_beta1);
    r.read("adam_beta2", s.adam_beta2);
    r.read("adam_eps", s.adam_eps);
    r.read("inner_window", s.inner_window);
    r.read("inner_rel_tol", s.inner_rel_tol);
    r.read("log_every", s.log_every);
    r.read("penalty", penalty);
    r.reject_unknown();
    if (penalty == "fixed") {
      s.penalty = PenaltyMode::FixedPenalty;
    } else if (penalty == "augmented_lagrangian") {
      s.penalty = PenaltyMode::AugmentedLagrangian;
    } else {
      config_error(source, "solver.penalty must be 'augmented_lagrangian' or 'fixed'");
    }
  }
  if (root.contains("sweep")) {
    const toml::table& t = subtable(root, "sweep", source);
    TableReader r(t, "sweep", source);
    Sweep sweep;
    r.read("parameter", sweep.parameter);
    r.mark("values");
    r.reject_unknown();
    const toml::array* values = t.get_as<toml::array>("values");
    if (!values) config_error(source, "sweep.values must be an array");
    for (const auto& v : *values) {
      const auto number = v.value<double>();
      if (!number) config_error(source, "sweep.values must be numeric");
      sweep.values.push_back(*number);
    }
    // Validates the parameter path.
    ExperimentSpec probe = spec;
    if (!sweep.values.empty()) set_parameter(probe, sweep.parameter, sweep.values.front());
    spec.sweep = std::move(sweep);
  }
  apply_scale(spec, scale_override.value_or(scale));
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path, std::optional<int> scale_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_spec(buffer.str(), path.string(), scale_override);
}

void apply_scale(ExperimentSpec& spec, int scale) {
  if (scale < 1) throw Error(ErrorKind::InvalidConfig, "scale must be at least 1");
  spec.graph.d *= scale;
}

void set_parameter(ExperimentSpec& spec, const std::string& path, double value) {
  auto as_int = [&](auto& field) {
    if (value != std::floor(value)) throw Error(ErrorKind::InvalidConfig, path + " needs an integer value");
    field = static_cast<std::remove_reference_t<decltype(field)>>(value);
  };
  if (path == "graph.d") return as_int(spec.graph.d);
  if (path == "graph.edges_per_vertex") return as_int(spec.graph.edges_per_vertex);
  if (path == "graph.weight_low") { spec.graph.weight_low = value; return; }
  if (path == "graph.weight_high") { spec.graph.weight_high = value; return; }
  if (path == "data.p") { spec.data.p = value; return; }
  if (path == "data.n") return as_int(spec.data.n);
  if (path == "data.sigma") { spec.data.sigma = value; return; }
  if (path == "solver.lambda") { spec.solver.lambda = value; return; }
  if (path == "solver.learning_rate") { spec.solver.learning_rate = value; return; }
  if (path == "solver.omega") { spec.solver.omega = value; return; }
  if (path == "solver.max_inner") return as_int(spec.solver.max_inner);
  if (path == "solver.max_outer") return as_int(spec.solver.max_outer);
  throw Error(ErrorKind::InvalidConfig, "unsupported sweep parameter '" + path + "'");
}

KeyValues to_key_values(const SolverConfig& s) {
  return {{"solver.lambda", format_double(s.lambda)},
          {"solver.learning_rate", format_double(s.learning_rate)},
          {"solver.omega", format_double(s.omega)},
          {"solver.max_outer", std::to_string(s.max_outer)},
          {"solver.max_inner", std::to_string(s.max_inner)},
          {"solver.h_tol", format_double(s.h_tol)},
          {"solver.rho_init", format_double(s.rho_init)},
          {"solver.rho_mult", format_double(s.rho_mult)},
          {"solver.rho_max", format_double(s.rho_max)},
          {"solver.adam_beta1", format_double(s.adam_beta1)},
          {"solver.adam_beta2", format_double(s.adam_beta2)},
          {"solver.adam_eps", format_double(s.adam_eps)},
          {"solver.inner_window", std::to_string(s.inner_window)},
          {"solver.inner_rel_tol", format_double(s.inner_rel_tol)},
          {"solver.penalty", s.penalty == PenaltyMode::FixedPenalty ? "fixed" : "augmented_lagrangian"},
          {"solver.seed", std::to_string(s.seed)}};
}

KeyValues to_key_values(const GraphGenConfig& g) {
  return {{"graph.d", std::to_string(g.d)},
          {"graph.type", to_string(g.graph_type)},
          {"graph.edges_per_vertex", std::to_string(g.edges_per_vertex)},
          {"graph.weight_low", format_double(g.weight_low)},
          {"graph.weight_high", format_double(g.weight_high)},
          {"graph.seed", std::to_string(g.seed)}};
}

KeyValues to_key_values(const DataGenConfig& c) {
  return {{"data.p", format_double(c.p)},
          {"data.n", std::to_string(c.n)},
          {"data.noise", to_string(c.noise_dist)},
          {"data.sigma", format_double(c.sigma)},
          {"data.fixed_support", c.fixed_support ? "true" : "false"},
          {"data.standardize", c.standardize ? "true" : "false"},
          {"data.seed", std::to_string(c.seed)}};
}

}  // namespace sparserc
