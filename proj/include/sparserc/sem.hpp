#pragma once

#include "sparserc/core.hpp"
#include "sparserc/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparserc {

enum class NoiseDist { Gauss, Gumbel };

const char* to_string(NoiseDist dist);
NoiseDist parse_noise_dist(const std::string& name);

/// Root causes C with the two noise sources: N_c enters with C, N_x is
/// added to the measurements.
struct RootCauses {
  Matrix c;
  Matrix noise_c;
  Matrix noise_x;

  Index n() const noexcept { return c.rows(); }
  Index d() const noexcept { return c.cols(); }
};

struct DataGenConfig {
  double p = 0.1;
  Index n = 1000;
  NoiseDist noise_dist = NoiseDist::Gauss;
  double sigma = 0.01;
  bool fixed_support = false;
  bool standardize = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Dataset {
  Matrix x;
  std::optional<WeightedDag> ground_truth;
  std::optional<RootCauses> root_causes;
  std::optional<DataGenConfig> gen_config;
  /// Columns left unscaled by standardization because their variance is 0.
  std::vector<Index> zero_variance_columns;
};

struct FrcAudit {
  double sparsity_ratio = 0.0;
  /// NaN when C has no nonzero entry.
  double noise_ratio = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  bool passes = false;
  bool degenerate = false;
};

struct FrcBounds {
  double expected_sparsity;
  double expected_noise_bound;
};

RootCauses sample_root_causes(const WeightedDag& g, const DataGenConfig& cfg);

/// X = (C + N_c)(I + closure(A)) + N_x, optionally rescaled to unit column
/// variance.
Dataset synthesize(const WeightedDag& g, const RootCauses& rc, bool standardize);

FrcAudit audit_frc(const RootCauses& rc, const WeightedDag& g, double epsilon, double delta);

/// Expected sparsity and noise-ratio bound for Gaussian noise. The noise bound
/// is (avg_degree + 2) * sigma * sqrt(2/pi) / E[nonzero root cause], where the
/// nonzero root causes are Uniform(0, 1).
FrcBounds expected_frc_bounds(Index d, double p, double sigma, double avg_degree);

/// Population variance of each column.
Vector column_variances(const Matrix& x);

}  // namespace sparserc
