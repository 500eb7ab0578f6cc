#include "sparserc/sem.hpp"

#include "sparserc/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sparserc {

namespace {

enum StreamTag : std::uint64_t { kRootCause = 1, kNoiseC = 2, kNoiseX = 3, kFixedSupport = 4 };

double draw_noise(Rng& rng, NoiseDist dist, double sigma) {
  return dist == NoiseDist::Gauss ? sigma * rng.normal() : rng.centered_gumbel(sigma);
}

// Every row has its own generator seeded from (seed, stream, row), so rows can
// be produced in any order with identical results.
Matrix noise_matrix(Index n, Index d, const DataGenConfig& cfg, std::uint64_t stream) {
  Matrix out(n, d);
  if (cfg.sigma == 0.0) return out.setZero();
  for (Index r = 0; r < n; ++r) {
    Rng rng(derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(r)));
    for (Index j = 0; j < d; ++j) out(r, j) = draw_noise(rng, cfg.noise_dist, cfg.sigma);
  }
  return out;
}

}  // namespace

const char* to_string(NoiseDist dist) { return dist == NoiseDist::Gauss ? "gauss" : "gumbel"; }

NoiseDist parse_noise_dist(const std::string& name) {
  if (name == "gauss" || name == "Gauss" || name == "gaussian") return NoiseDist::Gauss;
  if (name == "gumbel" || name == "Gumbel") return NoiseDist::Gumbel;
  throw Error(ErrorKind::InvalidConfig, "unknown noise distribution '" + name + "'");
}

void DataGenConfig::validate() const {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidConfig, "p must lie in [0, 1)");
  if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidConfig, "sigma must be nonnegative");
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "n must be positive");
}

RootCauses sample_root_causes(const WeightedDag& g, const DataGenConfig& cfg) {
  cfg.validate();
  const Index n = cfg.n;
  const Index d = g.d();

  std::vector<bool> mask;
  if (cfg.fixed_support) {
    Rng rng(derive_seed(cfg.seed, kFixedSupport, 0));
    mask.resize(static_cast<size_t>(d));
    for (Index j = 0; j < d; ++j) mask[static_cast<size_t>(j)] = rng.bernoulli(cfg.p);
  }

  RootCauses rc;
  rc.c = Matrix::Zero(n, d);
  for (Index r = 0; r < n; ++r) {
    Rng rng(derive_seed(cfg.seed, kRootCause, static_cast<std::uint64_t>(r)));
    for (Index j = 0; j < d; ++j) {
      const bool active = cfg.fixed_support ? mask[static_cast<size_t>(j)] : rng.bernoulli(cfg.p);
      if (active) rc.c(r, j) = rng.uniform_open_closed();
    }
  }
  rc.noise_c = noise_matrix(n, d, cfg, kNoiseC);
  rc.noise_x = noise_matrix(n, d, cfg, kNoiseX);
  return rc;
}

Vector column_variances(const Matrix& x) {
  const Vector mean = x.colwise().mean();
  return (x.rowwise() - mean.transpose()).array().square().colwise().mean();
}

Dataset synthesize(const WeightedDag& g, const RootCauses& rc, bool standardize) {
  const Index d = g.d();
  if (rc.c.cols() != d || rc.noise_c.cols() != d || rc.noise_x.cols() != d ||
      rc.noise_c.rows() != rc.c.rows() || rc.noise_x.rows() != rc.c.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "synthesize: root causes and DAG disagree on shape");
  }
  Matrix mixing = transitive_closure(g);
  mixing.diagonal().array() += 1.0;

  Dataset ds;
  ds.x = (rc.c + rc.noise_c) * mixing + rc.noise_x;
  if (standardize) {
    const Vector var = column_variances(ds.x);
    for (Index j = 0; j < d; ++j) {
      if (var(j) > 0.0) {
        ds.x.col(j) /= std::sqrt(var(j));
      } else {
        ds.zero_variance_columns.push_back(j);
      }
    }
  }
  ds.ground_truth = g;
  ds.root_causes = rc;
  return ds;
}

FrcAudit audit_frc(const RootCauses& rc, const WeightedDag& g, double epsilon, double delta) {
  const Index n = rc.n();
  const Index d = rc.d();
  if (g.d() != d || rc.noise_c.rows() != n || rc.noise_c.cols() != d || rc.noise_x.rows() != n ||
      rc.noise_x.cols() != d) {
    throw Error(ErrorKind::ShapeMismatch, "audit_frc: shapes disagree");
  }
  const double nd = static_cast<double>(n) * static_cast<double>(d);
  const auto nonzeros = static_cast<double>((rc.c.array() != 0.0).count());

  FrcAudit audit;
  audit.epsilon = epsilon;
  audit.delta = delta;
  audit.sparsity_ratio = nonzeros / nd;
  if (nonzeros == 0.0) {
    audit.degenerate = true;
    audit.noise_ratio = std::numeric_limits<double>::quiet_NaN();
    audit.passes = false;
    return audit;
  }
  const Matrix residual_map = Matrix::Identity(d, d) - g.weights();
  const double noise_l1 = (rc.noise_c + rc.noise_x * residual_map).cwiseAbs().sum();
  const double mean_magnitude = rc.c.cwiseAbs().sum() / nonzeros;
  audit.noise_ratio = (noise_l1 / nd) / mean_magnitude;
  audit.passes = audit.sparsity_ratio < epsilon && audit.noise_ratio < delta;
  return audit;
}

FrcBounds expected_frc_bounds(Index d, double p, double sigma, double avg_degree) {
  if (d < 1) throw Error(ErrorKind::InvalidConfig, "d must be positive");
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidConfig, "p must lie in (0, 1)");
  if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidConfig, "sigma must be nonnegative");
  if (!(avg_degree >= 0.0)) throw Error(ErrorKind::InvalidConfig, "avg_degree must be nonnegative");
  // E|N| = sigma * sqrt(2/pi) per entry (folded normal). N_c contributes one
  // such term, N_x(I - A) at most (avg_degree + 1). Per row the numerator is
  // (avg_degree + 2) d sigma sqrt(2/pi) and E||C||_1 / E||C||_0 = 0.5.
  const double folded_mean = sigma * std::sqrt(2.0 / std::numbers::pi);
  const double dd = static_cast<double>(d);
  const double noise_per_row = (avg_degree + 2.0) * dd * folded_mean;
  return {p, noise_per_row / (0.5 * dd)};
}

}  // namespace sparserc
