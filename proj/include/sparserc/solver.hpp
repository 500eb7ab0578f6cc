#pragma once

#include "sparserc/core.hpp"
#include "sparserc/expm.hpp"
#include "sparserc/graph.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

namespace sparserc {

enum class PenaltyMode {
  /// rho * h^2 / 2 + alpha * h with dual ascent on alpha and rho escalation.
  AugmentedLagrangian,
  /// A single fixed rho * h^2 / 2 term, no dual variable.
  FixedPenalty,
};

struct SolverConfig {
  double lambda = 1e-3;
  double learning_rate = 1e-3;
  double omega = 0.09;
  int max_outer = 10;
  int max_inner = 5000;
  double h_tol = 1e-8;
  double rho_init = 1.0;
  double rho_mult = 10.0;
  double rho_max = 1e16;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  /// Inner loop stops when the relative change of the penalized loss over
  /// this many iterations is below `inner_rel_tol`.
  int inner_window = 100;
  double inner_rel_tol = 1e-9;
  /// Trace sampling period in inner iterations (round ends are always logged).
  int log_every = 100;
  PenaltyMode penalty = PenaltyMode::AugmentedLagrangian;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TracePoint {
  long iteration;
  double loss;
  double h;
  double rho;
};

struct SolveResult {
  Matrix weights_raw;
  WeightedDag weights;
  std::vector<TracePoint> objective_trace;
  /// h at the end of every outer round.
  std::vector<double> round_h;
  double runtime_seconds = 0.0;
  bool converged = false;
  /// Edges removed by cycle repair after thresholding.
  int repaired_edges = 0;
};

struct SolveControl {
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Sparse root-cause loss (1/2n)||X(I - A)||_1 + lambda ||A||_1.
template <typename DX, typename DA>
typename DX::Scalar objective(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DA>& a,
                              typename DX::Scalar lambda) {
  require_square(a, "objective");
  if (x.cols() != a.rows()) throw Error(ErrorKind::ShapeMismatch, "objective: X and A disagree");
  using Scalar = typename DX::Scalar;
  const Scalar n = static_cast<Scalar>(x.rows());
  const MatrixX<Scalar> residual = x - x * a;
  return residual.cwiseAbs().sum() / (Scalar(2) * n) + lambda * a.cwiseAbs().sum();
}

template <typename Scalar>
struct AcyclicityValue {
  Scalar value;
  MatrixX<Scalar> gradient;
};

/// h(A) = tr(exp(A o A)) - d and its gradient exp(A o A)^T o 2A.
template <typename Derived>
AcyclicityValue<typename Derived::Scalar> acyclicity_h(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  require_square(a, "acyclicity_h");
  const MatrixX<Scalar> squared = a.cwiseProduct(a);
  const MatrixX<Scalar> e = expm(squared);
  AcyclicityValue<Scalar> out;
  out.value = e.trace() - static_cast<Scalar>(a.rows());
  out.gradient = e.transpose().cwiseProduct(Scalar(2) * a);
  return out;
}

/// Penalized loss minimized by each inner round. `huber_width` > 0 replaces
/// every |.| by its Huber smoothing of that width (used for gradient checks);
/// 0 gives the plain L1 subgradient with sign(0) = 0.
struct PenalizedLoss {
  double value;
  double data_loss;
  double h;
  Matrix gradient;
};

PenalizedLoss penalized_loss(const Matrix& x, const Matrix& a, double lambda, double rho,
                             double alpha, double huber_width = 0.0);

SolveResult solve(const Matrix& x, const SolverConfig& cfg, const SolveControl& control = {});

/// C_hat = X(I - A), which equals X(I + closure(A))^-1.
template <typename Derived>
MatrixX<typename Derived::Scalar> recover_root_causes(const Eigen::MatrixBase<Derived>& x,
                                                      const MatrixX<typename Derived::Scalar>& a) {
  require_square(a, "recover_root_causes");
  if (x.cols() != a.rows())
    throw Error(ErrorKind::ShapeMismatch, "recover_root_causes: X and A disagree");
  return x - x * a;
}

inline Matrix recover_root_causes(const Matrix& x, const WeightedDag& g) {
  return recover_root_causes(x, g.weights());
}

}  // namespace sparserc
