#include "sparserc/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sparserc {

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw Error(ErrorKind::InvalidConfig, std::string(name) + " must be positive");
  };
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidConfig, "lambda must be nonnegative");
  positive(learning_rate, "learning_rate");
  positive(omega, "omega");
  positive(h_tol, "h_tol");
  positive(rho_init, "rho_init");
  positive(rho_max, "rho_max");
  positive(adam_eps, "adam_eps");
  if (!(rho_mult >= 1.0)) throw Error(ErrorKind::InvalidConfig, "rho_mult must be at least 1");
  if (max_outer < 1 || max_inner < 1)
    throw Error(ErrorKind::InvalidConfig, "iteration budgets must be positive");
  if (inner_window < 1 || log_every < 1)
    throw Error(ErrorKind::InvalidConfig, "inner_window and log_every must be positive");
  for (double beta : {adam_beta1, adam_beta2}) {
    if (!(beta > 0.0 && beta < 1.0))
      throw Error(ErrorKind::InvalidConfig, "Adam betas must lie in (0, 1)");
  }
}

namespace {

// Huber smoothing of |r|: quadratic inside [-width, width].
struct Smoothed {
  double value;
  double slope;
};

inline Smoothed smooth_abs(double r, double width) {
  if (width <= 0.0) return {std::abs(r), static_cast<double>((r > 0.0) - (r < 0.0))};
  const double mag = std::abs(r);
  if (mag <= width) return {r * r / (2.0 * width), r / width};
  return {mag - 0.5 * width, r > 0.0 ? 1.0 : -1.0};
}

}  // namespace

PenalizedLoss penalized_loss(const Matrix& x, const Matrix& a, double lambda, double rho,
                             double alpha, double huber_width) {
  require_square(a, "penalized_loss");
  if (x.cols() != a.rows()) throw Error(ErrorKind::ShapeMismatch, "penalized_loss: X and A disagree");
  const double n = static_cast<double>(x.rows());

  Matrix residual = x;
  residual.noalias() -= x * a;
  double data_sum = 0.0;
  for (Index k = 0; k < residual.size(); ++k) {
    const Smoothed s = smooth_abs(residual.data()[k], huber_width);
    data_sum += s.value;
    residual.data()[k] = s.slope;
  }
  Matrix grad(a.rows(), a.cols());
  grad.noalias() = x.transpose() * residual;
  grad *= -1.0 / (2.0 * n);

  double reg_sum = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    const Smoothed s = smooth_abs(a.data()[k], huber_width);
    reg_sum += s.value;
    grad.data()[k] += lambda * s.slope;
  }

  const auto h = acyclicity_h(a);
  grad += (rho * h.value + alpha) * h.gradient;

  PenalizedLoss out;
  out.data_loss = data_sum / (2.0 * n) + lambda * reg_sum;
  out.h = h.value;
  out.value = out.data_loss + 0.5 * rho * h.value * h.value + alpha * h.value;
  out.gradient = std::move(grad);
  return out;
}

SolveResult solve(const Matrix& x, const SolverConfig& cfg, const SolveControl& control) {
  cfg.validate();
  if (x.rows() < 1 || x.cols() < 1) throw Error(ErrorKind::ShapeMismatch, "solve: empty data");
  if (!x.allFinite()) throw Error(ErrorKind::NonFinite, "solve: data contains non-finite values");
  const auto start = std::chrono::steady_clock::now();
  const Index d = x.cols();
  const bool augmented = cfg.penalty == PenaltyMode::AugmentedLagrangian;

  Matrix a = Matrix::Zero(d, d);
  Matrix m1(d, d), m2(d, d);
  double rho = cfg.rho_init;
  double alpha = 0.0;
  double h_prev = std::numeric_limits<double>::infinity();
  long iteration = 0;

  SolveResult result;
  result.objective_trace.push_back({0, objective(x, a, cfg.lambda), 0.0, rho});

  for (int round = 0; round < cfg.max_outer; ++round) {
    m1.setZero();
    m2.setZero();
    double beta1_pow = 1.0, beta2_pow = 1.0;
    double window_start_value = std::numeric_limits<double>::quiet_NaN();

    for (int t = 1; t <= cfg.max_inner; ++t) {
      PenalizedLoss pl = penalized_loss(x, a, cfg.lambda, rho, alpha);
      ++iteration;
      if (!std::isfinite(pl.value) || !pl.gradient.allFinite()) {
        throw Error(ErrorKind::NonFinite,
                    "solve: loss became non-finite at iteration " + std::to_string(iteration));
      }
      if (control.deadline && (t % 64) == 0 && std::chrono::steady_clock::now() > *control.deadline)
        throw Error(ErrorKind::Timeout, "solve: deadline exceeded at iteration " + std::to_string(iteration));
      if (t % cfg.log_every == 0) result.objective_trace.push_back({iteration, pl.data_loss, pl.h, rho});

      if ((t - 1) % cfg.inner_window == 0) {
        if (std::isfinite(window_start_value)) {
          const double scale = std::max(std::abs(pl.value), std::numeric_limits<double>::min());
          if (std::abs(pl.value - window_start_value) <= cfg.inner_rel_tol * scale) break;
        }
        window_start_value = pl.value;
      }

      Matrix& g = pl.gradient;
      g.diagonal().setZero();
      beta1_pow *= cfg.adam_beta1;
      beta2_pow *= cfg.adam_beta2;
      m1 = cfg.adam_beta1 * m1 + (1.0 - cfg.adam_beta1) * g;
      m2 = cfg.adam_beta2 * m2 + (1.0 - cfg.adam_beta2) * g.cwiseProduct(g);
      const double step = cfg.learning_rate / (1.0 - beta1_pow);
      const double v_corr = 1.0 / (1.0 - beta2_pow);
      a.array() -= step * m1.array() / ((m2.array() * v_corr).sqrt() + cfg.adam_eps);
    }

    const double h_new = acyclicity_h(a).value;
    result.round_h.push_back(h_new);
    result.objective_trace.push_back({iteration, objective(x, a, cfg.lambda), h_new, rho});
    if (h_new < cfg.h_tol) break;
    if (augmented) {
      alpha += rho * h_new;
      if (h_new > 0.25 * h_prev) rho = std::min(rho * cfg.rho_mult, cfg.rho_max);
      h_prev = h_new;
    }
  }

  result.weights_raw = a;
  result.converged = acyclicity_h(a).value < cfg.h_tol;
  Matrix pruned = threshold(a, cfg.omega);
  result.repaired_edges = break_cycles(pruned);
  result.weights = WeightedDag(std::move(pruned));
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace sparserc
