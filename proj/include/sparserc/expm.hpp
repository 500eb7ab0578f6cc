#pragma once

#include "sparserc/core.hpp"

#include <cmath>
#include <limits>

namespace sparserc {

/// Matrix exponential by scaling and squaring around a Taylor core.
///
/// The argument is scaled by 2^-s with s = ceil(log2 ||M||_inf) so the series
/// converges quickly; terms are summed until their max-norm drops below
/// `term_tol` relative to the partial sum, then the result is squared s times.
/// Intended for the nonnegative matrices that appear in the acyclicity
/// penalty, where the Taylor series has no cancellation.
template <typename Derived>
MatrixX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& m,
                                       typename Derived::Scalar term_tol = 1e-16) {
  using Scalar = typename Derived::Scalar;
  require_square(m, "expm");
  const Index d = m.rows();
  if (d == 0) return MatrixX<Scalar>(0, 0);
  const Scalar norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > Scalar(1)) squarings = static_cast<int>(std::ceil(std::log2(norm)));
  const MatrixX<Scalar> scaled = m / std::ldexp(Scalar(1), squarings);

  MatrixX<Scalar> result = MatrixX<Scalar>::Identity(d, d);
  MatrixX<Scalar> term = MatrixX<Scalar>::Identity(d, d);
  for (int k = 1; k < 64; ++k) {
    term = (term * scaled) / Scalar(k);
    result += term;
    const Scalar term_norm = term.cwiseAbs().maxCoeff();
    if (term_norm <= term_tol * result.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace sparserc
