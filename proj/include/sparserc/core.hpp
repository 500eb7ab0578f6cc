#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sparserc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class ErrorKind {
  InvalidConfig,
  ShapeMismatch,
  DegenerateInput,
  NonFinite,
  TooLarge,
  NotADag,
  ParseError,
  IoError,
  Timeout,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <typename A, typename B>
void require_same_shape(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                        const char* context) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::ShapeMismatch,
                std::string(context) + ": " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

template <typename A>
void require_square(const Eigen::MatrixBase<A>& a, const char* context) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::ShapeMismatch, std::string(context) + ": matrix is not square");
  }
}

}  // namespace sparserc
