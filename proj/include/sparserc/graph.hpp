#pragma once

#include "sparserc/core.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace sparserc {

/// Weighted adjacency of a DAG; entry (i, j) is the weight of edge i -> j.
/// Construction validates acyclicity, so every instance satisfies it.
class WeightedDag {
 public:
  WeightedDag() = default;
  explicit WeightedDag(Matrix weights);

  /// Empty graph on `d` nodes.
  static WeightedDag empty(Index d);

  Index d() const noexcept { return weights_.rows(); }
  const Matrix& weights() const noexcept { return weights_; }
  Index edge_count() const noexcept;

  bool operator==(const WeightedDag& other) const { return weights_ == other.weights_; }

 private:
  Matrix weights_;
};

enum class GraphType { ErdosRenyi, ScaleFree };

const char* to_string(GraphType type);
GraphType parse_graph_type(const std::string& name);

struct GraphGenConfig {
  Index d = 20;
  GraphType graph_type = GraphType::ErdosRenyi;
  int edges_per_vertex = 4;
  double weight_low = 0.1;
  double weight_high = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
};

WeightedDag generate_random_dag(const GraphGenConfig& cfg);

/// Kahn's algorithm over entries with |w| > tol. Empty result means the
/// support has a cycle (for d > 0).
template <typename Derived>
std::optional<std::vector<Index>> topological_order(const Eigen::MatrixBase<Derived>& w,
                                                    typename Derived::Scalar tol = 0) {
  require_square(w, "topological_order");
  const Index d = w.rows();
  std::vector<Index> indegree(static_cast<size_t>(d), 0);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i)
      if (std::abs(w(i, j)) > tol) ++indegree[static_cast<size_t>(j)];
  std::vector<Index> order;
  order.reserve(static_cast<size_t>(d));
  for (Index i = 0; i < d; ++i)
    if (indegree[static_cast<size_t>(i)] == 0) order.push_back(i);
  for (size_t head = 0; head < order.size(); ++head) {
    const Index u = order[head];
    for (Index v = 0; v < d; ++v) {
      if (std::abs(w(u, v)) > tol && --indegree[static_cast<size_t>(v)] == 0) order.push_back(v);
    }
  }
  if (static_cast<Index>(order.size()) != d) return std::nullopt;
  return order;
}

template <typename Derived>
bool is_acyclic(const Eigen::MatrixBase<Derived>& w, typename Derived::Scalar tol = 0) {
  return topological_order(w, tol).has_value();
}

/// Entries with |w| < omega are zeroed; |w| == omega is kept.
template <typename Derived>
MatrixX<typename Derived::Scalar> threshold(const Eigen::MatrixBase<Derived>& w,
                                            typename Derived::Scalar omega) {
  require_square(w, "threshold");
  return (w.array().abs() < omega).select(typename Derived::Scalar(0), w);
}

/// Weighted transitive closure A + A^2 + ... + A^(d-1) of a nilpotent A,
/// accumulated as (I + A)(I + A^2)(I + A^4)... - I.
template <typename Derived>
MatrixX<typename Derived::Scalar> transitive_closure(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  require_square(a, "transitive_closure");
  const Index d = a.rows();
  const MatrixX<Scalar> eye = MatrixX<Scalar>::Identity(d, d);
  MatrixX<Scalar> power = a;
  MatrixX<Scalar> acc = eye + power;
  for (Index covered = 2; covered < d; covered *= 2) {
    power = power * power;
    acc = acc * (eye + power);
  }
  acc -= eye;
  return acc;
}

inline Matrix transitive_closure(const WeightedDag& g) { return transitive_closure(g.weights()); }

/// Removes the smallest-magnitude edge lying on a cycle until the support is
/// acyclic. Returns the number of removed edges.
int break_cycles(Matrix& w);

/// Binary support (1 where w != 0).
template <typename Derived>
Eigen::MatrixXi support(const Eigen::MatrixBase<Derived>& w) {
  return (w.array() != typename Derived::Scalar(0)).template cast<int>();
}

struct Edge {
  Index from;
  Index to;
  double weight;
};

std::vector<Edge> edge_list(const Matrix& w);

}  // namespace sparserc
