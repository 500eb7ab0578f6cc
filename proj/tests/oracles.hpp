#pragma once

// Independent reference implementations used only by the tests.

#include "sparserc/core.hpp"
#include "sparserc/graph.hpp"
#include "sparserc/rng.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace oracle {

using sparserc::Index;
using sparserc::Matrix;

/// Pollution river network: A -> B, A -> C, B -> D, C -> D, D -> E, D -> F.
inline Matrix pollution_dag() {
  Matrix a = Matrix::Zero(6, 6);
  a(0, 1) = 0.5;
  a(0, 2) = 0.5;
  a(1, 3) = 0.8;
  a(2, 3) = 0.3;
  a(3, 4) = 0.7;
  a(3, 5) = 0.1;
  return a;
}

/// Path-sum closure by dynamic programming along a topological order.
inline Matrix closure_dp(const Matrix& a) {
  const Index d = a.rows();
  const auto order = sparserc::topological_order(a);
  Matrix c = Matrix::Zero(d, d);
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const Index i = *it;
    for (Index k = 0; k < d; ++k) {
      if (a(i, k) == 0.0) continue;
      c(i, k) += a(i, k);
      c.row(i) += a(i, k) * c.row(k);
    }
  }
  return c;
}

/// Random DAG over a random permutation with edge density `q` and weights in
/// +-[0.1, 0.9].
inline Matrix random_dag(Index d, double q, std::uint64_t seed) {
  sparserc::Rng rng(seed);
  std::vector<Index> perm(static_cast<size_t>(d));
  for (Index i = 0; i < d; ++i) perm[static_cast<size_t>(i)] = i;
  for (Index i = d - 1; i > 0; --i)
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  Matrix a = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j)
      if (rng.bernoulli(q)) {
        const double w = rng.uniform(0.1, 0.9) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
        a(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]) = w;
      }
  return a;
}

/// Cycle test by depth-first search for a back edge.
inline bool has_cycle_dfs(const Matrix& a, double tol = 0.0) {
  const Index d = a.rows();
  std::vector<int> color(static_cast<size_t>(d), 0);
  std::function<bool(Index)> visit = [&](Index v) {
    color[static_cast<size_t>(v)] = 1;
    for (Index u = 0; u < d; ++u) {
      if (std::abs(a(v, u)) <= tol) continue;
      if (color[static_cast<size_t>(u)] == 1) return true;
      if (color[static_cast<size_t>(u)] == 0 && visit(u)) return true;
    }
    color[static_cast<size_t>(v)] = 2;
    return false;
  };
  for (Index v = 0; v < d; ++v)
    if (color[static_cast<size_t>(v)] == 0 && visit(v)) return true;
  return false;
}

/// Labeled DAG count by the inclusion-exclusion recurrence over sink sets.
inline long dag_count(int n) {
  std::vector<long> a(static_cast<size_t>(n + 1), 0);
  a[0] = 1;
  auto binom = [](int m, int k) {
    long c = 1;
    for (int t = 0; t < k; ++t) c = c * (m - t) / (t + 1);
    return c;
  };
  for (int m = 1; m <= n; ++m) {
    long s = 0;
    for (int k = 1; k <= m; ++k) {
      const long term = binom(m, k) * (1L << (k * (m - k))) * a[static_cast<size_t>(m - k)];
      s += (k % 2 == 1) ? term : -term;
    }
    a[static_cast<size_t>(m)] = s;
  }
  return a[static_cast<size_t>(n)];
}

using Graph = Eigen::MatrixXi;

/// All simple paths in the skeleton of g between s and t, as node sequences.
inline void skeleton_paths(const Graph& g, Index s, Index t, std::vector<Index>& cur, std::vector<bool>& used,
                           std::vector<std::vector<Index>>& out) {
  const Index v = cur.back();
  if (v == t) {
    out.push_back(cur);
    return;
  }
  for (Index u = 0; u < g.rows(); ++u) {
    if (used[static_cast<size_t>(u)] || (g(v, u) == 0 && g(u, v) == 0)) continue;
    used[static_cast<size_t>(u)] = true;
    cur.push_back(u);
    skeleton_paths(g, s, t, cur, used, out);
    cur.pop_back();
    used[static_cast<size_t>(u)] = false;
  }
}

inline Graph reachability(const Graph& g) {
  const Index d = g.rows();
  Graph r = g;
  for (Index k = 0; k < d; ++k)
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        if (r(i, k) && r(k, j)) r(i, j) = 1;
  return r;
}

/// Path blocked by z in g under the d-separation rules.
inline bool path_blocked(const Graph& g, const Graph& reach, const std::vector<Index>& path,
                         const std::vector<bool>& in_z) {
  for (size_t k = 1; k + 1 < path.size(); ++k) {
    const Index prev = path[k - 1], v = path[k], next = path[k + 1];
    const bool collider = g(prev, v) && g(next, v);
    if (collider) {
      bool opened = in_z[static_cast<size_t>(v)];
      for (Index w = 0; w < g.rows() && !opened; ++w)
        if (in_z[static_cast<size_t>(w)] && reach(v, w)) opened = true;
      if (!opened) return true;
    } else if (in_z[static_cast<size_t>(v)]) {
      return true;
    }
  }
  return false;
}

/// Structural intervention distance by explicit path enumeration: for every
/// ordered pair (i, j), Z = parents of i in the estimate must satisfy the
/// adjustment criterion in the truth; if j is a parent of i in the estimate,
/// the estimate claims no effect, which is wrong exactly when j descends from i.
inline long sid_bruteforce(const Graph& est, const Graph& truth) {
  const Index d = truth.rows();
  const Graph reach = reachability(truth);
  long mistakes = 0;
  for (Index i = 0; i < d; ++i) {
    std::vector<bool> in_z(static_cast<size_t>(d), false);
    for (Index p = 0; p < d; ++p)
      if (est(p, i)) in_z[static_cast<size_t>(p)] = true;
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      if (in_z[static_cast<size_t>(j)]) {
        if (reach(i, j)) ++mistakes;
        continue;
      }
      // Nodes on directed i -> j paths other than i.
      std::vector<bool> forbidden(static_cast<size_t>(d), false);
      for (Index w = 0; w < d; ++w)
        if (w != i && reach(i, w) && (w == j || reach(w, j))) forbidden[static_cast<size_t>(w)] = true;
      bool valid = true;
      for (Index z = 0; z < d && valid; ++z) {
        if (!in_z[static_cast<size_t>(z)]) continue;
        if (forbidden[static_cast<size_t>(z)]) valid = false;
        for (Index f = 0; f < d && valid; ++f)
          if (forbidden[static_cast<size_t>(f)] && reach(f, z)) valid = false;
      }
      if (valid) {
        // Every non-causal path from i to j must be blocked: paths whose first
        // edge points into i, or any path not fully directed i -> j.
        std::vector<std::vector<Index>> paths;
        std::vector<Index> cur{i};
        std::vector<bool> used(static_cast<size_t>(d), false);
        used[static_cast<size_t>(i)] = true;
        skeleton_paths(truth, i, j, cur, used, paths);
        for (const auto& path : paths) {
          bool directed = true;
          for (size_t k = 0; k + 1 < path.size(); ++k)
            if (!truth(path[k], path[k + 1])) directed = false;
          if (directed) continue;
          if (!path_blocked(truth, reach, path, in_z)) {
            valid = false;
            break;
          }
        }
      }
      if (!valid) ++mistakes;
    }
  }
  return mistakes;
}

}  // namespace oracle
