#pragma once

#include "sparserc/core.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sparserc {

/// Directed edges (from, to), sorted lexicographically.
using EdgeSet = std::vector<std::pair<Index, Index>>;

inline constexpr Index kMaxOracleNodes = 5;

/// Every labeled DAG on d nodes, each exactly once. Throws TooLarge for d > 5.
std::vector<EdgeSet> enumerate_dags(Index d);

struct L0Config {
  /// Entries with |value| <= zero_tol * max|X| count as zero.
  double zero_tol = 1e-7;
  /// Fitted weights with magnitude <= prune_tol are treated as absent edges.
  double prune_tol = 1e-8;
  /// Per-node fits enumerate all k-row subsets up to this many; beyond that a
  /// seeded random sample of this size is drawn and the result is flagged.
  long max_subsets = 2'000'000;
  std::uint64_t seed = 0;
};

struct L0Result {
  EdgeSet best_support;
  Matrix best_weights;
  long best_l0 = 0;
  long num_dags_enumerated = 0;
  /// Distinct supports achieving best_l0.
  std::vector<EdgeSet> ties;
  /// Supports with collinear parent columns; counted but never selected.
  long rank_deficient_supports = 0;
  std::vector<std::string> warnings;
  /// False when some per-node fit had to sample row subsets.
  bool exhaustive = true;
};

/// Number of entries of `m` with magnitude above `abs_tol`.
long count_l0(const Matrix& m, double abs_tol);

/// Brute-force minimizer of ||X(I - A)||_0 over acyclic A. Each node is fitted
/// on each candidate parent set by exact L0 regression: every k-row subset
/// determines a weight vector, and the one zeroing the most residuals wins.
L0Result solve_l0(const Matrix& x, const L0Config& cfg = {});

}  // namespace sparserc
