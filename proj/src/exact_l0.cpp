#include "sparserc/exact_l0.hpp"

#include "sparserc/rng.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

namespace sparserc {

namespace {

using ParentMasks = std::array<std::uint32_t, kMaxOracleNodes>;

bool acyclic_masks(const ParentMasks& parents, Index d) {
  std::uint32_t remaining = (1u << d) - 1u;
  while (remaining) {
    std::uint32_t sources = 0;
    for (Index v = 0; v < d; ++v)
      if ((remaining >> v & 1u) && (parents[static_cast<size_t>(v)] & remaining) == 0) sources |= 1u << v;
    if (!sources) return false;
    remaining &= ~sources;
  }
  return true;
}

std::vector<ParentMasks> enumerate_masks(Index d) {
  if (d < 1) throw Error(ErrorKind::InvalidConfig, "enumerate_dags: d must be positive");
  if (d > kMaxOracleNodes)
    throw Error(ErrorKind::TooLarge, "enumerate_dags: d = " + std::to_string(d) + " exceeds 5");
  std::vector<std::pair<Index, Index>> slots;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (i != j) slots.emplace_back(i, j);
  std::vector<ParentMasks> out;
  const std::uint64_t total = std::uint64_t{1} << slots.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    ParentMasks parents{};
    for (size_t s = 0; s < slots.size(); ++s)
      if (bits >> s & 1u) parents[static_cast<size_t>(slots[s].second)] |= 1u << slots[s].first;
    if (acyclic_masks(parents, d)) out.push_back(parents);
  }
  return out;
}

std::vector<Index> mask_members(std::uint32_t mask, Index d) {
  std::vector<Index> out;
  for (Index v = 0; v < d; ++v)
    if (mask >> v & 1u) out.push_back(v);
  return out;
}

struct NodeFit {
  Vector weights;  // one per parent, in increasing parent index
  long l0 = 0;
  bool rank_deficient = false;
  bool exhaustive = true;
};

double binomial(double m, int k) {
  double c = 1.0;
  for (int t = 0; t < k; ++t) c = c * (m - t) / (t + 1);
  return c;
}

template <int K>
NodeFit fit_fixed(const Matrix& xs, const Vector& y, double tol, const L0Config& cfg,
                  std::uint64_t stream) {
  using RowK = Eigen::Matrix<double, 1, K>;
  using VecK = Eigen::Matrix<double, K, 1>;
  using MatK = Eigen::Matrix<double, K, K>;
  const Index n = xs.rows();

  // Rows with an all-zero parent block leave a residual of y whatever the weights.
  std::vector<Index> rows;
  long fixed_zeros = 0;
  for (Index r = 0; r < n; ++r) {
    if ((xs.row(r).array().abs() > tol).any()) {
      rows.push_back(r);
    } else if (std::abs(y(r)) <= tol) {
      ++fixed_zeros;
    }
  }
  const auto m = static_cast<Index>(rows.size());

  auto count_zeros = [&](const VecK& w, long to_beat) {
    long zeros = 0;
    for (Index t = 0; t < m; ++t) {
      const Index r = rows[static_cast<size_t>(t)];
      const double res = y(r) - xs.row(r).template head<K>().dot(w.transpose());
      if (std::abs(res) <= tol) ++zeros;
      if (zeros + (m - t - 1) <= to_beat) return -1L;
    }
    return zeros;
  };

  VecK best_w = VecK::Zero();
  long best_zeros = count_zeros(best_w, -1);

  auto consider = [&](const std::array<Index, K>& pick) {
    MatK sys;
    VecK rhs;
    for (int t = 0; t < K; ++t) {
      const Index r = rows[static_cast<size_t>(pick[static_cast<size_t>(t)])];
      sys.row(t) = RowK(xs.row(r).template head<K>());
      rhs(t) = y(r);
    }
    Eigen::FullPivLU<MatK> lu(sys);
    if (!lu.isInvertible()) return;
    const VecK w = lu.solve(rhs);
    if (!w.allFinite()) return;
    const long zeros = count_zeros(w, best_zeros);
    if (zeros > best_zeros) {
      best_zeros = zeros;
      best_w = w;
    }
  };

  NodeFit fit;
  if (m >= K) {
    std::array<Index, K> pick;
    if (binomial(static_cast<double>(m), K) <= static_cast<double>(cfg.max_subsets)) {
      for (int t = 0; t < K; ++t) pick[static_cast<size_t>(t)] = t;
      for (;;) {
        consider(pick);
        int t = K - 1;
        while (t >= 0 && pick[static_cast<size_t>(t)] == m - K + t) --t;
        if (t < 0) break;
        ++pick[static_cast<size_t>(t)];
        for (int u = t + 1; u < K; ++u) pick[static_cast<size_t>(u)] = pick[static_cast<size_t>(u - 1)] + 1;
      }
    } else {
      fit.exhaustive = false;
      Rng rng(derive_seed(cfg.seed, stream));
      for (long s = 0; s < cfg.max_subsets; ++s) {
        for (int t = 0; t < K; ++t) {
          Index candidate;
          do {
            candidate = static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
          } while (std::find(pick.begin(), pick.begin() + t, candidate) != pick.begin() + t);
          pick[static_cast<size_t>(t)] = candidate;
        }
        consider(pick);
      }
    }
  }

  // Polish on the zero set; the count may only improve.
  std::vector<Index> inliers;
  for (Index r : rows)
    if (std::abs(y(r) - xs.row(r).template head<K>().dot(best_w.transpose())) <= tol) inliers.push_back(r);
  if (static_cast<Index>(inliers.size()) >= K) {
    Eigen::Matrix<double, Eigen::Dynamic, K> sub(static_cast<Index>(inliers.size()), K);
    Vector rhs(static_cast<Index>(inliers.size()));
    for (size_t t = 0; t < inliers.size(); ++t) {
      sub.row(static_cast<Index>(t)) = xs.row(inliers[t]).template head<K>();
      rhs(static_cast<Index>(t)) = y(inliers[t]);
    }
    const VecK polished = sub.colPivHouseholderQr().solve(rhs);
    const long zeros = count_zeros(polished, best_zeros - 1);
    if (polished.allFinite() && zeros >= best_zeros) {
      best_zeros = zeros;
      best_w = polished;
    }
  }

  fit.weights = best_w;
  fit.l0 = static_cast<long>(n) - best_zeros - fixed_zeros;
  return fit;
}

NodeFit fit_node(const Matrix& x, Index j, const std::vector<Index>& parents, double tol,
                 const L0Config& cfg) {
  const Vector y = x.col(j);
  const auto k = static_cast<int>(parents.size());
  if (k == 0) {
    NodeFit fit;
    fit.weights = Vector(0);
    fit.l0 = static_cast<long>((y.array().abs() > tol).count());
    return fit;
  }
  Matrix xs(x.rows(), k);
  for (int t = 0; t < k; ++t) xs.col(t) = x.col(parents[static_cast<size_t>(t)]);

  Eigen::ColPivHouseholderQR<Matrix> qr(xs);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    NodeFit fit;
    fit.rank_deficient = true;
    return fit;
  }
  std::uint64_t stream = static_cast<std::uint64_t>(j);
  for (Index p : parents) stream = stream * 8 + static_cast<std::uint64_t>(p) + 1;
  switch (k) {
    case 1: return fit_fixed<1>(xs, y, tol, cfg, stream);
    case 2: return fit_fixed<2>(xs, y, tol, cfg, stream);
    case 3: return fit_fixed<3>(xs, y, tol, cfg, stream);
    default: return fit_fixed<4>(xs, y, tol, cfg, stream);
  }
}

}  // namespace

std::vector<EdgeSet> enumerate_dags(Index d) {
  std::vector<EdgeSet> out;
  for (const auto& parents : enumerate_masks(d)) {
    EdgeSet edges;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        if (parents[static_cast<size_t>(j)] >> i & 1u) edges.emplace_back(i, j);
    out.push_back(std::move(edges));
  }
  return out;
}

long count_l0(const Matrix& m, double abs_tol) {
  return static_cast<long>((m.array().abs() > abs_tol).count());
}

L0Result solve_l0(const Matrix& x, const L0Config& cfg) {
  const Index d = x.cols();
  if (d > kMaxOracleNodes)
    throw Error(ErrorKind::TooLarge, "solve_l0: d = " + std::to_string(d) + " exceeds 5");
  if (d < 1 || x.rows() < 1) throw Error(ErrorKind::ShapeMismatch, "solve_l0: empty data");
  if (!(cfg.zero_tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "solve_l0: zero_tol must be positive");
  const double tol = cfg.zero_tol * x.cwiseAbs().maxCoeff();

  L0Result result;
  // Per-node fits depend only on (node, parent set), so each is computed once.
  std::map<std::pair<Index, std::uint32_t>, NodeFit> fits;
  auto fit_for = [&](Index j, std::uint32_t mask) -> const NodeFit& {
    auto it = fits.find({j, mask});
    if (it == fits.end()) {
      NodeFit fit = fit_node(x, j, mask_members(mask, d), tol, cfg);
      if (fit.rank_deficient) {
        result.warnings.push_back("RankDeficient: node " + std::to_string(j) + " parent mask " +
                                  std::to_string(mask));
      }
      if (!fit.exhaustive) result.exhaustive = false;
      it = fits.emplace(std::make_pair(j, mask), std::move(fit)).first;
    }
    return it->second;
  };

  std::map<EdgeSet, Matrix> best_by_support;
  long best = -1;
  for (const auto& parents : enumerate_masks(d)) {
    ++result.num_dags_enumerated;
    long total = 0;
    bool eligible = true;
    Matrix w = Matrix::Zero(d, d);
    for (Index j = 0; j < d && eligible; ++j) {
      const std::uint32_t mask = parents[static_cast<size_t>(j)];
      const NodeFit& fit = fit_for(j, mask);
      if (fit.rank_deficient) {
        eligible = false;
        break;
      }
      total += fit.l0;
      const auto members = mask_members(mask, d);
      for (size_t t = 0; t < members.size(); ++t) {
        const double v = fit.weights(static_cast<Index>(t));
        if (std::abs(v) > cfg.prune_tol) w(members[t], j) = v;
      }
    }
    if (!eligible) {
      ++result.rank_deficient_supports;
      continue;
    }
    if (best >= 0 && total > best) continue;
    if (best < 0 || total < best) {
      best = total;
      best_by_support.clear();
    }
    EdgeSet effective;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        if (w(i, j) != 0.0) effective.emplace_back(i, j);
    best_by_support.emplace(std::move(effective), std::move(w));
  }

  result.best_l0 = best;
  for (const auto& [edges, w] : best_by_support) result.ties.push_back(edges);
  result.best_support = best_by_support.begin()->first;
  result.best_weights = best_by_support.begin()->second;
  return result;
}

}  // namespace sparserc
