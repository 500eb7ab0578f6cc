#include "sparserc/metrics.hpp"

#include "sparserc/graph.hpp"
#include "sparserc/io.hpp"

#include <algorithm>
#include <deque>

namespace sparserc {

namespace {

void require_same(const BinaryMatrix& a, const BinaryMatrix& b, const char* context) {
  if (a.rows() != a.cols() || a.rows() != b.rows() || b.rows() != b.cols())
    throw Error(ErrorKind::ShapeMismatch, std::string(context) + ": adjacency shapes disagree");
}

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// reach(i, j): a directed path i -> ... -> j exists; reach(i, i) is true.
BoolMatrix reachability(const BinaryMatrix& g, const std::vector<Index>& order) {
  const Index d = g.rows();
  BoolMatrix reach = BoolMatrix::Identity(d, d);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Index u = *it;
    for (Index v = 0; v < d; ++v)
      if (g(u, v) != 0) reach.row(u) = reach.row(u).array() || reach.row(v).array();
  }
  return reach;
}

// Bayes-ball: is `target` d-connected to `source` given `given` in graph g?
bool d_connected(const BinaryMatrix& g, Index source, Index target, const std::vector<bool>& given) {
  const Index d = g.rows();
  std::vector<bool> anc(static_cast<size_t>(d), false);
  std::deque<Index> queue;
  for (Index v = 0; v < d; ++v) {
    if (given[static_cast<size_t>(v)]) {
      anc[static_cast<size_t>(v)] = true;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const Index v = queue.front();
    queue.pop_front();
    for (Index u = 0; u < d; ++u) {
      if (g(u, v) != 0 && !anc[static_cast<size_t>(u)]) {
        anc[static_cast<size_t>(u)] = true;
        queue.push_back(u);
      }
    }
  }

  // state = 2 * node + direction; direction 0 = arrived from a child (up),
  // 1 = arrived from a parent (down).
  std::vector<bool> seen(static_cast<size_t>(2 * d), false);
  std::deque<std::pair<Index, int>> frontier{{source, 0}};
  seen[static_cast<size_t>(2 * source)] = true;
  auto visit = [&](Index v, int dir) {
    auto s = seen[static_cast<size_t>(2 * v + dir)];
    if (!s) {
      s = true;
      frontier.emplace_back(v, dir);
    }
  };
  while (!frontier.empty()) {
    const auto [v, dir] = frontier.front();
    frontier.pop_front();
    const bool observed = given[static_cast<size_t>(v)];
    if (v == target && !observed) return true;
    if (dir == 0 && !observed) {
      for (Index u = 0; u < d; ++u) {
        if (g(u, v) != 0) visit(u, 0);
        if (g(v, u) != 0) visit(u, 1);
      }
    } else if (dir == 1) {
      if (!observed)
        for (Index u = 0; u < d; ++u)
          if (g(v, u) != 0) visit(u, 1);
      if (anc[static_cast<size_t>(v)])
        for (Index u = 0; u < d; ++u)
          if (g(u, v) != 0) visit(u, 0);
    }
  }
  return false;
}

}  // namespace

long shd(const BinaryMatrix& est, const BinaryMatrix& truth) {
  require_same(est, truth, "shd");
  long distance = 0;
  const Index d = est.rows();
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      const bool same = (est(i, j) != 0) == (truth(i, j) != 0) && (est(j, i) != 0) == (truth(j, i) != 0);
      if (!same) ++distance;
    }
  }
  return distance;
}

std::optional<long> sid(const BinaryMatrix& est, const BinaryMatrix& truth) {
  require_same(est, truth, "sid");
  const auto truth_order = topological_order(truth.cast<double>());
  if (!truth_order) throw Error(ErrorKind::NotADag, "sid: ground truth has a cycle");
  if (!is_acyclic(est.cast<double>())) return std::nullopt;

  const Index d = truth.rows();
  const BoolMatrix reach = reachability(truth, *truth_order);
  long mistakes = 0;
  for (Index i = 0; i < d; ++i) {
    std::vector<bool> parents(static_cast<size_t>(d), false);
    for (Index k = 0; k < d; ++k) parents[static_cast<size_t>(k)] = est(k, i) != 0;

    for (Index j = 0; j < d; ++j) {
      if (j == i) continue;
      if (parents[static_cast<size_t>(j)]) {
        // The estimate asserts no effect of i on j.
        if (reach(i, j)) ++mistakes;
        continue;
      }
      // Nodes other than i on directed paths i -> ... -> j.
      std::vector<Index> forbidden;
      for (Index w = 0; w < d; ++w)
        if (w != i && reach(i, w) && reach(w, j)) forbidden.push_back(w);

      bool valid = true;
      for (Index w : forbidden) {
        for (Index z = 0; z < d && valid; ++z)
          if (parents[static_cast<size_t>(z)] && reach(w, z)) valid = false;
        if (!valid) break;
      }
      if (valid) {
        BinaryMatrix backdoor = truth;
        for (Index w : forbidden) backdoor(i, w) = 0;
        valid = !d_connected(backdoor, i, j, parents);
      }
      if (!valid) ++mistakes;
    }
  }
  return mistakes;
}

EdgeRates edge_rates(const BinaryMatrix& est, const BinaryMatrix& truth) {
  require_same(est, truth, "edge_rates");
  const Index d = est.rows();
  long true_edges = 0, hits = 0, extras = 0, total = 0;
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const bool e = est(i, j) != 0, t = truth(i, j) != 0;
      true_edges += t;
      total += e;
      hits += e && t;
      extras += e && !t;
    }
  }
  EdgeRates rates;
  rates.total_edges = total;
  if (true_edges > 0) rates.tpr = static_cast<double>(hits) / static_cast<double>(true_edges);
  const long negatives = static_cast<long>(d * (d - 1)) - true_edges;
  rates.fpr = negatives > 0 ? static_cast<double>(extras) / static_cast<double>(negatives) : 0.0;
  return rates;
}

WeightLosses weight_losses(const Matrix& est, const Matrix& truth, long edge_count) {
  require_same_shape(est, truth, "weight_losses");
  if (edge_count <= 0) throw Error(ErrorKind::DegenerateInput, "weight_losses: truth has no edges");
  const double truth_norm = truth.norm();
  if (truth_norm == 0.0) throw Error(ErrorKind::DegenerateInput, "weight_losses: truth is zero");
  const Matrix diff = truth - est;
  const double edges = static_cast<double>(edge_count);
  return {diff.cwiseAbs().sum() / edges, diff.cwiseAbs().maxCoeff(), diff.norm() / edges,
          diff.norm() / truth_norm};
}

double varsortability(const Matrix& x, const BinaryMatrix& truth, double tol) {
  if (x.cols() != truth.rows() || truth.rows() != truth.cols())
    throw Error(ErrorKind::ShapeMismatch, "varsortability: data and graph disagree");
  if (x.rows() < 2) throw Error(ErrorKind::DegenerateInput, "varsortability: need n >= 2");
  if (!is_acyclic(truth.cast<double>())) throw Error(ErrorKind::NotADag, "varsortability: cyclic truth");

  const Index d = truth.rows();
  const Vector mean = x.colwise().mean();
  const Vector var = (x.rowwise() - mean.transpose()).array().square().colwise().mean();
  const BinaryMatrix edges = (truth.array() != 0).cast<int>();
  BinaryMatrix paths = edges;
  double ordered = 0.0;
  long pairs = 0;
  for (Index k = 1; k < d; ++k) {
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        if (paths(i, j) == 0) continue;
        ++pairs;
        if (var(j) > var(i) * (1.0 + tol)) {
          ordered += 1.0;
        } else if (var(j) > var(i) * (1.0 - tol)) {
          ordered += 0.5;
        }
      }
    }
    paths = ((paths * edges).array() != 0).cast<int>();
    if (paths.isZero()) break;
  }
  if (pairs == 0) throw Error(ErrorKind::DegenerateInput, "varsortability: graph has no edges");
  return ordered / static_cast<double>(pairs);
}

RootCauseScores root_cause_metrics(const Matrix& c_est, const Matrix& c_true, double support_frac) {
  require_same_shape(c_est, c_true, "root_cause_metrics");
  if (!(support_frac > 0.0 && support_frac < 1.0))
    throw Error(ErrorKind::InvalidConfig, "root_cause_metrics: support_frac must lie in (0, 1)");
  const double true_norm = c_true.norm();
  if (true_norm == 0.0) throw Error(ErrorKind::DegenerateInput, "root_cause_metrics: true C is zero");

  const double est_cut = support_frac * c_est.cwiseAbs().maxCoeff();
  const double true_cut = support_frac * c_true.cwiseAbs().maxCoeff();
  long positives = 0, hits = 0, extras = 0;
  for (Index k = 0; k < c_true.size(); ++k) {
    const bool e = std::abs(c_est.data()[k]) > est_cut;
    const bool t = std::abs(c_true.data()[k]) > true_cut;
    positives += t;
    hits += e && t;
    extras += e && !t;
  }
  const long negatives = static_cast<long>(c_true.size()) - positives;
  RootCauseScores scores;
  scores.c_tpr = static_cast<double>(hits) / static_cast<double>(positives);
  scores.c_fpr = negatives > 0 ? static_cast<double>(extras) / static_cast<double>(negatives) : 0.0;
  scores.c_nmse = (c_est - c_true).norm() / true_norm;
  return scores;
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> columns = {
      "method", "seed",   "d",      "n",      "shd",   "sid",   "tpr",
      "fpr",    "total_edges", "nmse", "avg_l1", "max_l1", "avg_l2", "c_tpr",
      "c_fpr",  "c_nmse", "varsortability", "runtime_s"};
  return columns;
}

namespace {

template <typename T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return "na";
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

std::optional<double> parse_opt_double(const std::string& s) {
  if (s == "na") return std::nullopt;
  return parse_double(s);
}

}  // namespace

std::vector<std::string> to_csv_fields(const MetricsReport& r) {
  return {r.method,
          std::to_string(r.seed),
          std::to_string(r.d),
          std::to_string(r.n),
          std::to_string(r.shd),
          opt_field(r.sid),
          opt_field(r.tpr),
          format_double(r.fpr),
          std::to_string(r.total_edges),
          opt_field(r.nmse_weights),
          opt_field(r.avg_l1),
          opt_field(r.max_l1),
          opt_field(r.avg_l2),
          opt_field(r.c_tpr),
          opt_field(r.c_fpr),
          opt_field(r.c_nmse),
          opt_field(r.varsortability),
          format_double(r.runtime_seconds)};
}

MetricsReport metrics_from_csv_fields(const std::vector<std::string>& f) {
  if (f.size() < metrics_columns().size())
    throw Error(ErrorKind::ParseError, "metrics row has " + std::to_string(f.size()) + " fields");
  MetricsReport r;
  r.method = f[0];
  r.seed = parse_uint64(f[1]);
  r.d = static_cast<Index>(parse_int(f[2]));
  r.n = static_cast<Index>(parse_int(f[3]));
  r.shd = static_cast<long>(parse_int(f[4]));
  if (f[5] != "na") r.sid = static_cast<long>(parse_int(f[5]));
  r.tpr = parse_opt_double(f[6]);
  r.fpr = parse_double(f[7]);
  r.total_edges = static_cast<long>(parse_int(f[8]));
  r.nmse_weights = parse_opt_double(f[9]);
  r.avg_l1 = parse_opt_double(f[10]);
  r.max_l1 = parse_opt_double(f[11]);
  r.avg_l2 = parse_opt_double(f[12]);
  r.c_tpr = parse_opt_double(f[13]);
  r.c_fpr = parse_opt_double(f[14]);
  r.c_nmse = parse_opt_double(f[15]);
  r.varsortability = parse_opt_double(f[16]);
  r.runtime_seconds = parse_double(f[17]);
  return r;
}

}  // namespace sparserc
