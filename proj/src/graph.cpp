#include "sparserc/graph.hpp"

#include "sparserc/rng.hpp"

#include <algorithm>
#include <numeric>

namespace sparserc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotADag: return "NotADag";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::Timeout: return "Timeout";
  }
  return "Unknown";
}

WeightedDag::WeightedDag(Matrix weights) : weights_(std::move(weights)) {
  require_square(weights_, "WeightedDag");
  if (!weights_.allFinite()) throw Error(ErrorKind::NonFinite, "WeightedDag: non-finite weight");
  if (!is_acyclic(weights_)) throw Error(ErrorKind::NotADag, "WeightedDag: support has a cycle");
}

WeightedDag WeightedDag::empty(Index d) { return WeightedDag(Matrix::Zero(d, d)); }

Index WeightedDag::edge_count() const noexcept { return (weights_.array() != 0.0).count(); }

const char* to_string(GraphType type) {
  return type == GraphType::ErdosRenyi ? "ER" : "SF";
}

GraphType parse_graph_type(const std::string& name) {
  if (name == "ER" || name == "er" || name == "ErdosRenyi") return GraphType::ErdosRenyi;
  if (name == "SF" || name == "sf" || name == "ScaleFree") return GraphType::ScaleFree;
  throw Error(ErrorKind::InvalidConfig, "unknown graph type '" + name + "'");
}

void GraphGenConfig::validate() const {
  if (d < 1) throw Error(ErrorKind::InvalidConfig, "d must be positive");
  if (edges_per_vertex < 1) throw Error(ErrorKind::InvalidConfig, "edges_per_vertex must be positive");
  if (edges_per_vertex >= d)
    throw Error(ErrorKind::InvalidConfig, "edges_per_vertex must be smaller than d");
  if (!(weight_low > 0.0 && weight_low < weight_high))
    throw Error(ErrorKind::InvalidConfig, "weight range must satisfy 0 < low < high");
}

namespace {

// Edges of a DAG over positions 0..d-1 where every edge goes from a lower to
// a higher position.
std::vector<std::pair<Index, Index>> erdos_renyi_edges(Index d, int m, Rng& rng) {
  const double q = std::min(1.0, 2.0 * m / static_cast<double>(d - 1));
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j)
      if (rng.bernoulli(q)) edges.emplace_back(i, j);
  return edges;
}

// Barabasi-Albert preferential attachment. Nodes 0..m-1 form the seed set;
// each later node attaches to m distinct earlier nodes sampled proportionally
// to degree, and every edge points from the earlier node to the newcomer.
std::vector<std::pair<Index, Index>> scale_free_edges(Index d, int m, Rng& rng) {
  std::vector<std::pair<Index, Index>> edges;
  std::vector<Index> endpoints;
  for (Index t = m; t < d; ++t) {
    std::vector<Index> targets;
    if (t == m) {
      targets.resize(static_cast<size_t>(m));
      std::iota(targets.begin(), targets.end(), Index{0});
    } else {
      while (static_cast<int>(targets.size()) < m) {
        const Index pick = endpoints[rng.below(endpoints.size())];
        if (std::find(targets.begin(), targets.end(), pick) == targets.end()) targets.push_back(pick);
      }
    }
    for (Index s : targets) {
      edges.emplace_back(s, t);
      endpoints.push_back(s);
      endpoints.push_back(t);
    }
  }
  return edges;
}

}  // namespace

WeightedDag generate_random_dag(const GraphGenConfig& cfg) {
  cfg.validate();
  const Index d = cfg.d;
  Rng rng(cfg.seed);

  const auto edges = cfg.graph_type == GraphType::ErdosRenyi
                         ? erdos_renyi_edges(d, cfg.edges_per_vertex, rng)
                         : scale_free_edges(d, cfg.edges_per_vertex, rng);

  // Fisher-Yates relabeling hides the generation order from learners.
  std::vector<Index> label(static_cast<size_t>(d));
  std::iota(label.begin(), label.end(), Index{0});
  for (Index i = d - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(label[static_cast<size_t>(i)], label[static_cast<size_t>(j)]);
  }

  Matrix w = Matrix::Zero(d, d);
  for (const auto& [from, to] : edges) {
    const double magnitude = rng.uniform(cfg.weight_low, cfg.weight_high);
    const double sign = rng.bernoulli(0.5) ? -1.0 : 1.0;
    w(label[static_cast<size_t>(from)], label[static_cast<size_t>(to)]) = sign * magnitude;
  }
  return WeightedDag(std::move(w));
}

namespace {

// Tarjan's strongly connected components on the nonzero support.
std::vector<int> scc_labels(const Matrix& w) {
  const Index d = w.rows();
  std::vector<int> index(static_cast<size_t>(d), -1), low(static_cast<size_t>(d), 0),
      comp(static_cast<size_t>(d), -1);
  std::vector<bool> on_stack(static_cast<size_t>(d), false);
  std::vector<Index> stack;
  int counter = 0;
  int components = 0;

  // Iterative DFS: frames hold (node, next neighbour to inspect).
  std::vector<std::pair<Index, Index>> frames;
  for (Index root = 0; root < d; ++root) {
    if (index[static_cast<size_t>(root)] >= 0) continue;
    frames.emplace_back(root, 0);
    index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<size_t>(root)] = true;
    while (!frames.empty()) {
      auto& [u, next] = frames.back();
      const auto us = static_cast<size_t>(u);
      if (next < d) {
        const Index v = next++;
        const auto vs = static_cast<size_t>(v);
        if (w(u, v) == 0.0) continue;
        if (index[vs] < 0) {
          index[vs] = low[vs] = counter++;
          stack.push_back(v);
          on_stack[vs] = true;
          frames.emplace_back(v, 0);
        } else if (on_stack[vs]) {
          low[us] = std::min(low[us], index[vs]);
        }
        continue;
      }
      if (low[us] == index[us]) {
        for (;;) {
          const Index v = stack.back();
          stack.pop_back();
          on_stack[static_cast<size_t>(v)] = false;
          comp[static_cast<size_t>(v)] = components;
          if (v == u) break;
        }
        ++components;
      }
      const int child_low = low[us];
      frames.pop_back();
      if (!frames.empty()) {
        const auto parent = static_cast<size_t>(frames.back().first);
        low[parent] = std::min(low[parent], child_low);
      }
    }
  }
  return comp;
}

}  // namespace

int break_cycles(Matrix& w) {
  require_square(w, "break_cycles");
  int removed = 0;
  for (Index i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 0.0) {
      w(i, i) = 0.0;
      ++removed;
    }
  }
  while (!is_acyclic(w)) {
    const auto comp = scc_labels(w);
    Index best_i = -1, best_j = -1;
    double best = 0.0;
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j = 0; j < w.cols(); ++j) {
        if (w(i, j) == 0.0 || comp[static_cast<size_t>(i)] != comp[static_cast<size_t>(j)]) continue;
        const double mag = std::abs(w(i, j));
        if (best_i < 0 || mag < best) {
          best = mag;
          best_i = i;
          best_j = j;
        }
      }
    }
    w(best_i, best_j) = 0.0;
    ++removed;
  }
  return removed;
}

std::vector<Edge> edge_list(const Matrix& w) {
  std::vector<Edge> edges;
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j)
      if (w(i, j) != 0.0) edges.push_back({i, j, w(i, j)});
  return edges;
}

}  // namespace sparserc
