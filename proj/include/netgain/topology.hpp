#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <utility>
#include <vector>

#include "netgain/random.hpp"
#include "netgain/types.hpp"

namespace netgain {

/// One undirected edge with a strictly positive weight. Node ids are 0-based
/// internally; serialization shifts to 1-based at the boundary.
template <typename Scalar = double>
struct Edge {
  Index i = 0;
  Index j = 0;
  Scalar weight = Scalar(1);
};

/// Weighted undirected graph split into two subnetworks. Network 1 owns nodes
/// [0, split()), Network 2 owns [split(), size()). The edge list is the source
/// of truth; the adjacency matrix is rebuilt from it on construction, so the
/// two views can never disagree. Edges are stored canonically: i < j, sorted
/// lexicographically.
template <typename Scalar = double>
class Topology {
 public:
  Topology(Index n_total, Index split, std::vector<Edge<Scalar>> edges)
      : n_(n_total), split_(split) {
    detail::require(n_total >= 2, "Topology: need at least 2 nodes");
    detail::require(split >= 1 && split < n_total,
                    "Topology: split must satisfy 1 <= split < n_total");
    for (auto& e : edges) {
      detail::require(e.i >= 0 && e.i < n_ && e.j >= 0 && e.j < n_,
                      "Topology: edge endpoint out of range");
      detail::require(e.i != e.j, "Topology: self-loops are not allowed");
      detail::require(e.weight > Scalar(0), "Topology: edge weights must be positive");
      if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge<Scalar>& a, const Edge<Scalar>& b) {
      return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (std::size_t m = 1; m < edges.size(); ++m) {
      detail::require(edges[m - 1].i != edges[m].i || edges[m - 1].j != edges[m].j,
                      "Topology: duplicate edge");
    }
    edges_ = std::move(edges);
    adj_ = MatrixX<Scalar>::Zero(n_, n_);
    for (const auto& e : edges_) {
      adj_(e.i, e.j) = e.weight;
      adj_(e.j, e.i) = e.weight;
    }
  }

  /// Builds from a symmetric nonnegative matrix with zero diagonal.
  static Topology from_adjacency(Index split, const MatrixX<Scalar>& a) {
    detail::require(a.rows() == a.cols(), "Topology: adjacency must be square");
    const Index n = a.rows();
    std::vector<Edge<Scalar>> edges;
    for (Index i = 0; i < n; ++i) {
      detail::require(a(i, i) == Scalar(0), "Topology: adjacency diagonal must be zero");
      for (Index j = i + 1; j < n; ++j) {
        detail::require(a(i, j) == a(j, i), "Topology: adjacency must be symmetric");
        detail::require(a(i, j) >= Scalar(0), "Topology: adjacency must be nonnegative");
        if (a(i, j) > Scalar(0)) edges.push_back({i, j, a(i, j)});
      }
    }
    return Topology(n, split, std::move(edges));
  }

  Index size() const { return n_; }
  Index split() const { return split_; }
  const MatrixX<Scalar>& adjacency() const { return adj_; }
  const std::vector<Edge<Scalar>>& edges() const { return edges_; }

  bool in_network1(Index v) const { return v < split_; }
  bool has_edge(Index i, Index j) const { return adj_(i, j) > Scalar(0); }

  /// True when the node has at least one edge crossing the partition.
  bool is_border(Index v) const {
    for (const auto& e : edges_) {
      if (e.i == v && in_network1(e.i) != in_network1(e.j)) return true;
      if (e.j == v && in_network1(e.i) != in_network1(e.j)) return true;
    }
    return false;
  }

  Topology with_edge(Index i, Index j, Scalar weight) const {
    auto edges = edges_;
    edges.push_back({i, j, weight});
    return Topology(n_, split_, std::move(edges));
  }

  bool connected() const {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<Index> stack = {0};
    seen[0] = 1;
    Index count = 1;
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (Index w = 0; w < n_; ++w) {
        if (adj_(v, w) > Scalar(0) && !seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n_;
  }

 private:
  Index n_;
  Index split_;
  std::vector<Edge<Scalar>> edges_;
  MatrixX<Scalar> adj_;
};

/// Unordered node pairs an attacker may still connect: every non-adjacent
/// pair. Listed with i < j in lexicographic order, which fixes the scan
/// order (and hence tie-breaking) everywhere downstream.
struct CandidateEdgeSet {
  std::vector<std::pair<Index, Index>> pairs;
};

template <typename Scalar>
CandidateEdgeSet candidate_edges(const Topology<Scalar>& t) {
  CandidateEdgeSet c;
  const Index n = t.size();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (!t.has_edge(i, j)) c.pairs.emplace_back(i, j);
  return c;
}

template <typename Scalar = double>
struct MatrixNorms {
  Scalar one_norm;    // max absolute column sum
  Scalar two_norm;    // largest singular value
  Scalar entry_l1;    // sum of absolute values of all entries
};

template <typename Derived>
MatrixNorms<typename Derived::Scalar> matrix_norms(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixNorms<Scalar> r{Scalar(0), Scalar(0), Scalar(0)};
  if (m.rows() == 0 || m.cols() == 0) return r;
  const MatrixX<Scalar> a = m;
  r.one_norm = a.cwiseAbs().colwise().sum().maxCoeff();
  r.entry_l1 = a.cwiseAbs().sum();
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(a);
  r.two_norm = svd.singularValues()(0);
  return r;
}

/// Damped random-walk centrality over weighted degrees. Columns with zero
/// degree teleport all their mass. Returns a positive vector summing to 1.
template <typename Scalar>
VectorX<Scalar> pagerank(const Topology<Scalar>& t, Scalar damping = Scalar(0.85)) {
  detail::require(damping > Scalar(0) && damping < Scalar(1),
                  "pagerank: damping must lie in (0, 1)");
  const Index n = t.size();
  const MatrixX<Scalar>& a = t.adjacency();
  VectorX<Scalar> deg = a.colwise().sum();
  VectorX<Scalar> invdeg = VectorX<Scalar>::Zero(n);
  for (Index j = 0; j < n; ++j)
    if (deg(j) > Scalar(0)) invdeg(j) = Scalar(1) / deg(j);

  VectorX<Scalar> x = VectorX<Scalar>::Constant(n, Scalar(1) / Scalar(n));
  const Scalar nn = Scalar(n);
  for (int it = 0; it < 100000; ++it) {
    Scalar dangling = Scalar(0);
    for (Index j = 0; j < n; ++j)
      if (deg(j) == Scalar(0)) dangling += x(j);
    VectorX<Scalar> next = damping * (a * x.cwiseProduct(invdeg));
    next.array() += (Scalar(1) - damping) / nn + damping * dangling / nn;
    next /= next.sum();
    const Scalar delta = (next - x).template lpNorm<1>();
    x = next;
    if (delta < Scalar(1e-13)) return x;
  }
  throw NumericalError("pagerank: power iteration did not converge");
}

template <typename Scalar = double>
struct TopologyGeneratorSpec {
  Index n_total = 22;
  Index split = 11;
  double edge_prob = 0.3;        // within-subnetwork wiring probability
  Index intra_edges = 3;         // edges crossing the partition
  Scalar weight = Scalar(1);
};

namespace detail {

// Erdos-Renyi block over nodes [lo, hi), resampled until connected.
template <typename Scalar>
void er_block(std::vector<Edge<Scalar>>& out, Index lo, Index hi, double p, Scalar w, Rng& rng) {
  const Index n = hi - lo;
  if (n <= 1) return;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<Edge<Scalar>> block;
    for (Index i = lo; i < hi; ++i)
      for (Index j = i + 1; j < hi; ++j)
        if (rng.uniform() < p) block.push_back({i, j, w});
    // connectivity check via union-find
    std::vector<Index> parent(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](Index v) {
      while (parent[static_cast<std::size_t>(v)] != v) {
        parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
        v = parent[static_cast<std::size_t>(v)];
      }
      return v;
    };
    Index components = n;
    for (const auto& e : block) {
      const Index a = find(e.i - lo), b = find(e.j - lo);
      if (a != b) {
        parent[static_cast<std::size_t>(a)] = b;
        --components;
      }
    }
    if (components == 1) {
      out.insert(out.end(), block.begin(), block.end());
      return;
    }
  }
  throw NumericalError("generate_topology: could not produce a connected subnetwork");
}

}  // namespace detail

/// Two connected Erdos-Renyi subnetworks joined by a fixed number of
/// partition-crossing edges. All weights equal spec.weight.
template <typename Scalar = double>
Topology<Scalar> generate_topology(const TopologyGeneratorSpec<Scalar>& spec, Rng& rng) {
  detail::require(spec.intra_edges >= 1, "generate_topology: need at least one crossing edge");
  const Index m = spec.split, n = spec.n_total;
  detail::require(spec.intra_edges <= m * (n - m),
                  "generate_topology: more crossing edges than distinct pairs");
  std::vector<Edge<Scalar>> edges;
  detail::er_block(edges, Index(0), m, spec.edge_prob, spec.weight, rng);
  detail::er_block(edges, m, n, spec.edge_prob, spec.weight, rng);
  std::vector<std::pair<Index, Index>> chosen;
  while (static_cast<Index>(chosen.size()) < spec.intra_edges) {
    const Index u = rng.uniform_index(m);
    const Index v = m + rng.uniform_index(n - m);
    if (std::find(chosen.begin(), chosen.end(), std::make_pair(u, v)) == chosen.end())
      chosen.emplace_back(u, v);
  }
  for (const auto& [u, v] : chosen) edges.push_back({u, v, spec.weight});
  return Topology<Scalar>(n, spec.split, std::move(edges));
}

}  // namespace netgain
