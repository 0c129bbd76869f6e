#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "netgain/fm.hpp"
#include "netgain/spectral.hpp"
#include "netgain/topology.hpp"
#include "netgain/types.hpp"

namespace netgain {

/// Outcome of the greedy adding-edge attack. The added edges always share a
/// common endpoint after the second pick, so the weighted adjacency is a
/// star and its induced norms are the weight sum and root of squares.
template <typename Scalar = double>
struct AttackState {
  MatrixX<Scalar> a_q;               // symmetric added-edge adjacency
  std::vector<Edge<Scalar>> added;   // in pick order, truncated weights
  std::vector<Index> sources;        // surviving attack-source set
  bool exhausted = false;            // ran out of candidate edges under budget
  Scalar norm1 = Scalar(0);          // ||a_q||_1 after truncation
  Scalar norm2 = Scalar(0);          // ||a_q||_2 after truncation
};

/// Interference leverage of a prospective edge {i, j}: own loop gain of both
/// endpoints weighted by the dominant eigenvector mass they carry.
template <typename Scalar>
Scalar edge_score(const FmParams<Scalar>& params, const GainProfile<Scalar>& gains,
                  const VectorX<Scalar>& mu, Index i, Index j) {
  return (params.k(i) * params.gamma_bar(i) * gains.g(i) / gains.h(i) +
          params.k(j) * params.gamma_bar(j) * gains.g(j) / gains.h(j)) *
         mu(i) * mu(j);
}

/// Greedy worst-case attack: repeatedly add the unit-weight non-edge with
/// the highest leverage under the current compromised topology, restricted
/// to edges touching the shrinking source set; when a norm budget is hit,
/// shrink the last weight until the binding norm sits exactly on its bound.
template <typename Scalar>
AttackState<Scalar> run_hwa(const Topology<Scalar>& topo, const FmParams<Scalar>& params,
                            const GainProfile<Scalar>& gains, Scalar q1_bar, Scalar q2_bar) {
  const Index n = topo.size();
  detail::require(params.size() == n && gains.size() == n, "run_hwa: dimension mismatch");
  detail::require(q1_bar >= Scalar(0) && q2_bar >= Scalar(0) &&
                      std::isfinite(static_cast<double>(q1_bar)) &&
                      std::isfinite(static_cast<double>(q2_bar)),
                  "run_hwa: attack budgets must be nonnegative and finite");
  const auto& a = topo.adjacency();

  AttackState<Scalar> state;
  state.a_q = MatrixX<Scalar>::Zero(n, n);
  std::vector<char> in_sources(static_cast<std::size_t>(n), 1);
  Scalar sum_w = Scalar(0), sum_w2 = Scalar(0);

  while (std::sqrt(sum_w2) < q2_bar && sum_w < q1_bar) {
    const MatrixX<Scalar> compromised = a + state.a_q;
    const auto mu = dominant_pair(system_matrix(params, gains, compromised)).vector;

    Index best_i = -1, best_j = -1;
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        if (a(i, j) > Scalar(0) || state.a_q(i, j) > Scalar(0)) continue;
        if (!in_sources[static_cast<std::size_t>(i)] && !in_sources[static_cast<std::size_t>(j)])
          continue;
        const Scalar s = edge_score(params, gains, mu, i, j);
        if (s > best) {
          best = s;
          best_i = i;
          best_j = j;
        }
      }
    if (best_i < 0) {
      state.exhausted = true;
      break;
    }
    state.a_q(best_i, best_j) = state.a_q(best_j, best_i) = Scalar(1);
    state.added.push_back({best_i, best_j, Scalar(1)});
    sum_w += Scalar(1);
    sum_w2 += Scalar(1);
    for (Index v = 0; v < n; ++v)
      if (v != best_i && v != best_j) in_sources[static_cast<std::size_t>(v)] = 0;
  }

  if (!state.added.empty()) {
    auto& last = state.added.back();
    const Scalar base1 = sum_w - last.weight;
    const Scalar base2 = sum_w2 - last.weight * last.weight;
    if (sum_w >= q1_bar) last.weight = q1_bar - base1;
    if (std::sqrt(base2 + last.weight * last.weight) >= q2_bar)
      last.weight = std::sqrt(std::max(q2_bar * q2_bar - base2, Scalar(0)));
    state.a_q(last.i, last.j) = state.a_q(last.j, last.i) = last.weight;
    if (last.weight == Scalar(0)) {
      state.added.pop_back();
      sum_w = base1;
      sum_w2 = base2;
    } else {
      sum_w = base1 + last.weight;
      sum_w2 = base2 + last.weight * last.weight;
    }
  }
  state.norm1 = sum_w;
  state.norm2 = std::sqrt(sum_w2);
  for (Index v = 0; v < n; ++v)
    if (in_sources[static_cast<std::size_t>(v)]) state.sources.push_back(v);
  return state;
}

/// Lower bound on the dominant eigenvalue of the compromised closed loop.
/// The loop matrix is symmetrizable by the diagonal scaling with entries
/// sqrt(g h / (k gbar)), so the Rayleigh quotient of the scaled nominal
/// Perron vector bounds the compromised abscissa from below; in the scaled
/// metric the attack contributes g_i g_j per added edge.
template <typename Scalar>
Scalar lambda_shift_lower_bound(const Topology<Scalar>& topo, const FmParams<Scalar>& params,
                                const GainProfile<Scalar>& gains, const MatrixX<Scalar>& a_q) {
  const Index n = topo.size();
  detail::require(params.size() == n && gains.size() == n && a_q.rows() == n && a_q.cols() == n,
                  "lambda_shift_lower_bound: dimension mismatch");
  detail::require((params.gamma_bar.array() > Scalar(0)).all(),
                  "lambda_shift_lower_bound: needs strictly positive gamma_bar");
  for (Index i = 0; i < n; ++i) {
    detail::require(a_q(i, i) == Scalar(0), "lambda_shift_lower_bound: attack diagonal must be zero");
    for (Index j = 0; j < n; ++j)
      detail::require(a_q(i, j) >= Scalar(0) && a_q(i, j) == a_q(j, i),
                      "lambda_shift_lower_bound: attack must be symmetric and nonnegative");
  }

  const auto nominal = dominant_pair(system_matrix(params, gains, topo.adjacency()));
  Scalar numerator = Scalar(0);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      numerator += Scalar(2) * a_q(i, j) * gains.g(i) * gains.g(j) * nominal.vector(i) *
                   nominal.vector(j);
  Scalar denominator = Scalar(0);
  for (Index k = 0; k < n; ++k)
    denominator += gains.g(k) * gains.h(k) / (params.k(k) * params.gamma_bar(k)) *
                   nominal.vector(k) * nominal.vector(k);
  return nominal.value + numerator / denominator;
}

}  // namespace netgain
