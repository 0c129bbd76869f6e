#pragma once

#include <cmath>
#include <vector>

#include "netgain/fm.hpp"
#include "netgain/posynomial.hpp"
#include "netgain/types.hpp"

namespace netgain {

/// Investment costs normalized to [0, 1] over the gain box: transmission
/// investment falls with g (power law -p), sensitivity hardening rises with
/// h (power law q). Both are posynomial after dropping a constant shift.
template <typename Scalar = double>
struct CostModel {
  GainBounds<Scalar> bounds;
  Scalar p = Scalar(0.1);
  Scalar q = Scalar(1);

  CostModel(GainBounds<Scalar> b, Scalar p_in, Scalar q_in) : bounds(b), p(p_in), q(q_in) {
    detail::require(p > Scalar(0) && q > Scalar(0), "CostModel: exponents must be positive");
  }

  /// 1 / (g_lo^-p - g_hi^-p), the transmission-term coefficient.
  Scalar g_scale() const {
    return Scalar(1) / (std::pow(bounds.g_lo, -p) - std::pow(bounds.g_hi, -p));
  }

  /// 1 / (h_hi^q - h_lo^q), the sensitivity-term coefficient.
  Scalar h_scale() const {
    return Scalar(1) / (std::pow(bounds.h_hi, q) - std::pow(bounds.h_lo, q));
  }

  /// Normalized transmission investment: 1 at g_lo, 0 at g_hi, decreasing.
  Scalar alpha(Scalar g) const {
    detail::require(g > Scalar(0), "CostModel: gain must be positive");
    return (std::pow(g, -p) - std::pow(bounds.g_hi, -p)) * g_scale();
  }

  /// Normalized sensitivity investment: 0 at h_lo, 1 at h_hi, increasing.
  Scalar beta(Scalar h) const {
    detail::require(h > Scalar(0), "CostModel: sensitivity must be positive");
    return (std::pow(h, q) - std::pow(bounds.h_lo, q)) * h_scale();
  }

  /// Per-node constant dropped when the cost is written as a posynomial.
  Scalar node_shift() const {
    return std::pow(bounds.g_hi, -p) * g_scale() + std::pow(bounds.h_lo, q) * h_scale();
  }
};

/// Total shift for n nodes: posynomial cost == true cost + this constant.
template <typename Scalar>
Scalar l0_constant(Index n, const CostModel<Scalar>& model) {
  detail::require(n >= 1, "l0_constant: need at least one node");
  return Scalar(n) * model.node_shift();
}

/// True (unshifted) total cost of a gain profile.
template <typename Scalar>
Scalar total_cost(const GainProfile<Scalar>& profile, const CostModel<Scalar>& model) {
  Scalar acc = Scalar(0);
  for (Index i = 0; i < profile.size(); ++i)
    acc += model.alpha(profile.g(i)) + model.beta(profile.h(i));
  return acc;
}

/// Shifted cost terms over an embedding into a larger variable vector:
/// c_g * g_i^-p + c_h * h_i^q for each of n_nodes nodes, with node i's gains
/// at columns g_base + i and h_base + i. Summing their values at a profile
/// gives total_cost + l0_constant.
template <typename Scalar>
std::vector<Monomial<Scalar>> shifted_cost_terms(const CostModel<Scalar>& model, Index n_vars,
                                                 Index g_base, Index h_base, Index n_nodes) {
  detail::require(n_nodes >= 1, "shifted_cost_terms: need at least one node");
  detail::require(g_base >= 0 && g_base + n_nodes <= n_vars, "shifted_cost_terms: g block out of range");
  detail::require(h_base >= 0 && h_base + n_nodes <= n_vars, "shifted_cost_terms: h block out of range");
  std::vector<Monomial<Scalar>> terms;
  terms.reserve(static_cast<std::size_t>(2 * n_nodes));
  for (Index i = 0; i < n_nodes; ++i) {
    terms.push_back(Monomial<Scalar>::variable(n_vars, g_base + i, model.g_scale(), -model.p));
    terms.push_back(Monomial<Scalar>::variable(n_vars, h_base + i, model.h_scale(), model.q));
  }
  return terms;
}

}  // namespace netgain
