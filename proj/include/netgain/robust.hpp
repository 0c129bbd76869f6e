#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "netgain/cost.hpp"
#include "netgain/fm.hpp"
#include "netgain/gp.hpp"
#include "netgain/posynomial.hpp"
#include "netgain/random.hpp"
#include "netgain/spectral.hpp"
#include "netgain/topology.hpp"
#include "netgain/types.hpp"

namespace netgain {

/// Where and how adversarial interference can enter: the perturbed coupling
/// is A + E D F with D block-diagonal over a node partition, bounded in the
/// induced 1-norm by eps1 and in the induced 2-norm by eps2.
template <typename Scalar = double>
struct UncertaintyStructure {
  MatrixX<Scalar> e_map;  // injection side, nonnegative
  MatrixX<Scalar> f_map;  // readout side, nonnegative
  Scalar eps1 = Scalar(0);
  Scalar eps2 = Scalar(0);
  std::vector<std::vector<Index>> blocks;  // partition of node indices
  std::vector<char> full_block;            // dense block vs scalar multiple of identity

  /// One scalar block per node, identity injection and readout.
  static UncertaintyStructure diagonal(Index n, Scalar eps1, Scalar eps2) {
    detail::require(n >= 1, "UncertaintyStructure: need at least one node");
    UncertaintyStructure s;
    s.e_map = MatrixX<Scalar>::Identity(n, n);
    s.f_map = MatrixX<Scalar>::Identity(n, n);
    s.eps1 = eps1;
    s.eps2 = eps2;
    s.blocks.resize(static_cast<std::size_t>(n));
    s.full_block.assign(static_cast<std::size_t>(n), 0);
    for (Index i = 0; i < n; ++i) s.blocks[static_cast<std::size_t>(i)] = {i};
    s.validate();
    return s;
  }

  Index size() const { return e_map.rows(); }
  Index n_blocks() const { return static_cast<Index>(blocks.size()); }

  /// Node index -> block index.
  std::vector<Index> block_index_map() const {
    std::vector<Index> map(static_cast<std::size_t>(size()), -1);
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (Index i : blocks[b]) map[static_cast<std::size_t>(i)] = static_cast<Index>(b);
    return map;
  }

  void validate() const {
    const Index n = e_map.rows();
    detail::require(n >= 1 && e_map.cols() == n, "UncertaintyStructure: injection map must be square");
    detail::require(f_map.rows() == n && f_map.cols() == n,
                    "UncertaintyStructure: readout map must be square");
    detail::require((e_map.array() >= Scalar(0)).all() && e_map.allFinite(),
                    "UncertaintyStructure: injection map must be nonnegative");
    detail::require((f_map.array() >= Scalar(0)).all() && f_map.allFinite(),
                    "UncertaintyStructure: readout map must be nonnegative");
    detail::require(eps1 >= Scalar(0) && eps2 >= Scalar(0) &&
                        std::isfinite(static_cast<double>(eps1)) &&
                        std::isfinite(static_cast<double>(eps2)),
                    "UncertaintyStructure: norm bounds must be nonnegative");
    detail::require(blocks.size() == full_block.size(),
                    "UncertaintyStructure: block flag count mismatch");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const auto& block : blocks) {
      detail::require(!block.empty(), "UncertaintyStructure: empty block");
      for (Index i : block) {
        detail::require(i >= 0 && i < n, "UncertaintyStructure: block index out of range");
        detail::require(!seen[static_cast<std::size_t>(i)],
                        "UncertaintyStructure: node in more than one block");
        seen[static_cast<std::size_t>(i)] = 1;
      }
    }
    for (char s : seen) detail::require(s, "UncertaintyStructure: node missing from partition");
  }
};

/// Column layout of the robust design program: node gains, then the
/// stability and attack certificates. Block weights have one column per
/// uncertainty block.
struct RobustVarLayout {
  Index n_nodes = 0;
  Index n_blocks = 0;

  Index g_at(Index i) const { return i; }
  Index h_at(Index i) const { return n_nodes + i; }
  Index rho_at(Index i) const { return 2 * n_nodes + i; }
  Index pi_at(Index b) const { return 3 * n_nodes + b; }
  Index u_at(Index i) const { return 3 * n_nodes + n_blocks + i; }
  Index v_at(Index i) const { return 4 * n_nodes + n_blocks + i; }
  Index xi_at(Index i) const { return 5 * n_nodes + n_blocks + i; }
  Index zeta_at(Index i) const { return 6 * n_nodes + n_blocks + i; }
  Index total() const { return 7 * n_nodes + n_blocks; }

  std::vector<std::string> names() const {
    std::vector<std::string> out(static_cast<std::size_t>(total()));
    for (Index i = 0; i < n_nodes; ++i) {
      out[static_cast<std::size_t>(g_at(i))] = "g" + std::to_string(i);
      out[static_cast<std::size_t>(h_at(i))] = "h" + std::to_string(i);
      out[static_cast<std::size_t>(rho_at(i))] = "rho" + std::to_string(i);
      out[static_cast<std::size_t>(u_at(i))] = "u" + std::to_string(i);
      out[static_cast<std::size_t>(v_at(i))] = "v" + std::to_string(i);
      out[static_cast<std::size_t>(xi_at(i))] = "xi" + std::to_string(i);
      out[static_cast<std::size_t>(zeta_at(i))] = "zeta" + std::to_string(i);
    }
    for (Index b = 0; b < n_blocks; ++b)
      out[static_cast<std::size_t>(pi_at(b))] = "pi" + std::to_string(b);
    return out;
  }
};

namespace detail {

template <typename Scalar>
void add_term(Posynomial<Scalar>& row, Index n_vars, Scalar coeff,
              std::initializer_list<std::pair<Index, Scalar>> powers) {
  if (coeff == Scalar(0)) return;
  Monomial<Scalar> m = Monomial<Scalar>::constant(n_vars, coeff);
  for (const auto& [col, e] : powers) m.exponents(col) += e;
  row.add_term(std::move(m));
}

template <typename Scalar>
void push_if_nonempty(std::vector<Posynomial<Scalar>>& rows, Posynomial<Scalar>&& row) {
  if (row.n_terms() > 0) rows.push_back(std::move(row));
}

}  // namespace detail

/// Weighted-1-norm stability rows: per node, the weighted coupling plus the
/// decay margin plus the worst 1-norm attack must clear the node's own
/// weight. Certificate variable: rho.
template <typename Scalar>
std::vector<Posynomial<Scalar>> build_c1(const Topology<Scalar>& topo,
                                         const FmParams<Scalar>& params,
                                         const UncertaintyStructure<Scalar>& unc,
                                         const RobustVarLayout& layout, Scalar varsigma1) {
  const Index n = topo.size();
  detail::require(params.size() == n, "build_c1: parameter dimension mismatch");
  detail::require(unc.size() == n, "build_c1: uncertainty dimension mismatch");
  detail::require(layout.n_nodes == n && layout.n_blocks == unc.n_blocks(),
                  "build_c1: layout mismatch");
  detail::require(varsigma1 > Scalar(0) && varsigma1 < Scalar(1),
                  "build_c1: decay margin must lie in (0, 1)");
  const Index nv = layout.total();
  const auto& a = topo.adjacency();
  const Scalar root = std::sqrt(unc.eps1);
  const VectorX<Scalar> f_col_sums = unc.f_map.colwise().sum();

  std::vector<Posynomial<Scalar>> rows;
  rows.reserve(static_cast<std::size_t>(2 * n));
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(nv);
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, nv, params.k(j) * params.gamma_bar(j) * a(j, i) / params.k(i),
                       {{layout.g_at(i), Scalar(1)},
                        {layout.h_at(j), Scalar(-1)},
                        {layout.rho_at(j), Scalar(1)},
                        {layout.rho_at(i), Scalar(-1)}});
    detail::add_term(row, nv, varsigma1 / params.k(i), {});
    detail::add_term(row, nv, root * f_col_sums(i) / params.k(i),
                     {{layout.rho_at(i), Scalar(-1)}});
    detail::push_if_nonempty(rows, std::move(row));
  }
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(nv);
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, nv, root * unc.e_map(j, i) * params.gamma_bar(j) * params.k(j),
                       {{layout.h_at(j), Scalar(-1)}, {layout.rho_at(j), Scalar(1)}});
    detail::push_if_nonempty(rows, std::move(row));
  }
  return rows;
}

/// Weighted-2-norm stability rows: a four-family certificate (u, v, xi,
/// zeta) with per-block weights pi splitting the attack's singular-value
/// budget between injection and readout sides.
template <typename Scalar>
std::vector<Posynomial<Scalar>> build_c2(const Topology<Scalar>& topo,
                                         const FmParams<Scalar>& params,
                                         const UncertaintyStructure<Scalar>& unc,
                                         const RobustVarLayout& layout, Scalar varsigma2) {
  const Index n = topo.size();
  detail::require(params.size() == n, "build_c2: parameter dimension mismatch");
  detail::require(unc.size() == n, "build_c2: uncertainty dimension mismatch");
  detail::require(layout.n_nodes == n && layout.n_blocks == unc.n_blocks(),
                  "build_c2: layout mismatch");
  detail::require(varsigma2 > Scalar(0) && varsigma2 < Scalar(1),
                  "build_c2: decay margin must lie in (0, 1)");
  const Index nv = layout.total();
  const auto& a = topo.adjacency();
  const Scalar root = std::sqrt(unc.eps2);
  const std::vector<Index> block_of = unc.block_index_map();
  const Scalar half = Scalar(0.5);

  std::vector<Posynomial<Scalar>> rows;
  rows.reserve(static_cast<std::size_t>(4 * n));
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(nv);
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, nv, root * unc.f_map(i, j),
                       {{layout.pi_at(block_of[static_cast<std::size_t>(i)]), half},
                        {layout.xi_at(j), Scalar(1)},
                        {layout.v_at(i), Scalar(-1)}});
    detail::push_if_nonempty(rows, std::move(row));
  }
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(nv);
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, nv, params.gamma_bar(i) * a(i, j),
                       {{layout.h_at(i), Scalar(-1)},
                        {layout.g_at(j), Scalar(1)},
                        {layout.xi_at(j), Scalar(1)},
                        {layout.xi_at(i), Scalar(-1)}});
    detail::add_term(row, nv, varsigma2 / params.k(i), {});
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, nv, root * params.gamma_bar(i) * unc.e_map(i, j),
                       {{layout.h_at(i), Scalar(-1)},
                        {layout.pi_at(block_of[static_cast<std::size_t>(j)]), -half},
                        {layout.u_at(j), Scalar(1)},
                        {layout.xi_at(i), Scalar(-1)}});
    detail::push_if_nonempty(rows, std::move(row));
  }
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(nv);
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, nv, root * unc.e_map(j, i) * params.gamma_bar(j) * params.k(j),
                       {{layout.pi_at(block_of[static_cast<std::size_t>(i)]), -half},
                        {layout.h_at(j), Scalar(-1)},
                        {layout.zeta_at(j), Scalar(1)},
                        {layout.u_at(i), Scalar(-1)}});
    detail::push_if_nonempty(rows, std::move(row));
  }
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(nv);
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, nv, a(j, i) * params.gamma_bar(j) * params.k(j) / params.k(i),
                       {{layout.g_at(i), Scalar(1)},
                        {layout.h_at(j), Scalar(-1)},
                        {layout.zeta_at(j), Scalar(1)},
                        {layout.zeta_at(i), Scalar(-1)}});
    detail::add_term(row, nv, varsigma2 / params.k(i), {});
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, nv, root * unc.f_map(j, i) / params.k(i),
                       {{layout.pi_at(block_of[static_cast<std::size_t>(j)]), half},
                        {layout.v_at(j), Scalar(1)},
                        {layout.zeta_at(i), Scalar(-1)}});
    detail::push_if_nonempty(rows, std::move(row));
  }
  return rows;
}

template <typename Scalar = double>
struct RobustProgram {
  GpProblem<Scalar> problem;
  RobustVarLayout layout;
};

/// Full robust design program: minimize the shifted investment cost over
/// gains and certificates subject to both norm families and the gain box.
template <typename Scalar>
RobustProgram<Scalar> assemble_p2(const Topology<Scalar>& topo, const FmParams<Scalar>& params,
                                  const UncertaintyStructure<Scalar>& unc,
                                  const CostModel<Scalar>& cost, Scalar varsigma1,
                                  Scalar varsigma2) {
  unc.validate();
  const Index n = topo.size();
  RobustVarLayout layout{n, unc.n_blocks()};
  const Index nv = layout.total();

  GpProblem<Scalar> gp(nv);
  gp.var_names = layout.names();
  for (auto& t : shifted_cost_terms(cost, nv, layout.g_at(0), layout.h_at(0), n))
    gp.add_objective_term(std::move(t));
  for (auto& row : build_c1(topo, params, unc, layout, varsigma1)) gp.add_inequality(std::move(row));
  for (auto& row : build_c2(topo, params, unc, layout, varsigma2)) gp.add_inequality(std::move(row));

  const auto& b = cost.bounds;
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> g_hi(nv), g_lo(nv), h_hi(nv), h_lo(nv);
    g_hi.add_term(Monomial<Scalar>::variable(nv, layout.g_at(i), Scalar(1) / b.g_hi, Scalar(1)));
    g_lo.add_term(Monomial<Scalar>::variable(nv, layout.g_at(i), b.g_lo, Scalar(-1)));
    h_hi.add_term(Monomial<Scalar>::variable(nv, layout.h_at(i), Scalar(1) / b.h_hi, Scalar(1)));
    h_lo.add_term(Monomial<Scalar>::variable(nv, layout.h_at(i), b.h_lo, Scalar(-1)));
    gp.add_inequality(std::move(g_hi));
    gp.add_inequality(std::move(g_lo));
    gp.add_inequality(std::move(h_hi));
    gp.add_inequality(std::move(h_lo));
  }
  return {std::move(gp), layout};
}

/// Decision variables recovered from a robust program solution.
template <typename Scalar = double>
struct RobustCertificate {
  GainProfile<Scalar> profile;
  VectorX<Scalar> rho;
  VectorX<Scalar> pi;
  VectorX<Scalar> u, v, xi, zeta;
};

template <typename Scalar>
RobustCertificate<Scalar> extract_certificate(const VectorX<Scalar>& eta,
                                              const RobustVarLayout& layout,
                                              const GainBounds<Scalar>& bounds) {
  detail::require(eta.size() == layout.total(), "extract_certificate: dimension mismatch");
  const Index n = layout.n_nodes;
  VectorX<Scalar> g(n), h(n), rho(n), u(n), v(n), xi(n), zeta(n);
  VectorX<Scalar> pi(layout.n_blocks);
  for (Index i = 0; i < n; ++i) {
    g(i) = eta(layout.g_at(i));
    h(i) = eta(layout.h_at(i));
    rho(i) = eta(layout.rho_at(i));
    u(i) = eta(layout.u_at(i));
    v(i) = eta(layout.v_at(i));
    xi(i) = eta(layout.xi_at(i));
    zeta(i) = eta(layout.zeta_at(i));
  }
  for (Index b = 0; b < layout.n_blocks; ++b) pi(b) = eta(layout.pi_at(b));
  // solver tolerance can leave gains a hair outside the box; clamp before
  // the profile's own validation
  for (Index i = 0; i < n; ++i) {
    g(i) = std::min(std::max(g(i), bounds.g_lo), bounds.g_hi);
    h(i) = std::min(std::max(h(i), bounds.h_lo), bounds.h_hi);
  }
  return {GainProfile<Scalar>{h, g, bounds}, rho, pi, u, v, xi, zeta};
}

enum class NormKind { one_norm, two_norm };

/// Random structured attack with the chosen induced norm uniform on
/// [0, bound]. Entries are nonnegative; the block pattern is respected.
template <typename Scalar>
MatrixX<Scalar> sample_delta(const UncertaintyStructure<Scalar>& unc, Rng& rng, NormKind kind) {
  const Index n = unc.size();
  MatrixX<Scalar> delta = MatrixX<Scalar>::Zero(n, n);
  for (std::size_t b = 0; b < unc.blocks.size(); ++b) {
    const auto& block = unc.blocks[b];
    if (unc.full_block[b] && block.size() > 1) {
      for (Index r : block)
        for (Index c : block) delta(r, c) = static_cast<Scalar>(rng.uniform());
    } else {
      const Scalar d = static_cast<Scalar>(rng.uniform());
      for (Index i : block) delta(i, i) = d;
    }
  }
  const auto norms = matrix_norms(delta);
  const Scalar current = kind == NormKind::one_norm ? norms.one_norm : norms.two_norm;
  if (current <= Scalar(0)) return delta;
  const Scalar bound = kind == NormKind::one_norm ? unc.eps1 : unc.eps2;
  const Scalar target = bound * static_cast<Scalar>(rng.uniform());
  return delta * (target / current);
}

/// Closed-loop matrix under a structured attack.
template <typename Scalar>
MatrixX<Scalar> perturbed_matrix(const Topology<Scalar>& topo, const FmParams<Scalar>& params,
                                 const GainProfile<Scalar>& profile,
                                 const UncertaintyStructure<Scalar>& unc,
                                 const MatrixX<Scalar>& delta) {
  MatrixX<Scalar> m = system_matrix(params, profile, topo.adjacency());
  const VectorX<Scalar> lift = params.k.cwiseProduct(params.gamma_bar).cwiseQuotient(profile.h);
  m.noalias() += lift.asDiagonal() * MatrixX<Scalar>(unc.e_map * delta * unc.f_map);
  return m;
}

template <typename Scalar = double>
struct CertificateCheck {
  int samples = 0;
  int violations = 0;  // attacks leaving the closed loop unstable
  Scalar worst_abscissa = -std::numeric_limits<Scalar>::infinity();
};

/// Monte-Carlo soundness probe: attacks drawn inside BOTH norm balls, with
/// every even draw pushed to the joint boundary (off-diagonal growth only
/// raises the abscissa, so boundary attacks dominate the interior). Sample
/// zero is always the unperturbed matrix.
template <typename Scalar>
CertificateCheck<Scalar> verify_certificate(const Topology<Scalar>& topo,
                                            const FmParams<Scalar>& params,
                                            const GainProfile<Scalar>& profile,
                                            const UncertaintyStructure<Scalar>& unc, int n_samples,
                                            Rng& rng) {
  detail::require(n_samples >= 1, "verify_certificate: need at least one sample");
  unc.validate();
  const Index n = topo.size();
  detail::require(params.size() == n && profile.size() == n,
                  "verify_certificate: dimension mismatch");
  CertificateCheck<Scalar> check;
  for (int s = 0; s < n_samples; ++s) {
    MatrixX<Scalar> delta = MatrixX<Scalar>::Zero(n, n);
    if (s > 0) {
      for (std::size_t b = 0; b < unc.blocks.size(); ++b) {
        const auto& block = unc.blocks[b];
        if (unc.full_block[b] && block.size() > 1) {
          for (Index r : block)
            for (Index c : block) delta(r, c) = static_cast<Scalar>(rng.uniform());
        } else {
          const Scalar d = static_cast<Scalar>(rng.uniform());
          for (Index i : block) delta(i, i) = d;
        }
      }
      const auto norms = matrix_norms(delta);
      Scalar t_max = std::numeric_limits<Scalar>::infinity();
      if (norms.one_norm > Scalar(0)) t_max = std::min(t_max, unc.eps1 / norms.one_norm);
      if (norms.two_norm > Scalar(0)) t_max = std::min(t_max, unc.eps2 / norms.two_norm);
      if (!std::isfinite(static_cast<double>(t_max))) t_max = Scalar(0);
      const Scalar t = (s % 2 == 0) ? t_max : t_max * static_cast<Scalar>(rng.uniform());
      delta *= t;
    }
    const Scalar abscissa = spectral_abscissa(perturbed_matrix(topo, params, profile, unc, delta));
    ++check.samples;
    if (abscissa >= Scalar(0)) ++check.violations;
    check.worst_abscissa = std::max(check.worst_abscissa, abscissa);
  }
  return check;
}

}  // namespace netgain
