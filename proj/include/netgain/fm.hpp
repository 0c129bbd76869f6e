#pragma once

#include <Eigen/Dense>
#include <vector>

#include "netgain/spectral.hpp"
#include "netgain/types.hpp"

namespace netgain {

/// Per-node dynamics parameters: update step sizes k in (0, 1], target SINR
/// levels gamma_bar >= 0, noise powers nu > 0. k <= 1 keeps the discrete-time
/// update matrix M + I nonnegative, so discrete and continuous stability tests
/// agree.
template <typename Scalar = double>
struct FmParams {
  VectorX<Scalar> k;
  VectorX<Scalar> gamma_bar;
  VectorX<Scalar> nu;

  Index size() const { return k.size(); }

  void validate() const {
    detail::require(k.size() >= 1, "FmParams: empty");
    detail::require(k.size() == gamma_bar.size() && k.size() == nu.size(),
                    "FmParams: k, gamma_bar, nu must have equal length");
    detail::require((k.array() > Scalar(0)).all() && (k.array() <= Scalar(1)).all(),
                    "FmParams: k must lie in (0, 1]");
    detail::require((gamma_bar.array() >= Scalar(0)).all(), "FmParams: gamma_bar must be >= 0");
    detail::require((nu.array() > Scalar(0)).all(), "FmParams: nu must be > 0");
  }

  static FmParams uniform(Index n, Scalar k_val, Scalar gamma_val, Scalar nu_val) {
    FmParams p;
    p.k = VectorX<Scalar>::Constant(n, k_val);
    p.gamma_bar = VectorX<Scalar>::Constant(n, gamma_val);
    p.nu = VectorX<Scalar>::Constant(n, nu_val);
    return p;
  }
};

/// Box the two gain policies live in.
template <typename Scalar = double>
struct GainBounds {
  Scalar g_lo, g_hi;   // interference gains
  Scalar h_lo, h_hi;   // transmission gains

  void validate() const {
    detail::require(Scalar(0) < g_lo && g_lo < g_hi, "GainBounds: need 0 < g_lo < g_hi");
    detail::require(Scalar(0) < h_lo && h_lo < h_hi, "GainBounds: need 0 < h_lo < h_hi");
  }
};

/// A joint gain assignment: transmission gains h and interference gains g for
/// every node, together with the box they must stay in.
template <typename Scalar = double>
struct GainProfile {
  VectorX<Scalar> h;
  VectorX<Scalar> g;
  GainBounds<Scalar> bounds;

  Index size() const { return h.size(); }

  void validate() const {
    bounds.validate();
    detail::require(h.size() == g.size() && h.size() >= 1, "GainProfile: h, g must match");
    detail::require((g.array() >= bounds.g_lo).all() && (g.array() <= bounds.g_hi).all(),
                    "GainProfile: g out of bounds");
    detail::require((h.array() >= bounds.h_lo).all() && (h.array() <= bounds.h_hi).all(),
                    "GainProfile: h out of bounds");
  }

  static GainProfile midpoint(Index n, const GainBounds<Scalar>& b) {
    GainProfile p;
    p.h = VectorX<Scalar>::Constant(n, (b.h_lo + b.h_hi) / Scalar(2));
    p.g = VectorX<Scalar>::Constant(n, (b.g_lo + b.g_hi) / Scalar(2));
    p.bounds = b;
    return p;
  }
};

/// Closed-loop system matrix M = K(-I + Gbar diag(1/h) A diag(g)): Metzler,
/// with diagonal -k_i and off-diagonal k_i gbar_i a_ij g_j / h_i.
template <typename Scalar, typename DerivedA>
MatrixX<Scalar> system_matrix(const FmParams<Scalar>& params, const GainProfile<Scalar>& gains,
                              const Eigen::MatrixBase<DerivedA>& adjacency_in) {
  params.validate();
  gains.validate();
  const MatrixX<Scalar> adjacency = adjacency_in;
  const Index n = params.size();
  detail::require(gains.size() == n && adjacency.rows() == n && adjacency.cols() == n,
                  "system_matrix: dimension mismatch");
  MatrixX<Scalar> m(n, n);
  for (Index i = 0; i < n; ++i) {
    const Scalar row_scale = params.k(i) * params.gamma_bar(i) / gains.h(i);
    for (Index j = 0; j < n; ++j) m(i, j) = row_scale * adjacency(i, j) * gains.g(j);
    m(i, i) = -params.k(i);
  }
  return m;
}

/// Achieved signal-to-interference-plus-noise ratios at power vector p.
template <typename Scalar, typename DerivedA, typename DerivedP>
VectorX<Scalar> sinr(const FmParams<Scalar>& params, const GainProfile<Scalar>& gains,
                     const Eigen::MatrixBase<DerivedA>& adjacency_in,
                     const Eigen::MatrixBase<DerivedP>& p_in) {
  params.validate();
  gains.validate();
  const MatrixX<Scalar> adjacency = adjacency_in;
  const VectorX<Scalar> p = p_in;
  const Index n = params.size();
  detail::require(p.size() == n, "sinr: power vector dimension mismatch");
  VectorX<Scalar> out(n);
  for (Index i = 0; i < n; ++i) {
    Scalar interference = params.nu(i);
    for (Index j = 0; j < n; ++j)
      if (j != i) interference += adjacency(i, j) * gains.g(j) * p(j);
    out(i) = gains.h(i) * p(i) / interference;
  }
  return out;
}

/// One step of the power-control update, p+ = (M + I) p + K Gbar diag(1/h) nu.
template <typename Scalar, typename DerivedA, typename DerivedP>
VectorX<Scalar> fm_step(const FmParams<Scalar>& params, const GainProfile<Scalar>& gains,
                        const Eigen::MatrixBase<DerivedA>& adjacency,
                        const Eigen::MatrixBase<DerivedP>& p_in) {
  const MatrixX<Scalar> m = system_matrix(params, gains, adjacency);
  const VectorX<Scalar> p = p_in;
  detail::require(p.size() == params.size(), "fm_step: power vector dimension mismatch");
  VectorX<Scalar> offset =
      params.k.cwiseProduct(params.gamma_bar).cwiseProduct(params.nu).cwiseQuotient(gains.h);
  return (m + MatrixX<Scalar>::Identity(p.size(), p.size())) * p + offset;
}

/// Equilibrium power vector, the solution of (I - Gbar diag(1/h) A diag(g)) p
/// = Gbar diag(1/h) nu. Only exists for a stable closed loop.
template <typename Scalar, typename DerivedA>
VectorX<Scalar> fixed_point(const FmParams<Scalar>& params, const GainProfile<Scalar>& gains,
                            const Eigen::MatrixBase<DerivedA>& adjacency) {
  const MatrixX<Scalar> m = system_matrix(params, gains, adjacency);
  const Scalar abscissa = spectral_abscissa(m);
  if (abscissa >= Scalar(0))
    throw InfeasibleError("fixed_point: system matrix is not stable, no equilibrium exists",
                          static_cast<double>(abscissa));
  // I - Gbar diag(1/h) A diag(g) = -K^{-1} M
  MatrixX<Scalar> lhs = -(params.k.cwiseInverse().asDiagonal() * m);
  VectorX<Scalar> rhs = params.gamma_bar.cwiseProduct(params.nu).cwiseQuotient(gains.h);
  return lhs.fullPivLu().solve(rhs);
}

template <typename Scalar = double>
struct SimulateOptions {
  Scalar tol = Scalar(1e-10);     // infinity-norm step-change stopping rule
  long max_steps = 1000000;
  bool record_trajectory = false;
};

template <typename Scalar = double>
struct SimulateResult {
  VectorX<Scalar> p;
  long steps = 0;
  bool converged = false;
  std::vector<VectorX<Scalar>> trajectory;  // filled when requested, includes p0
};

/// Iterates fm_step from p0 until the update stalls or the step budget runs
/// out. Uses one matrix build for the whole run.
template <typename Scalar, typename DerivedA, typename DerivedP>
SimulateResult<Scalar> simulate(const FmParams<Scalar>& params, const GainProfile<Scalar>& gains,
                                const Eigen::MatrixBase<DerivedA>& adjacency,
                                const Eigen::MatrixBase<DerivedP>& p0_in,
                                const SimulateOptions<Scalar>& opts = {}) {
  const MatrixX<Scalar> m = system_matrix(params, gains, adjacency);
  const VectorX<Scalar> p0 = p0_in;
  detail::require(p0.size() == params.size(), "simulate: power vector dimension mismatch");
  const MatrixX<Scalar> step = m + MatrixX<Scalar>::Identity(p0.size(), p0.size());
  const VectorX<Scalar> offset =
      params.k.cwiseProduct(params.gamma_bar).cwiseProduct(params.nu).cwiseQuotient(gains.h);
  SimulateResult<Scalar> r;
  r.p = p0;
  if (opts.record_trajectory) r.trajectory.push_back(p0);
  for (long it = 0; it < opts.max_steps; ++it) {
    VectorX<Scalar> next = step * r.p + offset;
    const Scalar delta = (next - r.p).template lpNorm<Eigen::Infinity>();
    r.p = next;
    ++r.steps;
    if (opts.record_trajectory) r.trajectory.push_back(next);
    if (delta < opts.tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

template <typename Scalar = double>
struct StabilityReport {
  bool robustly_stable;
  Scalar abscissa;        // continuous-time margin test: abscissa < -varsigma
  Scalar step_radius;     // discrete-time test: spectral radius of M + I < 1
};

/// Checks both the continuous-time margin condition and the discrete-time
/// update contraction. With k <= 1 the two agree up to the margin varsigma.
template <typename Scalar, typename DerivedA>
StabilityReport<Scalar> is_robustly_stable(const FmParams<Scalar>& params,
                                           const GainProfile<Scalar>& gains,
                                           const Eigen::MatrixBase<DerivedA>& adjacency,
                                           Scalar varsigma) {
  detail::require(varsigma > Scalar(0) && varsigma < Scalar(1),
                  "is_robustly_stable: varsigma must lie in (0, 1)");
  const MatrixX<Scalar> m = system_matrix(params, gains, adjacency);
  StabilityReport<Scalar> rep;
  rep.abscissa = spectral_abscissa(m);
  rep.step_radius = spectral_radius(m + MatrixX<Scalar>::Identity(m.rows(), m.cols()));
  rep.robustly_stable = rep.abscissa < -varsigma && rep.step_radius < Scalar(1);
  return rep;
}

}  // namespace netgain
