#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "netgain/types.hpp"

namespace netgain {

/// Dominant eigenvalue of a Metzler matrix together with its unit-norm
/// nonnegative eigenvector.
template <typename Scalar = double>
struct PerronPair {
  Scalar value;
  VectorX<Scalar> vector;
};

namespace detail {

/// Strong connectivity of the off-diagonal sparsity pattern.
template <typename Scalar>
bool pattern_irreducible(const MatrixX<Scalar>& m) {
  const Index n = m.rows();
  if (n == 1) return true;
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Index> stack = {0};
    seen[0] = 1;
    Index count = 1;
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (Index w = 0; w < n; ++w) {
        if (w == v || seen[static_cast<std::size_t>(w)]) continue;
        const Scalar entry = transpose ? m(w, v) : m(v, w);
        if (entry != Scalar(0)) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };
  return reach_all(false) && reach_all(true);
}

template <typename Scalar>
struct PowerResult {
  Scalar value;            // dominant eigenvalue of the iterated matrix
  VectorX<Scalar> vector;  // unit, entrywise >= 0
  Scalar residual;         // ||B v - value v||_2
  bool converged;
};

/// Power iteration on a nonnegative matrix with strictly positive diagonal
/// (the positive diagonal rules out periodicity). Rayleigh-quotient stopping.
template <typename Scalar>
PowerResult<Scalar> power_dominant(const MatrixX<Scalar>& b) {
  const Index n = b.rows();
  VectorX<Scalar> x = VectorX<Scalar>::Constant(n, Scalar(1) / std::sqrt(Scalar(n)));
  Scalar lam = x.dot(b * x);
  bool converged = false;
  for (int it = 0; it < 100000; ++it) {
    VectorX<Scalar> y = b * x;
    const Scalar ny = y.norm();
    if (ny == Scalar(0)) {
      // possible only for an all-zero matrix
      return {Scalar(0), x, Scalar(0), true};
    }
    y /= ny;
    const Scalar lam_next = y.dot(b * y);
    const Scalar change = std::abs(lam_next - lam);
    x = y;
    lam = lam_next;
    if (it > 2 && change <= Scalar(1e-12) * std::max(Scalar(1), std::abs(lam))) {
      converged = true;
      break;
    }
  }
  const Scalar residual = (b * x - lam * x).norm();
  return {lam, x, residual, converged};
}

/// Largest real part over the full spectrum, via a dense eigensolve.
template <typename Scalar>
Scalar dense_max_real_eigenvalue(const MatrixX<Scalar>& m) {
  Eigen::EigenSolver<MatrixX<Scalar>> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError("spectral: dense eigensolver failed");
  Scalar best = es.eigenvalues()(0).real();
  for (Index i = 1; i < m.rows(); ++i) best = std::max(best, es.eigenvalues()(i).real());
  return best;
}

template <typename Scalar>
void check_metzler(const MatrixX<Scalar>& m) {
  require(m.rows() == m.cols() && m.rows() >= 1, "spectral: matrix must be square and nonempty");
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      require(i == j || m(i, j) >= Scalar(0), "spectral: off-diagonal entries must be nonnegative");
}

}  // namespace detail

/// Largest real part of the spectrum of a Metzler matrix. Shifts the matrix
/// to a nonnegative one, runs power iteration, and falls back to a dense
/// eigensolve when the iteration stalls or its residual is untrustworthy.
template <typename Derived>
typename Derived::Scalar spectral_abscissa(const Eigen::MatrixBase<Derived>& m_in) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> m = m_in;
  detail::check_metzler(m);
  const Scalar sigma = Scalar(1) + m.diagonal().cwiseAbs().maxCoeff();
  MatrixX<Scalar> b = m;
  b.diagonal().array() += sigma;
  const auto pr = detail::power_dominant(b);
  const Scalar scale = Scalar(1) + b.norm();
  if (pr.converged && pr.residual <= Scalar(1e-9) * scale) return pr.value - sigma;
  return detail::dense_max_real_eigenvalue(m);
}

/// Dominant nonnegative eigvector of a Metzler matrix, without requiring
/// irreducibility; for reducible matrices entries outside the dominant class
/// come back (near) zero. Falls back to a dense eigensolve when needed.
template <typename Derived>
PerronPair<typename Derived::Scalar> dominant_pair(const Eigen::MatrixBase<Derived>& m_in) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> m = m_in;
  detail::check_metzler(m);
  const Scalar sigma = Scalar(1) + m.diagonal().cwiseAbs().maxCoeff();
  MatrixX<Scalar> b = m;
  b.diagonal().array() += sigma;
  auto pr = detail::power_dominant(b);
  const Scalar scale = Scalar(1) + b.norm();
  if (pr.converged && pr.residual <= Scalar(1e-9) * scale)
    return {pr.value - sigma, pr.vector};
  // dense fallback: eigenvector of the eigenvalue with largest real part
  Eigen::EigenSolver<MatrixX<Scalar>> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("spectral: dense eigensolver failed");
  Index best = 0;
  for (Index i = 1; i < m.rows(); ++i)
    if (es.eigenvalues()(i).real() > es.eigenvalues()(best).real()) best = i;
  VectorX<Scalar> v = es.eigenvectors().col(best).real();
  if (v.sum() < Scalar(0)) v = -v;
  v = v.cwiseMax(Scalar(0));
  const Scalar nv = v.norm();
  if (nv == Scalar(0)) throw NumericalError("spectral: dominant eigenvector is not sign-definite");
  return {es.eigenvalues()(best).real(), v / nv};
}

/// Perron pair of an irreducible Metzler matrix: dominant eigenvalue plus its
/// strictly positive unit eigenvector.
template <typename Derived>
PerronPair<typename Derived::Scalar> perron_vector(const Eigen::MatrixBase<Derived>& m_in) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> m = m_in;
  detail::check_metzler(m);
  detail::require(detail::pattern_irreducible(m), "perron_vector: matrix is reducible");
  PerronPair<Scalar> p = dominant_pair(m);
  if (p.vector.minCoeff() < Scalar(1e-12))
    throw NumericalError("perron_vector: eigenvector has (near) zero entries; matrix behaves reducibly");
  const Scalar residual = (m * p.vector - p.value * p.vector).norm();
  if (residual > Scalar(1e-9) * (Scalar(1) + m.norm()))
    throw NumericalError("perron_vector: eigenpair residual out of tolerance");
  return p;
}

/// Spectral radius of an entrywise nonnegative matrix. Equals the dominant
/// (real, nonnegative) eigenvalue, so it reduces to the abscissa computation.
template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& m_in) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> m = m_in;
  detail::require(m.rows() == m.cols() && m.rows() >= 1,
                  "spectral_radius: matrix must be square and nonempty");
  detail::require((m.array() >= Scalar(0)).all(), "spectral_radius: entries must be nonnegative");
  const Scalar rho = spectral_abscissa(m);
  return std::max(rho, Scalar(0));
}

}  // namespace netgain
