#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "netgain/types.hpp"

namespace netgain {

/// A single term c * prod_k eta_k^{a_k} with c > 0 and real exponents a.
template <typename Scalar = double>
struct Monomial {
  Scalar coeff = Scalar(1);
  VectorX<Scalar> exponents;

  static Monomial constant(Index n_vars, Scalar c) {
    Monomial m;
    m.coeff = c;
    m.exponents = VectorX<Scalar>::Zero(n_vars);
    return m;
  }

  /// c * eta_k^power
  static Monomial variable(Index n_vars, Index k, Scalar c = Scalar(1), Scalar power = Scalar(1)) {
    Monomial m = constant(n_vars, c);
    m.exponents(k) = power;
    return m;
  }

  Index n_vars() const { return exponents.size(); }

  void validate() const {
    detail::require(coeff > Scalar(0) && std::isfinite(static_cast<double>(coeff)),
                    "Monomial: coefficient must be positive and finite");
  }

  Scalar evaluate(const VectorX<Scalar>& eta) const {
    detail::require(eta.size() == exponents.size(), "Monomial: dimension mismatch");
    detail::require((eta.array() > Scalar(0)).all(), "Monomial: domain is strictly positive");
    Scalar log_value = std::log(coeff);
    for (Index k = 0; k < eta.size(); ++k)
      if (exponents(k) != Scalar(0)) log_value += exponents(k) * std::log(eta(k));
    return std::exp(log_value);
  }

  /// Restriction to a variable subset with other variables frozen at given
  /// values; the frozen part folds into the coefficient.
  Monomial restricted(const std::vector<Index>& keep, const VectorX<Scalar>& full_values,
                      const std::vector<char>& fixed_mask) const {
    Monomial out;
    out.exponents = VectorX<Scalar>::Zero(static_cast<Index>(keep.size()));
    Scalar log_c = std::log(coeff);
    for (Index k = 0; k < exponents.size(); ++k)
      if (fixed_mask[static_cast<std::size_t>(k)] && exponents(k) != Scalar(0))
        log_c += exponents(k) * std::log(full_values(k));
    out.coeff = std::exp(log_c);
    for (std::size_t t = 0; t < keep.size(); ++t)
      out.exponents(static_cast<Index>(t)) = exponents(keep[t]);
    return out;
  }
};

/// Sum of monomials over a fixed variable count. Closed under addition and
/// multiplication by monomials; evaluation is elementwise positive.
template <typename Scalar = double>
class Posynomial {
 public:
  explicit Posynomial(Index n_vars) : n_vars_(n_vars) {
    detail::require(n_vars >= 0, "Posynomial: negative variable count");
  }

  static Posynomial from_terms(Index n_vars, std::vector<Monomial<Scalar>> terms) {
    Posynomial p(n_vars);
    for (auto& t : terms) p.add_term(std::move(t));
    return p;
  }

  void add_term(Monomial<Scalar> m) {
    m.validate();
    detail::require(m.exponents.size() == n_vars_, "Posynomial: term dimension mismatch");
    terms_.push_back(std::move(m));
  }

  Index n_vars() const { return n_vars_; }
  Index n_terms() const { return static_cast<Index>(terms_.size()); }
  const std::vector<Monomial<Scalar>>& terms() const { return terms_; }

  Scalar evaluate(const VectorX<Scalar>& eta) const {
    detail::require(!terms_.empty(), "Posynomial: cannot evaluate an empty sum");
    Scalar total = Scalar(0);
    for (const auto& t : terms_) total += t.evaluate(eta);
    return total;
  }

 private:
  Index n_vars_;
  std::vector<Monomial<Scalar>> terms_;
};

/// Log-domain form of a posynomial: F(x) = log sum_m exp(b_m . x + log c_m).
/// Convex and smooth; value, gradient, and Hessian share one softmax pass.
template <typename Scalar = double>
class LogPosynomial {
 public:
  explicit LogPosynomial(const Posynomial<Scalar>& p)
      : exponents_(p.n_terms(), p.n_vars()), log_coeff_(p.n_terms()) {
    detail::require(p.n_terms() > 0, "LogPosynomial: empty posynomial");
    for (Index m = 0; m < p.n_terms(); ++m) {
      exponents_.row(m) = p.terms()[static_cast<std::size_t>(m)].exponents.transpose();
      log_coeff_(m) = std::log(p.terms()[static_cast<std::size_t>(m)].coeff);
    }
  }

  Index n_vars() const { return exponents_.cols(); }
  Index n_terms() const { return exponents_.rows(); }
  const MatrixX<Scalar>& exponent_matrix() const { return exponents_; }
  const VectorX<Scalar>& log_coefficients() const { return log_coeff_; }

  Scalar value(const VectorX<Scalar>& x) const {
    VectorX<Scalar> z = exponents_ * x + log_coeff_;
    const Scalar zmax = z.maxCoeff();
    return zmax + std::log((z.array() - zmax).exp().sum());
  }

  VectorX<Scalar> gradient(const VectorX<Scalar>& x) const {
    return exponents_.transpose() * softmax(x);
  }

  MatrixX<Scalar> hessian(const VectorX<Scalar>& x) const {
    const VectorX<Scalar> w = softmax(x);
    const VectorX<Scalar> g = exponents_.transpose() * w;
    return exponents_.transpose() * w.asDiagonal() * exponents_ - g * g.transpose();
  }

  VectorX<Scalar> softmax(const VectorX<Scalar>& x) const {
    VectorX<Scalar> z = exponents_ * x + log_coeff_;
    const Scalar zmax = z.maxCoeff();
    VectorX<Scalar> w = (z.array() - zmax).exp();
    return w / w.sum();
  }

 private:
  MatrixX<Scalar> exponents_;
  VectorX<Scalar> log_coeff_;
};

template <typename Scalar>
LogPosynomial<Scalar> log_transform(const Posynomial<Scalar>& p) {
  return LogPosynomial<Scalar>(p);
}

namespace detail {

template <typename Scalar>
void dump_terms(std::ostringstream& out, const std::vector<Monomial<Scalar>>& terms) {
  for (const auto& t : terms) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", static_cast<double>(t.coeff));
    out << "  " << buf << " |";
    for (Index k = 0; k < t.exponents.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.12g", static_cast<double>(t.exponents(k)));
      out << ' ' << buf;
    }
    out << '\n';
  }
}

}  // namespace detail

}  // namespace netgain
