#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netgain/posynomial.hpp"
#include "netgain/types.hpp"

namespace netgain {

/// Geometric program in standard form:
///   minimize objective(eta)
///   subject to inequalities_k(eta) <= 1, equalities_j(eta) == 1, eta > 0.
template <typename Scalar = double>
struct GpProblem {
  Index n_vars = 0;
  std::vector<std::string> var_names;
  std::vector<Monomial<Scalar>> objective_terms;
  std::vector<Posynomial<Scalar>> inequalities;
  std::vector<Monomial<Scalar>> equalities;

  explicit GpProblem(Index n) : n_vars(n) {
    detail::require(n >= 1, "GpProblem: need at least one variable");
    var_names.resize(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) var_names[static_cast<std::size_t>(k)] = "eta" + std::to_string(k);
  }

  void add_objective_term(Monomial<Scalar> m) {
    m.validate();
    detail::require(m.exponents.size() == n_vars, "GpProblem: objective term dimension mismatch");
    objective_terms.push_back(std::move(m));
  }

  void add_inequality(Posynomial<Scalar> p) {
    detail::require(p.n_vars() == n_vars, "GpProblem: inequality dimension mismatch");
    detail::require(p.n_terms() > 0, "GpProblem: empty inequality");
    inequalities.push_back(std::move(p));
  }

  void add_equality(Monomial<Scalar> m) {
    m.validate();
    detail::require(m.exponents.size() == n_vars, "GpProblem: equality dimension mismatch");
    equalities.push_back(std::move(m));
  }

  void validate() const {
    detail::require(!objective_terms.empty(), "GpProblem: empty objective");
    detail::require(static_cast<Index>(var_names.size()) == n_vars,
                    "GpProblem: variable name count mismatch");
    for (const auto& t : objective_terms) {
      t.validate();
      detail::require(t.exponents.size() == n_vars, "GpProblem: objective term dimension mismatch");
    }
    for (const auto& p : inequalities)
      detail::require(p.n_vars() == n_vars && p.n_terms() > 0, "GpProblem: malformed inequality");
    for (const auto& m : equalities) {
      m.validate();
      detail::require(m.exponents.size() == n_vars, "GpProblem: equality dimension mismatch");
    }
  }

  Posynomial<Scalar> objective() const {
    return Posynomial<Scalar>::from_terms(n_vars, objective_terms);
  }
};

enum class GpStatus { optimal, infeasible, max_iterations, unbounded };

inline const char* to_string(GpStatus s) {
  switch (s) {
    case GpStatus::optimal: return "optimal";
    case GpStatus::infeasible: return "infeasible";
    case GpStatus::max_iterations: return "max_iterations";
    case GpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

template <typename Scalar = double>
struct GpSolveOptions {
  Scalar gap_tol = Scalar(1e-8);          // barrier stop: m / t below this
  Scalar newton_tol = Scalar(1e-10);      // centering stop: decrement^2 / 2
  Scalar polish_tol = Scalar(1e-18);      // final centering runs tighter
  Scalar armijo_c = Scalar(1e-4);
  Scalar backtrack = Scalar(0.5);
  Scalar t0 = Scalar(1);
  Scalar mu = Scalar(10);
  Scalar infeasible_margin = Scalar(1e-9);   // phase-1 optimum above 1 + margin
  Scalar unbounded_log_limit = Scalar(345);  // log-domain iterate cap
  int max_newton = 4000;                     // total Newton-step budget
  int max_newton_per_center = 100;
  std::optional<VectorX<Scalar>> initial_eta;
};

template <typename Scalar = double>
struct GpSolution {
  GpStatus status = GpStatus::max_iterations;
  VectorX<Scalar> eta;           // best iterate, original domain
  Scalar objective_value = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar kkt_residual = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar phase1_objective = std::numeric_limits<Scalar>::quiet_NaN();
  int iterations = 0;            // Newton steps, phase 1 included
};

template <typename Scalar = double>
struct FeasibilityReport {
  bool feasible = false;
  Scalar slack_optimum = std::numeric_limits<Scalar>::quiet_NaN();  // phase-1 objective
  VectorX<Scalar> eta;  // strictly feasible point when feasible
  int iterations = 0;
};

namespace detail {

/// Posynomial compiled to its active variables: evaluation touches only the
/// columns that occur with a nonzero exponent, so Hessian assembly scales
/// with structural density rather than total variable count.
template <typename Scalar>
struct CompiledPosy {
  std::vector<Index> active;
  MatrixX<Scalar> b_local;    // n_terms x n_active
  VectorX<Scalar> log_coeff;  // n_terms

  static CompiledPosy compile(const std::vector<Monomial<Scalar>>& terms, Index n_vars) {
    CompiledPosy out;
    std::vector<char> used(static_cast<std::size_t>(n_vars), 0);
    for (const auto& t : terms)
      for (Index k = 0; k < n_vars; ++k)
        if (t.exponents(k) != Scalar(0)) used[static_cast<std::size_t>(k)] = 1;
    for (Index k = 0; k < n_vars; ++k)
      if (used[static_cast<std::size_t>(k)]) out.active.push_back(k);
    const Index rows = static_cast<Index>(terms.size());
    const Index cols = static_cast<Index>(out.active.size());
    out.b_local.resize(rows, cols);
    out.log_coeff.resize(rows);
    for (Index m = 0; m < rows; ++m) {
      const auto& t = terms[static_cast<std::size_t>(m)];
      out.log_coeff(m) = std::log(t.coeff);
      for (Index c = 0; c < cols; ++c) out.b_local(m, c) = t.exponents(out.active[static_cast<std::size_t>(c)]);
    }
    return out;
  }

  Scalar value(const VectorX<Scalar>& x, VectorX<Scalar>& z_scratch) const {
    z_scratch = log_coeff;
    for (Index c = 0; c < b_local.cols(); ++c)
      z_scratch += b_local.col(c) * x(active[static_cast<std::size_t>(c)]);
    const Scalar zmax = z_scratch.maxCoeff();
    return zmax + std::log((z_scratch.array() - zmax).exp().sum());
  }

  /// Value plus softmax weights for gradient/Hessian assembly.
  Scalar value_weights(const VectorX<Scalar>& x, VectorX<Scalar>& w) const {
    w = log_coeff;
    for (Index c = 0; c < b_local.cols(); ++c)
      w += b_local.col(c) * x(active[static_cast<std::size_t>(c)]);
    const Scalar zmax = w.maxCoeff();
    w = (w.array() - zmax).exp();
    const Scalar total = w.sum();
    const Scalar val = zmax + std::log(total);
    w /= total;
    return val;
  }
};

/// Shared state for one barrier solve: compiled objective and constraints,
/// equality-eliminated coordinates, and scratch buffers.
template <typename Scalar>
class BarrierSolver {
 public:
  BarrierSolver(const GpProblem<Scalar>& problem, const GpSolveOptions<Scalar>& opts)
      : opts_(opts), n_(problem.n_vars) {
    objective_ = CompiledPosy<Scalar>::compile(problem.objective_terms, n_);
    constraints_.reserve(problem.inequalities.size());
    for (const auto& p : problem.inequalities)
      constraints_.push_back(CompiledPosy<Scalar>::compile(p.terms(), n_));
    setup_equalities(problem);
  }

  bool equalities_consistent() const { return eq_consistent_; }
  Index reduced_dim() const { return eq_basis_.size() > 0 ? eq_basis_.cols() : n_; }
  const VectorX<Scalar>& particular() const { return eq_particular_; }

  /// Orthogonal projection of a log-domain point onto the equality manifold.
  VectorX<Scalar> project(const VectorX<Scalar>& x) const {
    if (n_eq_ == 0) return x;
    if (eq_basis_.cols() == 0) return eq_particular_;
    return eq_particular_ + eq_basis_ * (eq_basis_.transpose() * (x - eq_particular_));
  }

  Scalar constraint_value(Index i, const VectorX<Scalar>& x) {
    return constraints_[static_cast<std::size_t>(i)].value(x, scratch_);
  }

  Scalar max_constraint(const VectorX<Scalar>& x) {
    Scalar worst = -std::numeric_limits<Scalar>::infinity();
    for (auto& c : constraints_) worst = std::max(worst, c.value(x, scratch_));
    return worst;
  }

  Scalar objective_value(const VectorX<Scalar>& x) { return objective_.value(x, scratch_); }

  Index n_constraints() const { return static_cast<Index>(constraints_.size()); }

  struct CenterResult {
    bool converged = false;
    bool diverged = false;   // log-domain norm guard tripped
    int steps = 0;
  };

  /// Damped Newton on t * F0 + barrier, in the equality-reduced coordinates.
  /// Optional early exit once the given coordinate drops below a threshold
  /// (phase-1 shortcut). x must enter strictly feasible and on the manifold.
  CenterResult center(VectorX<Scalar>& x, Scalar t, Scalar decrement_tol, int max_steps,
                      int& budget, Index watch_var = -1,
                      Scalar watch_threshold = std::numeric_limits<Scalar>::quiet_NaN()) {
    CenterResult res;
    const Index m = n_constraints();
    const bool reduced = n_eq_ > 0;
    const Index dim = reduced ? eq_basis_.cols() : n_;
    if (dim == 0) {  // equalities pin a unique point; nothing to iterate
      res.converged = true;
      return res;
    }
    VectorX<Scalar> grad(n_), w, gl;
    MatrixX<Scalar> hess(n_, n_);
    std::vector<Scalar> fvals(static_cast<std::size_t>(m));
    Scalar prev_decrement = std::numeric_limits<Scalar>::infinity();
    bool prev_was_pure = false;
    for (int it = 0; it < max_steps && budget > 0; ++it, --budget) {
      ++res.steps;
      if (watch_var >= 0 && x(watch_var) < watch_threshold) {
        res.converged = true;
        return res;
      }
      grad.setZero();
      hess.setZero();
      // t * objective
      const Scalar f0 = objective_.value_weights(x, w);
      accumulate(objective_, w, t, grad, hess);
      Scalar phi = t * f0;
      // barrier over inequalities
      bool interior = true;
      for (Index i = 0; i < m; ++i) {
        auto& c = constraints_[static_cast<std::size_t>(i)];
        const Scalar fi = c.value_weights(x, w);
        fvals[static_cast<std::size_t>(i)] = fi;
        if (fi >= Scalar(0)) { interior = false; break; }
        phi -= std::log(-fi);
        const Scalar inv = Scalar(1) / (-fi);
        gl.noalias() = c.b_local.transpose() * w;
        for (Index r = 0; r < c.b_local.cols(); ++r) {
          const Index gr = c.active[static_cast<std::size_t>(r)];
          grad(gr) += inv * gl(r);
          for (Index s = 0; s <= r; ++s) {
            const Index gs = c.active[static_cast<std::size_t>(s)];
            Scalar hrs = inv * (c.b_local.col(r).dot(w.cwiseProduct(c.b_local.col(s))) - gl(r) * gl(s));
            hrs += inv * inv * gl(r) * gl(s);
            hess(gr, gs) += hrs;
            if (s != r) hess(gs, gr) += hrs;
          }
        }
      }
      detail::require(interior, "BarrierSolver: centering started outside the interior");

      // reduce, regularize, solve
      VectorX<Scalar> g_r = reduced ? VectorX<Scalar>(eq_basis_.transpose() * grad) : grad;
      MatrixX<Scalar> h_r = reduced ? MatrixX<Scalar>(eq_basis_.transpose() * hess * eq_basis_) : hess;
      const Scalar ridge = Scalar(1e-12) * (Scalar(1) + h_r.diagonal().cwiseAbs().maxCoeff());
      h_r.diagonal().array() += ridge;
      Eigen::LDLT<MatrixX<Scalar>> ldlt(h_r);
      VectorX<Scalar> step_r = -ldlt.solve(g_r);
      if (ldlt.info() != Eigen::Success || !step_r.allFinite()) {
        h_r.diagonal().array() += ridge * Scalar(100);
        ldlt.compute(h_r);
        step_r = -ldlt.solve(g_r);
        if (ldlt.info() != Eigen::Success || !step_r.allFinite())
          throw NumericalError("BarrierSolver: Newton system could not be factorized");
      }
      const Scalar decrement_sq = -g_r.dot(step_r);
#ifdef NETGAIN_GP_TRACE
      std::fprintf(stderr, "[center t=%.3e it=%d] dec2=%.6e\n", static_cast<double>(t), it,
                   static_cast<double>(decrement_sq));
#endif
      if (decrement_sq / Scalar(2) <= decrement_tol) {
        res.converged = true;
        return res;
      }
      VectorX<Scalar> step = reduced ? VectorX<Scalar>(eq_basis_ * step_r) : step_r;
      // log-domain trust cap: flat directions under the ridge would otherwise
      // overflow the exponential map in one accepted step
      const Scalar step_norm = step.template lpNorm<Eigen::Infinity>();
      const Scalar alpha_max = step_norm > Scalar(50) ? Scalar(50) / step_norm : Scalar(1);
      VectorX<Scalar> xt(n_);

      // Near the center the merit value t * F0 is large enough that double
      // rounding hides true decreases, so sufficient decrease is judged on
      // the decrement instead: take plain Newton steps while the decrement
      // keeps contracting, and read a stalled contraction as the rounding
      // floor.
      if (decrement_sq <= Scalar(1e-2) && alpha_max == Scalar(1)) {
        if (prev_was_pure && !(decrement_sq <= Scalar(0.5) * prev_decrement)) {
          res.converged = true;
          return res;
        }
        xt = x + step;
        bool interior_step = true;
        for (Index i = 0; i < m && interior_step; ++i)
          if (constraints_[static_cast<std::size_t>(i)].value(xt, scratch_) >= Scalar(0))
            interior_step = false;
        if (interior_step) {
          prev_was_pure = true;
          prev_decrement = decrement_sq;
          x = xt;
          if (x.cwiseAbs().maxCoeff() > opts_.unbounded_log_limit) {
            res.diverged = true;
            return res;
          }
          continue;
        }
      }

      // damped phase: Armijo backtracking, staying strictly interior
      const Scalar slope = g_r.dot(step_r);
      Scalar alpha = alpha_max;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        xt = x + alpha * step;
        bool ok = true;
        Scalar phi_t = t * objective_.value(xt, scratch_);
        for (Index i = 0; i < m && ok; ++i) {
          const Scalar fi = constraints_[static_cast<std::size_t>(i)].value(xt, scratch_);
          if (fi >= Scalar(0)) ok = false;
          else phi_t -= std::log(-fi);
        }
        if (ok && phi_t <= phi + opts_.armijo_c * alpha * slope) {
          moved = true;
          break;
        }
        alpha *= opts_.backtrack;
      }
      if (!moved) {  // stalled line search: treat current point as centered
        res.converged = true;
        return res;
      }
      prev_was_pure = false;
      x = xt;
      if (x.cwiseAbs().maxCoeff() > opts_.unbounded_log_limit) {
        res.diverged = true;
        return res;
      }
    }
    return res;
  }

  /// Projected Lagrangian gradient norm. Barrier multipliers 1/(t(-f_i)) are
  /// refined by a least-squares fit over the near-active set: the barrier's
  /// stiff direction amplifies one-ulp iterate errors far beyond the true
  /// stationarity residual, and the fit absorbs exactly that component.
  Scalar kkt_residual(const VectorX<Scalar>& x, Scalar t) {
    if (n_eq_ > 0 && eq_basis_.cols() == 0) return Scalar(0);
    const bool reduced = n_eq_ > 0;
    const Index dim = reduced ? eq_basis_.cols() : n_;
    const Index m = n_constraints();
    VectorX<Scalar> w, g_full(n_);
    g_full.setZero();
    objective_.value_weights(x, w);
    scatter_gradient(objective_, w, Scalar(1), g_full);
    VectorX<Scalar> r0 = reduced ? VectorX<Scalar>(eq_basis_.transpose() * g_full) : g_full;

    MatrixX<Scalar> grads(dim, m);
    VectorX<Scalar> lambda(m);
    Scalar lam_max = Scalar(0);
    for (Index i = 0; i < m; ++i) {
      auto& c = constraints_[static_cast<std::size_t>(i)];
      const Scalar fi = c.value_weights(x, w);
      if (fi >= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
      lambda(i) = Scalar(1) / (t * (-fi));
      lam_max = std::max(lam_max, lambda(i));
      g_full.setZero();
      scatter_gradient(c, w, Scalar(1), g_full);
      grads.col(i) = reduced ? VectorX<Scalar>(eq_basis_.transpose() * g_full) : g_full;
    }
    Scalar best = (r0 + grads * lambda).template lpNorm<Eigen::Infinity>();
    if (m > 0) {
      std::vector<Index> active;
      for (Index i = 0; i < m; ++i)
        if (lambda(i) > Scalar(1e-8) * (Scalar(1) + lam_max)) active.push_back(i);
      if (!active.empty()) {
        MatrixX<Scalar> ga(dim, static_cast<Index>(active.size()));
        for (std::size_t a = 0; a < active.size(); ++a) ga.col(static_cast<Index>(a)) = grads.col(active[a]);
        VectorX<Scalar> lam_ls = ga.completeOrthogonalDecomposition().solve(-r0);
        lam_ls = lam_ls.cwiseMax(Scalar(0));
        best = std::min(best, (r0 + ga * lam_ls).template lpNorm<Eigen::Infinity>());
      }
    }
    return best;
  }

 private:
  void setup_equalities(const GpProblem<Scalar>& problem) {
    n_eq_ = static_cast<Index>(problem.equalities.size());
    eq_consistent_ = true;
    if (n_eq_ == 0) {
      eq_particular_ = VectorX<Scalar>::Zero(n_);
      return;
    }
    MatrixX<Scalar> a(n_eq_, n_);
    VectorX<Scalar> r(n_eq_);
    for (Index j = 0; j < n_eq_; ++j) {
      const auto& m = problem.equalities[static_cast<std::size_t>(j)];
      a.row(j) = m.exponents.transpose();
      r(j) = -std::log(m.coeff);
    }
    eq_particular_ = a.completeOrthogonalDecomposition().solve(r);
    if ((a * eq_particular_ - r).template lpNorm<Eigen::Infinity>() > Scalar(1e-9)) {
      eq_consistent_ = false;
      return;
    }
    Eigen::FullPivLU<MatrixX<Scalar>> lu(a);
    MatrixX<Scalar> kernel = lu.kernel();
    if (lu.dimensionOfKernel() == 0) {
      eq_basis_.resize(n_, 0);
      return;
    }
    Eigen::HouseholderQR<MatrixX<Scalar>> qr(kernel);
    eq_basis_ = qr.householderQ() * MatrixX<Scalar>::Identity(n_, kernel.cols());
  }

  void accumulate(const CompiledPosy<Scalar>& c, const VectorX<Scalar>& w, Scalar scale,
                  VectorX<Scalar>& grad, MatrixX<Scalar>& hess) {
    VectorX<Scalar> gl = c.b_local.transpose() * w;
    for (Index r = 0; r < c.b_local.cols(); ++r) {
      const Index gr = c.active[static_cast<std::size_t>(r)];
      grad(gr) += scale * gl(r);
      for (Index s = 0; s <= r; ++s) {
        const Index gs = c.active[static_cast<std::size_t>(s)];
        const Scalar hrs =
            scale * (c.b_local.col(r).dot(w.cwiseProduct(c.b_local.col(s))) - gl(r) * gl(s));
        hess(gr, gs) += hrs;
        if (s != r) hess(gs, gr) += hrs;
      }
    }
  }

  void scatter_gradient(const CompiledPosy<Scalar>& c, const VectorX<Scalar>& w, Scalar scale,
                        VectorX<Scalar>& grad) {
    VectorX<Scalar> gl = c.b_local.transpose() * w;
    for (Index r = 0; r < c.b_local.cols(); ++r)
      grad(c.active[static_cast<std::size_t>(r)]) += scale * gl(r);
  }

  GpSolveOptions<Scalar> opts_;
  Index n_;
  Index n_eq_ = 0;
  bool eq_consistent_ = true;
  CompiledPosy<Scalar> objective_;
  std::vector<CompiledPosy<Scalar>> constraints_;
  MatrixX<Scalar> eq_basis_;        // orthonormal null-space basis, n x dim
  VectorX<Scalar> eq_particular_;   // least-squares equality solution
  VectorX<Scalar> scratch_;
};

/// Interior starting heuristic: single-term single-variable inequalities are
/// read as box bounds and the start sits at the log-domain midpoint.
template <typename Scalar>
VectorX<Scalar> box_interior_start(const GpProblem<Scalar>& problem) {
  const Index n = problem.n_vars;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  VectorX<Scalar> lower = VectorX<Scalar>::Constant(n, -inf);
  VectorX<Scalar> upper = VectorX<Scalar>::Constant(n, inf);
  for (const auto& p : problem.inequalities) {
    if (p.n_terms() != 1) continue;
    const auto& t = p.terms()[0];
    Index var = -1;
    bool single = true;
    for (Index k = 0; k < n; ++k) {
      if (t.exponents(k) == Scalar(0)) continue;
      if (var >= 0) { single = false; break; }
      var = k;
    }
    if (!single || var < 0) continue;
    const Scalar e = t.exponents(var);
    const Scalar bound = -std::log(t.coeff) / e;  // c * eta^e <= 1 boundary
    if (e > Scalar(0)) upper(var) = std::min(upper(var), bound);
    else lower(var) = std::max(lower(var), bound);
  }
  VectorX<Scalar> x = VectorX<Scalar>::Zero(n);
  const Scalar margin = std::log(Scalar(2));
  for (Index k = 0; k < n; ++k) {
    const bool has_lo = std::isfinite(static_cast<double>(lower(k)));
    const bool has_hi = std::isfinite(static_cast<double>(upper(k)));
    if (has_lo && has_hi) x(k) = (lower(k) + upper(k)) / Scalar(2);
    else if (has_hi) x(k) = upper(k) - margin;
    else if (has_lo) x(k) = lower(k) + margin;
  }
  return x;
}

/// Phase-1 problem: minimize s subject to f_i / s <= 1. Strictly feasible by
/// construction once s clears every constraint value.
template <typename Scalar>
GpProblem<Scalar> phase1_problem(const GpProblem<Scalar>& problem) {
  const Index n = problem.n_vars;
  GpProblem<Scalar> aug(n + 1);
  for (Index k = 0; k < n; ++k) aug.var_names[static_cast<std::size_t>(k)] = problem.var_names[static_cast<std::size_t>(k)];
  aug.var_names[static_cast<std::size_t>(n)] = "slack";
  aug.add_objective_term(Monomial<Scalar>::variable(n + 1, n));
  for (const auto& p : problem.inequalities) {
    Posynomial<Scalar> q(n + 1);
    for (const auto& t : p.terms()) {
      Monomial<Scalar> mt;
      mt.coeff = t.coeff;
      mt.exponents = VectorX<Scalar>::Zero(n + 1);
      mt.exponents.head(n) = t.exponents;
      mt.exponents(n) = Scalar(-1);
      q.add_term(std::move(mt));
    }
    aug.add_inequality(std::move(q));
  }
  for (const auto& m : problem.equalities) {
    Monomial<Scalar> me;
    me.coeff = m.coeff;
    me.exponents = VectorX<Scalar>::Zero(n + 1);
    me.exponents.head(n) = m.exponents;
    aug.add_equality(std::move(me));
  }
  return aug;
}

}  // namespace detail

/// Freeze a subset of variables at positive values. Remaining variables keep
/// their relative order; frozen factors fold into coefficients. An equality
/// reduced to a constant must already hold, otherwise the restriction is
/// reported as infeasible.
template <typename Scalar>
GpProblem<Scalar> substitute(const GpProblem<Scalar>& problem,
                             const std::vector<std::pair<Index, Scalar>>& fixed) {
  problem.validate();
  const Index n = problem.n_vars;
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  VectorX<Scalar> values = VectorX<Scalar>::Ones(n);
  for (const auto& [k, v] : fixed) {
    detail::require(k >= 0 && k < n, "substitute: variable index out of range");
    detail::require(v > Scalar(0) && std::isfinite(static_cast<double>(v)),
                    "substitute: values must be positive and finite");
    detail::require(!mask[static_cast<std::size_t>(k)], "substitute: duplicate variable index");
    mask[static_cast<std::size_t>(k)] = 1;
    values(k) = v;
  }
  std::vector<Index> keep;
  for (Index k = 0; k < n; ++k)
    if (!mask[static_cast<std::size_t>(k)]) keep.push_back(k);
  detail::require(!keep.empty(), "substitute: at least one variable must remain");

  GpProblem<Scalar> out(static_cast<Index>(keep.size()));
  for (std::size_t t = 0; t < keep.size(); ++t)
    out.var_names[t] = problem.var_names[static_cast<std::size_t>(keep[t])];
  for (const auto& t : problem.objective_terms)
    out.add_objective_term(t.restricted(keep, values, mask));
  for (const auto& p : problem.inequalities) {
    Posynomial<Scalar> q(out.n_vars);
    for (const auto& t : p.terms()) q.add_term(t.restricted(keep, values, mask));
    out.add_inequality(std::move(q));
  }
  for (const auto& m : problem.equalities) {
    Monomial<Scalar> r = m.restricted(keep, values, mask);
    if ((r.exponents.array() == Scalar(0)).all()) {
      if (std::abs(r.coeff - Scalar(1)) > Scalar(1e-9))
        throw InfeasibleError("substitute: equality fixed to a constant other than one");
      continue;
    }
    out.add_equality(std::move(r));
  }
  return out;
}

/// Phase-1 feasibility check: minimizes the uniform constraint slack. The
/// verdict compares the slack optimum against one with a small margin; the
/// solve is cut short as soon as the slack is clearly below one.
template <typename Scalar>
FeasibilityReport<Scalar> feasibility(const GpProblem<Scalar>& problem,
                                      const GpSolveOptions<Scalar>& opts = {}) {
  problem.validate();
  FeasibilityReport<Scalar> report;
  const Index n = problem.n_vars;
  if (problem.inequalities.empty()) {
    detail::BarrierSolver<Scalar> plain(problem, opts);
    if (!plain.equalities_consistent()) {
      report.feasible = false;
      return report;
    }
    report.feasible = true;
    report.slack_optimum = Scalar(0);
    report.eta = plain.project(VectorX<Scalar>::Zero(n)).array().exp();
    return report;
  }

  GpProblem<Scalar> aug = detail::phase1_problem(problem);
  detail::BarrierSolver<Scalar> solver(aug, opts);
  if (!solver.equalities_consistent()) {
    report.feasible = false;
    report.slack_optimum = std::numeric_limits<Scalar>::infinity();
    return report;
  }

  // start: box heuristic projected onto the equality manifold (the slack
  // column is absent from every equality, so projection leaves it alone),
  // slack lifted a factor two above the worst constraint
  VectorX<Scalar> x(n + 1);
  x.head(n) = detail::box_interior_start(problem);
  x(n) = Scalar(0);
  x = solver.project(x);
  x(n) = solver.max_constraint(x) + std::log(Scalar(2));

  int budget = opts.max_newton;
  Scalar t = opts.t0;
  const Index m = solver.n_constraints();
  const Scalar early = std::log(Scalar(1) - Scalar(1e-4));
  bool early_exit = false;
  for (int outer = 0; outer < 200 && budget > 0; ++outer) {
    auto res = solver.center(x, t, opts.newton_tol, opts.max_newton_per_center, budget, n, early);
    report.iterations += res.steps;
    if (x(n) < early) { early_exit = true; break; }
    if (res.diverged) break;
    if (Scalar(m) / t < opts.gap_tol) break;
    t *= opts.mu;
  }
  report.slack_optimum = std::exp(x(n));
  report.eta = x.head(n).array().exp();
  report.feasible = early_exit || report.slack_optimum <= Scalar(1) + opts.infeasible_margin;
  return report;
}

/// Interior-point solve in the log domain: phase 1 when no strictly feasible
/// start is at hand, then a standard barrier path with Newton centering.
template <typename Scalar>
GpSolution<Scalar> solve(const GpProblem<Scalar>& problem, const GpSolveOptions<Scalar>& opts = {}) {
  problem.validate();
  GpSolution<Scalar> sol;
  const Index n = problem.n_vars;
  detail::BarrierSolver<Scalar> solver(problem, opts);
  if (!solver.equalities_consistent()) {
    sol.status = GpStatus::infeasible;
    return sol;
  }

  // starting point: caller-supplied, else box heuristic; projected onto the
  // equality manifold either way
  VectorX<Scalar> x;
  if (opts.initial_eta && opts.initial_eta->size() == n &&
      (opts.initial_eta->array() > Scalar(0)).all()) {
    x = solver.project(opts.initial_eta->array().log().matrix());
    if (!x.allFinite() || solver.max_constraint(x) >= Scalar(-1e-10))
      x = solver.project(detail::box_interior_start(problem));
  } else {
    x = solver.project(detail::box_interior_start(problem));
  }

  if (solver.reduced_dim() == 0) {
    // equalities pin a unique point
    x = solver.project(x);
    const Scalar worst = solver.max_constraint(x);
    if (worst > Scalar(1e-9)) {
      sol.status = GpStatus::infeasible;
      return sol;
    }
    sol.status = GpStatus::optimal;
    sol.eta = x.array().exp();
    sol.objective_value = std::exp(solver.objective_value(x));
    sol.kkt_residual = Scalar(0);
    return sol;
  }

  if (solver.n_constraints() > 0 && solver.max_constraint(x) >= Scalar(-1e-10)) {
    FeasibilityReport<Scalar> phase1 = feasibility(problem, opts);
    sol.iterations += phase1.iterations;
    sol.phase1_objective = phase1.slack_optimum;
    if (!phase1.feasible) {
      sol.status = GpStatus::infeasible;
      sol.eta = phase1.eta;
      return sol;
    }
    x = solver.project(phase1.eta.array().log().matrix());
    if (solver.max_constraint(x) >= Scalar(0)) {
      // projection pushed the phase-1 point out of the interior
      sol.status = GpStatus::infeasible;
      sol.eta = phase1.eta;
      return sol;
    }
  }

  // barrier path
  int budget = opts.max_newton;
  Scalar t = opts.t0;
  const Index m = solver.n_constraints();
  bool diverged = false;
  bool exhausted = false;
  if (m == 0) {
    auto res = solver.center(x, Scalar(1), opts.newton_tol, opts.max_newton, budget);
    sol.iterations += res.steps;
    diverged = res.diverged;
    exhausted = !res.converged && !res.diverged;
    t = Scalar(1);
  } else {
    for (int outer = 0; outer < 200; ++outer) {
      auto res = solver.center(x, t, opts.newton_tol, opts.max_newton_per_center, budget);
      sol.iterations += res.steps;
      if (res.diverged) { diverged = true; break; }
      if (budget <= 0) { exhausted = true; break; }
      if (Scalar(m) / t < opts.gap_tol) break;
      t *= opts.mu;
    }
    if (!diverged && !exhausted) {
      // final polish at the last barrier parameter
      auto res = solver.center(x, t, opts.polish_tol, 20, budget);
      sol.iterations += res.steps;
    }
  }

  sol.eta = x.array().exp();
  sol.objective_value = std::exp(solver.objective_value(x));
  sol.kkt_residual = solver.kkt_residual(x, t);
  if (diverged) sol.status = GpStatus::unbounded;
  else if (exhausted || !(sol.kkt_residual <= Scalar(1e-7))) sol.status = GpStatus::max_iterations;
  else sol.status = GpStatus::optimal;
  return sol;
}

/// Structured text form for fixtures and debugging: one block per section,
/// each term printed as coefficient, a bar, then the exponent row.
template <typename Scalar>
std::string dump(const GpProblem<Scalar>& problem) {
  std::ostringstream out;
  out << "vars:";
  for (const auto& name : problem.var_names) out << ' ' << name;
  out << "\nminimize:\n";
  detail::dump_terms(out, problem.objective_terms);
  for (std::size_t i = 0; i < problem.inequalities.size(); ++i) {
    out << "subject_to <= 1 [" << i << "]:\n";
    detail::dump_terms(out, problem.inequalities[i].terms());
  }
  for (std::size_t j = 0; j < problem.equalities.size(); ++j) {
    out << "subject_to == 1 [" << j << "]:\n";
    std::vector<Monomial<Scalar>> one{problem.equalities[j]};
    detail::dump_terms(out, one);
  }
  return out.str();
}

}  // namespace netgain
