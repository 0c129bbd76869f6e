#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netgain/cost.hpp"
#include "netgain/fm.hpp"
#include "netgain/gp.hpp"
#include "netgain/posynomial.hpp"
#include "netgain/robust.hpp"
#include "netgain/topology.hpp"
#include "netgain/types.hpp"

namespace netgain {

/// Round-robin game settings. Player 0 owns nodes [0, split) and updates
/// every c1 rounds; player 1 owns [split, n) and updates every c2 rounds.
/// q1_bar and q2_bar bound the attack in the induced 1-norm and 2-norm.
template <typename Scalar = double>
struct GameConfig {
  Scalar q1_bar = Scalar(2.25);
  Scalar q2_bar = Scalar(0.5);
  Scalar varsigma = Scalar(0.01);
  int c1 = 2;
  int c2 = 3;
  Scalar tol = Scalar(1e-4);
  int max_rounds = 200;

  void validate() const {
    detail::require(q1_bar >= Scalar(0) && q2_bar >= Scalar(0),
                    "GameConfig: attack budgets must be nonnegative");
    detail::require(varsigma > Scalar(0) && varsigma < Scalar(1),
                    "GameConfig: decay margin must lie in (0, 1)");
    detail::require(c1 >= 1 && c2 >= 1, "GameConfig: update periods must be >= 1");
    detail::require(tol > Scalar(0), "GameConfig: tolerance must be positive");
    detail::require(max_rounds >= 1, "GameConfig: need at least one round");
  }
};

/// Stability rows seen by a policymaker: the robust families specialized to
/// identity injection and gain-proportional readout, so the network's own
/// interference gains set how hard an attack bites. Blocks are per node.
/// With q2_col >= 0 the 2-norm budget enters as a variable with exponent
/// one half instead of a constant factor; q2_bar is ignored then.
template <typename Scalar>
std::vector<Posynomial<Scalar>> build_game_rows(const Topology<Scalar>& topo,
                                                const FmParams<Scalar>& params, Scalar q1_bar,
                                                Scalar q2_bar, const RobustVarLayout& layout,
                                                Index n_vars, Index q2_col, Scalar varsigma) {
  const Index n = topo.size();
  detail::require(params.size() == n, "build_game_rows: parameter dimension mismatch");
  detail::require(layout.n_nodes == n && layout.n_blocks == n, "build_game_rows: layout mismatch");
  detail::require(n_vars >= layout.total(), "build_game_rows: variable count too small");
  detail::require(q2_col < n_vars, "build_game_rows: budget column out of range");
  detail::require(varsigma > Scalar(0) && varsigma < Scalar(1),
                  "build_game_rows: decay margin must lie in (0, 1)");
  detail::require(q1_bar >= Scalar(0) && (q2_col >= 0 || q2_bar >= Scalar(0)),
                  "build_game_rows: attack budgets must be nonnegative");
  const auto& a = topo.adjacency();
  const Scalar root1 = std::sqrt(q1_bar);
  const Scalar root2 = q2_col >= 0 ? Scalar(1) : std::sqrt(q2_bar);
  const Scalar half = Scalar(0.5);
  // attack terms carry q^(1/2) as an explicit exponent in variable-budget mode
  auto q_half = [&](Monomial<Scalar>& m) {
    if (q2_col >= 0) m.exponents(q2_col) += half;
  };

  std::vector<Posynomial<Scalar>> rows;
  rows.reserve(static_cast<std::size_t>(6 * n));
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(n_vars);
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, n_vars, params.k(j) * params.gamma_bar(j) * a(j, i) / params.k(i),
                       {{layout.g_at(i), Scalar(1)},
                        {layout.h_at(j), Scalar(-1)},
                        {layout.rho_at(j), Scalar(1)},
                        {layout.rho_at(i), Scalar(-1)}});
    detail::add_term(row, n_vars, varsigma / params.k(i), {});
    detail::add_term(row, n_vars, root1 / params.k(i),
                     {{layout.g_at(i), Scalar(1)}, {layout.rho_at(i), Scalar(-1)}});
    detail::push_if_nonempty(rows, std::move(row));
  }
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(n_vars);
    detail::add_term(row, n_vars, root1 * params.gamma_bar(i) * params.k(i),
                     {{layout.h_at(i), Scalar(-1)}, {layout.rho_at(i), Scalar(1)}});
    detail::push_if_nonempty(rows, std::move(row));
  }
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(n_vars);
    if (root2 > Scalar(0)) {
      Monomial<Scalar> m = Monomial<Scalar>::constant(n_vars, root2);
      m.exponents(layout.g_at(i)) += Scalar(1);
      m.exponents(layout.pi_at(i)) += half;
      m.exponents(layout.xi_at(i)) += Scalar(1);
      m.exponents(layout.v_at(i)) -= Scalar(1);
      q_half(m);
      row.add_term(std::move(m));
    }
    detail::push_if_nonempty(rows, std::move(row));
  }
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(n_vars);
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, n_vars, params.gamma_bar(i) * a(i, j),
                       {{layout.h_at(i), Scalar(-1)},
                        {layout.g_at(j), Scalar(1)},
                        {layout.xi_at(j), Scalar(1)},
                        {layout.xi_at(i), Scalar(-1)}});
    detail::add_term(row, n_vars, varsigma / params.k(i), {});
    if (root2 * params.gamma_bar(i) > Scalar(0)) {
      Monomial<Scalar> m = Monomial<Scalar>::constant(n_vars, root2 * params.gamma_bar(i));
      m.exponents(layout.h_at(i)) -= Scalar(1);
      m.exponents(layout.pi_at(i)) -= half;
      m.exponents(layout.u_at(i)) += Scalar(1);
      m.exponents(layout.xi_at(i)) -= Scalar(1);
      q_half(m);
      row.add_term(std::move(m));
    }
    detail::push_if_nonempty(rows, std::move(row));
  }
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(n_vars);
    if (root2 * params.gamma_bar(i) > Scalar(0)) {
      Monomial<Scalar> m =
          Monomial<Scalar>::constant(n_vars, root2 * params.gamma_bar(i) * params.k(i));
      m.exponents(layout.u_at(i)) -= Scalar(1);
      m.exponents(layout.pi_at(i)) -= half;
      m.exponents(layout.h_at(i)) -= Scalar(1);
      m.exponents(layout.zeta_at(i)) += Scalar(1);
      q_half(m);
      row.add_term(std::move(m));
    }
    detail::push_if_nonempty(rows, std::move(row));
  }
  for (Index i = 0; i < n; ++i) {
    Posynomial<Scalar> row(n_vars);
    for (Index j = 0; j < n; ++j)
      detail::add_term(row, n_vars, params.gamma_bar(j) * params.k(j) * a(j, i) / params.k(i),
                       {{layout.g_at(i), Scalar(1)},
                        {layout.h_at(j), Scalar(-1)},
                        {layout.zeta_at(j), Scalar(1)},
                        {layout.zeta_at(i), Scalar(-1)}});
    detail::add_term(row, n_vars, varsigma / params.k(i), {});
    if (root2 > Scalar(0)) {
      Monomial<Scalar> m = Monomial<Scalar>::constant(n_vars, root2 / params.k(i));
      m.exponents(layout.g_at(i)) += Scalar(1);
      m.exponents(layout.pi_at(i)) += half;
      m.exponents(layout.v_at(i)) += Scalar(1);
      m.exponents(layout.zeta_at(i)) -= Scalar(1);
      q_half(m);
      row.add_term(std::move(m));
    }
    detail::push_if_nonempty(rows, std::move(row));
  }
  return rows;
}

/// One policymaker's program after the other side's gains are frozen in.
/// kept maps reduced columns back to the full layout; reduced_of is the
/// inverse with -1 on frozen columns.
template <typename Scalar = double>
struct GameProgram {
  GpProblem<Scalar> problem;
  RobustVarLayout layout;
  std::vector<Index> kept;
  std::vector<Index> reduced_of;
};

namespace detail {

template <typename Scalar>
GameProgram<Scalar> reduce_program(GpProblem<Scalar>&& full, const RobustVarLayout& layout,
                                   const std::vector<std::pair<Index, Scalar>>& frozen) {
  const Index nv = full.n_vars;
  std::vector<char> is_frozen(static_cast<std::size_t>(nv), 0);
  for (const auto& [col, val] : frozen) is_frozen[static_cast<std::size_t>(col)] = 1;
  GameProgram<Scalar> prog{substitute(full, frozen), layout, {}, {}};
  prog.reduced_of.assign(static_cast<std::size_t>(nv), -1);
  for (Index col = 0; col < nv; ++col)
    if (!is_frozen[static_cast<std::size_t>(col)]) {
      prog.reduced_of[static_cast<std::size_t>(col)] = static_cast<Index>(prog.kept.size());
      prog.kept.push_back(col);
    }
  return prog;
}

}  // namespace detail

/// Program solved at a policymaker's turn: minimize its own shifted
/// investment cost over its gains and a full fresh certificate, with the
/// other side's gains frozen at the current operating point.
template <typename Scalar>
GameProgram<Scalar> assemble_q(const Topology<Scalar>& topo, const FmParams<Scalar>& params,
                               const CostModel<Scalar>& cost, const GameConfig<Scalar>& cfg,
                               int player, const GainProfile<Scalar>& frozen) {
  cfg.validate();
  detail::require(player == 0 || player == 1, "assemble_q: player must be 0 or 1");
  const Index n = topo.size();
  detail::require(params.size() == n && frozen.size() == n, "assemble_q: dimension mismatch");
  const Index lo = player == 0 ? 0 : topo.split();
  const Index hi = player == 0 ? topo.split() : n;
  const RobustVarLayout layout{n, n};
  const Index nv = layout.total();

  GpProblem<Scalar> gp(nv);
  gp.var_names = layout.names();
  for (auto& t : shifted_cost_terms(cost, nv, layout.g_at(lo), layout.h_at(lo), hi - lo))
    gp.add_objective_term(std::move(t));
  for (auto& row :
       build_game_rows(topo, params, cfg.q1_bar, cfg.q2_bar, layout, nv, Index(-1), cfg.varsigma))
    gp.add_inequality(std::move(row));
  const auto& b = cost.bounds;
  for (Index i = lo; i < hi; ++i) {
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

  std::vector<std::pair<Index, Scalar>> frozen_cols;
  for (Index j = 0; j < n; ++j) {
    if (j >= lo && j < hi) continue;
    frozen_cols.push_back({layout.g_at(j), frozen.g(j)});
    frozen_cols.push_back({layout.h_at(j), frozen.h(j)});
  }
  return detail::reduce_program(std::move(gp), layout, frozen_cols);
}

/// Largest 2-norm attack budget certifiable with every gain frozen at the
/// given operating point: the budget becomes a variable and its reciprocal
/// the objective. The same certificate then witnesses feasibility of both
/// players' opening programs at any smaller budget, so the result is shaved
/// by a relative 1e-4 before use.
template <typename Scalar>
Scalar find_qmax(const Topology<Scalar>& topo, const FmParams<Scalar>& params,
                 const GameConfig<Scalar>& cfg, const GainProfile<Scalar>& theta0) {
  cfg.validate();
  const Index n = topo.size();
  detail::require(params.size() == n && theta0.size() == n, "find_qmax: dimension mismatch");
  detail::require((params.gamma_bar.array() > Scalar(0)).all(),
                  "find_qmax: needs strictly positive gamma_bar");
  const RobustVarLayout layout{n, n};
  const Index nv = layout.total() + 1;
  const Index q_col = layout.total();

  GpProblem<Scalar> gp(nv);
  gp.var_names = layout.names();
  gp.var_names.push_back("q2");
  gp.add_objective_term(Monomial<Scalar>::variable(nv, q_col, Scalar(1), Scalar(-1)));
  for (auto& row :
       build_game_rows(topo, params, cfg.q1_bar, Scalar(0), layout, nv, q_col, cfg.varsigma))
    gp.add_inequality(std::move(row));

  std::vector<std::pair<Index, Scalar>> frozen_cols;
  for (Index j = 0; j < n; ++j) {
    frozen_cols.push_back({layout.g_at(j), theta0.g(j)});
    frozen_cols.push_back({layout.h_at(j), theta0.h(j)});
  }
  const auto prog = detail::reduce_program(std::move(gp), layout, frozen_cols);
  const auto sol = solve(prog.problem, GpSolveOptions<Scalar>{});
  if (sol.status == GpStatus::infeasible)
    throw InfeasibleError(
        "find_qmax: the starting gains admit no stability certificate even without a 2-norm "
        "attack",
        static_cast<double>(sol.phase1_objective));
  if (sol.status != GpStatus::optimal)
    throw NumericalError("find_qmax: budget solve did not converge");
  const Scalar q_star = sol.eta(prog.reduced_of[static_cast<std::size_t>(q_col)]);
  return q_star * (Scalar(1) - Scalar(1e-4));
}

template <typename Scalar = double>
struct CostPoint {
  int round = 0;
  int player = 0;
  Scalar cost = Scalar(0);  // joint shifted investment cost after the update
};

template <typename Scalar = double>
struct EquilibriumResult {
  GainProfile<Scalar> theta;
  std::vector<CostPoint<Scalar>> trajectory;
  int rounds_used = 0;
  bool converged = false;
};

/// Round-robin best response from the box midpoint. Each player re-solves
/// its program on its own period, warm-started from its previous solution;
/// play stops once both players' latest updates moved their gains by at
/// most tol in the infinity norm.
template <typename Scalar>
EquilibriumResult<Scalar> run_hig(const Topology<Scalar>& topo, const FmParams<Scalar>& params,
                                  const CostModel<Scalar>& cost, const GameConfig<Scalar>& cfg) {
  cfg.validate();
  const Index n = topo.size();
  detail::require(params.size() == n, "run_hig: parameter dimension mismatch");

  EquilibriumResult<Scalar> res;
  res.theta = GainProfile<Scalar>::midpoint(n, cost.bounds);
  for (int player = 0; player < 2; ++player) {
    const auto prog = assemble_q(topo, params, cost, cfg, player, res.theta);
    const auto rep = feasibility(prog.problem, GpSolveOptions<Scalar>{});
    if (!rep.feasible)
      throw InfeasibleError("run_hig: player " + std::to_string(player) +
                                " has no feasible response at the starting gains",
                            static_cast<double>(rep.slack_optimum), 0);
  }

  const Scalar shift = l0_constant(n, cost);
  std::optional<VectorX<Scalar>> warm[2];
  Scalar last_change[2] = {std::numeric_limits<Scalar>::infinity(),
                           std::numeric_limits<Scalar>::infinity()};
  int updates[2] = {0, 0};

  for (int r = 1; r <= cfg.max_rounds; ++r) {
    res.rounds_used = r;
    for (int player = 0; player < 2; ++player) {
      const int period = player == 0 ? cfg.c1 : cfg.c2;
      if (r % period != 0) continue;
      const auto prog = assemble_q(topo, params, cost, cfg, player, res.theta);
      GpSolveOptions<Scalar> opts;
      if (warm[player]) opts.initial_eta = warm[player];
      const auto sol = solve(prog.problem, opts);
      if (sol.status == GpStatus::infeasible)
        throw InfeasibleError("run_hig: player " + std::to_string(player) +
                                  " lost feasibility at round " + std::to_string(r),
                              static_cast<double>(sol.phase1_objective), r);
      if (sol.status != GpStatus::optimal)
        throw NumericalError("run_hig: response solve stalled at round " + std::to_string(r));

      const Index lo = player == 0 ? 0 : topo.split();
      const Index hi = player == 0 ? topo.split() : n;
      Scalar change = Scalar(0);
      for (Index i = lo; i < hi; ++i) {
        Scalar g_new = sol.eta(prog.reduced_of[static_cast<std::size_t>(prog.layout.g_at(i))]);
        Scalar h_new = sol.eta(prog.reduced_of[static_cast<std::size_t>(prog.layout.h_at(i))]);
        g_new = std::min(std::max(g_new, cost.bounds.g_lo), cost.bounds.g_hi);
        h_new = std::min(std::max(h_new, cost.bounds.h_lo), cost.bounds.h_hi);
        change = std::max(change, std::abs(g_new - res.theta.g(i)));
        change = std::max(change, std::abs(h_new - res.theta.h(i)));
        res.theta.g(i) = g_new;
        res.theta.h(i) = h_new;
      }
      warm[player] = sol.eta;
      last_change[player] = change;
      ++updates[player];
      res.trajectory.push_back({r, player, total_cost(res.theta, cost) + shift});
    }
    if (updates[0] >= 2 && updates[1] >= 2 && last_change[0] <= cfg.tol &&
        last_change[1] <= cfg.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace netgain
