// Acceptance gate: every release-blocking behavior, one line of output per
// criterion, nonzero exit when any fails. Tolerances are pinned here and
// nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "netgain/attacker.hpp"
#include "netgain/game.hpp"
#include "netgain/random.hpp"
#include "netgain/robust.hpp"

namespace {

using namespace netgain;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// pinned acceptance tolerances
constexpr double kGpRelTol = 1e-4;          // solver vs grid oracle, relative
constexpr double kGpSolveMs = 100.0;        // per-solve budget
constexpr double kFixedPointTol = 1e-8;     // simulated limit vs linear solve
constexpr double kSinrTol = 1e-9;           // achieved vs target quality
constexpr double kCertMarginSlack = 1e-6;   // sampled abscissa vs -varsigma
constexpr double kBudgetRelTol = 0.05;      // bisected boundary vs solved one
constexpr double kTrajectorySlack = 1e-6;   // per-update cost increase allowed
constexpr double kUnilateralTol = 1e-6;     // best-response improvement at rest
constexpr double kSweepSlack = 1e-6;        // non-monotonicity allowed in sweep
constexpr double kInvestThreshold = 1e-3;   // a subnetwork "has invested"
constexpr double kNormTightTol = 1e-9;      // binding attack norm vs budget
constexpr double kOracleTieTol = 1e-9;      // first-edge objective comparison
constexpr double kConstantsTol = 1e-12;     // closed-form constants
constexpr double kBoundSlack = 1e-9;        // shift bound vs true abscissa
constexpr double kGameWallMs = 300000.0;    // budget for the reference game

int g_failures = 0;

void report(int id, const char* label, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s (%s)\n", ok ? "PASS" : "FAIL", id, label, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

// log-domain posynomial value, written against the raw coefficient data so
// the oracle does not share an evaluation path with the solver
double posy_log_value(const std::vector<Monomial<double>>& terms, const VectorX<double>& y) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(terms.size());
  for (const auto& t : terms) {
    const double l = std::log(t.coeff) + t.exponents.dot(y);
    logs.push_back(l);
    best = std::max(best, l);
  }
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - best);
  return best + std::log(acc);
}

// shrinking-grid search over log variables; refines around the best feasible
// point until the cell size stops mattering at the pinned tolerance
double grid_oracle(const GpProblem<double>& gp) {
  const Index nv = gp.n_vars;
  VectorX<double> center = VectorX<double>::Zero(nv);
  double width = 8.0;
  const Index points = 13;
  double best_val = std::numeric_limits<double>::infinity();
  VectorX<double> best_y = center;

  for (int pass = 0; pass < 19; ++pass) {
    bool at_edge = false;
    VectorX<double> y(nv);
    std::vector<Index> idx(static_cast<std::size_t>(nv), 0);
    for (;;) {
      for (Index d = 0; d < nv; ++d)
        y(d) = center(d) - width / 2 +
               width * static_cast<double>(idx[static_cast<std::size_t>(d)]) /
                   static_cast<double>(points - 1);
      bool feasible = true;
      for (const auto& row : gp.inequalities)
        if (posy_log_value(row.terms(), y) > 1e-9) {
          feasible = false;
          break;
        }
      if (feasible) {
        const double v = posy_log_value(gp.objective_terms, y);
        if (v < best_val) {
          best_val = v;
          best_y = y;
          for (Index d = 0; d < nv; ++d) {
            const Index k = idx[static_cast<std::size_t>(d)];
            if (k == 0 || k == points - 1) at_edge = true;
          }
        }
      }
      Index d = 0;
      while (d < nv && ++idx[static_cast<std::size_t>(d)] == points) {
        idx[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == nv) break;
    }
    center = best_y;
    width = at_edge ? width * 2.0 : width * 0.5;
  }
  return std::exp(best_val);
}

void criterion_gp_oracle() {
  Rng rng(101);
  double worst_rel = 0.0, worst_ms = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index nv = 1 + static_cast<Index>(rng.uniform_index(4));
    GpProblem<double> gp(nv);
    // coercive objective: every variable gets a rising and a falling term
    for (Index d = 0; d < nv; ++d) {
      for (double sign : {1.0, -1.0}) {
        Monomial<double> m = Monomial<double>::constant(nv, rng.uniform(0.5, 2.0));
        m.exponents(d) = sign * rng.uniform(0.5, 1.5);
        for (Index o = 0; o < nv; ++o)
          if (o != d) m.exponents(o) = rng.uniform(-0.3, 0.3);
        gp.add_objective_term(std::move(m));
      }
    }
    const Index n_rows = static_cast<Index>(rng.uniform_index(7));  // 0..6
    for (Index r = 0; r < n_rows; ++r) {
      const Index n_terms = 1 + static_cast<Index>(rng.uniform_index(3));
      std::vector<Monomial<double>> terms;
      double at_one = 0.0;
      for (Index t = 0; t < n_terms; ++t) {
        Monomial<double> m = Monomial<double>::constant(nv, rng.uniform(0.1, 1.0));
        for (Index d = 0; d < nv; ++d) m.exponents(d) = rng.uniform(-1.0, 1.0);
        at_one += m.coeff;
        terms.push_back(std::move(m));
      }
      for (auto& m : terms) m.coeff /= 2.0 * at_one;  // strictly feasible at eta = 1
      gp.add_inequality(Posynomial<double>::from_terms(nv, terms));
    }

    const auto t0 = Clock::now();
    const auto sol = solve(gp, GpSolveOptions<double>{});
    const double elapsed = ms_since(t0);
    worst_ms = std::max(worst_ms, elapsed);

    const double reference = grid_oracle(gp);
    const double rel = std::abs(sol.objective_value - reference) /
                       std::max(1e-12, std::abs(reference));
    worst_rel = std::max(worst_rel, rel);
    if (sol.status != GpStatus::optimal || rel > kGpRelTol || elapsed >= kGpSolveMs) ++bad;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "50 programs, worst rel %.2e, slowest %.1f ms",
                worst_rel, worst_ms);
  report(1, "gp solver matches refined grid search", bad == 0, detail);
}

void criterion_power_control() {
  // worked two-channel instance: equal channels, mutual coupling one half
  bool ok = true;
  std::string note;
  {
    const Index n = 2;
    MatrixX<double> a = MatrixX<double>::Zero(n, n);
    a(0, 1) = a(1, 0) = 1.0;
    const auto params = FmParams<double>::uniform(n, 1.0, 1.0, 1.0);
    GainProfile<double> gains{VectorX<double>::Constant(n, 1.0),
                              VectorX<double>::Constant(n, 0.5), {0.1, 0.9, 0.5, 1.5}};
    SimulateOptions<double> opts;
    opts.tol = 1e-15;
    opts.max_steps = 200;
    const MatrixX<double> adj = a;
    const VectorX<double> zero = VectorX<double>::Zero(n);
    const auto sim = simulate(params, gains, adj, zero, opts);
    const double dist =
        (sim.p - VectorX<double>::Constant(n, 2.0)).lpNorm<Eigen::Infinity>();
    const VectorX<double> q = sinr(params, gains, adj, sim.p);
    const double sinr_err = (q - params.gamma_bar).lpNorm<Eigen::Infinity>();
    if (dist > kFixedPointTol || sim.steps > 200) ok = false;
    if (sinr_err > kSinrTol) ok = false;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "pair gap %.1e in %ld steps, quality gap %.1e", dist,
                  sim.steps, sinr_err);
    note = buf;
  }

  Rng rng(202);
  double worst = 0.0;
  int done = 0, guard = 0;
  while (done < 20 && guard < 400) {
    ++guard;
    const Index n = 2 + static_cast<Index>(rng.uniform_index(5));
    MatrixX<double> a = MatrixX<double>::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.5) a(i, j) = a(j, i) = rng.uniform(0.2, 1.0);
    FmParams<double> params;
    params.k = VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.3, 1.0); });
    params.gamma_bar =
        VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.3, 1.2); });
    params.nu = VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.5, 2.0); });
    GainProfile<double> gains{
        VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(4.0, 6.0); }),
        VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.1, 0.9); }),
        {0.1, 0.9, 4.0, 6.0}};
    if (spectral_abscissa(system_matrix(params, gains, a)) > -1e-3) continue;
    const auto target = fixed_point(params, gains, a);
    SimulateOptions<double> opts;
    opts.tol = 1e-13;
    opts.max_steps = 2000000;
    const VectorX<double> zero = VectorX<double>::Zero(n);
    const auto sim = simulate(params, gains, a, zero, opts);
    const double gap = (sim.p - target).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, gap);
    if (gap > kFixedPointTol || !sim.converged) ok = false;
    ++done;
  }
  if (done < 20) ok = false;
  char detail[160];
  std::snprintf(detail, sizeof(detail), "%s; %d random instances, worst limit gap %.1e",
                note.c_str(), done, worst);
  report(2, "power control reaches its fixed point", ok, detail);
}

void criterion_certificates() {
  Rng rng(303);
  const double varsigma = 0.01;
  int done = 0, guard = 0, violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  while (done < 20 && guard < 200) {
    ++guard;
    const Index n = 3 + static_cast<Index>(rng.uniform_index(6));
    MatrixX<double> a = MatrixX<double>::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.4) a(i, j) = a(j, i) = rng.uniform(0.2, 0.8);
    const auto topo = Topology<double>::from_adjacency(std::max<Index>(1, n / 2), a);
    FmParams<double> params;
    params.k = VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.5, 1.0); });
    params.gamma_bar =
        VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.5, 1.2); });
    params.nu = VectorX<double>::Constant(n, 1.0);
    auto unc = UncertaintyStructure<double>::diagonal(n, rng.uniform(0.2, 0.6),
                                                      rng.uniform(0.2, 0.6));
    if (done % 2 == 1 && n >= 3) {
      // merge the first two nodes into one shared scale block
      unc.blocks.clear();
      unc.blocks.push_back({0, 1});
      unc.full_block = {1};
      for (Index v = 2; v < n; ++v) {
        unc.blocks.push_back({v});
        unc.full_block.push_back(0);
      }
    }
    const CostModel<double> cost({0.1, 0.9, 4.0, 6.0}, 0.1, 1.0);
    const auto prog = assemble_p2(topo, params, unc, cost, varsigma, varsigma);
    const auto sol = solve(prog.problem, GpSolveOptions<double>{});
    if (sol.status != GpStatus::optimal) continue;
    const auto cert = extract_certificate(sol.eta, prog.layout, cost.bounds);
    const auto check = verify_certificate(topo, params, cert.profile, unc, 1000, rng);
    worst = std::max(worst, check.worst_abscissa);
    if (check.worst_abscissa > -varsigma + kCertMarginSlack) ++violations;
    ++done;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "%d feasible instances x 1000 samples, worst abscissa %.6f, %d violations",
                done, worst, violations);
  report(3, "robust certificates survive structured sampling", done == 20 && violations == 0,
         detail);
}

GpProblem<double> frozen_budget_program(const Topology<double>& topo,
                                        const FmParams<double>& params,
                                        const GameConfig<double>& cfg,
                                        const GainProfile<double>& theta, double q2) {
  const Index n = topo.size();
  const RobustVarLayout lay{n, n};
  GpProblem<double> gp(lay.total());
  gp.var_names = lay.names();
  gp.add_objective_term(Monomial<double>::constant(lay.total(), 1.0));
  for (auto& row : build_game_rows(topo, params, cfg.q1_bar, q2, lay, lay.total(), Index(-1),
                                   cfg.varsigma))
    gp.add_inequality(std::move(row));
  std::vector<std::pair<Index, double>> frozen;
  for (Index j = 0; j < n; ++j) {
    frozen.push_back({lay.g_at(j), theta.g(j)});
    frozen.push_back({lay.h_at(j), theta.h(j)});
  }
  return substitute(gp, frozen);
}

void criterion_budget_boundary() {
  Rng rng(404);
  int done = 0, guard = 0, bad = 0;
  double worst_rel = 0.0;
  while (done < 10 && guard < 200) {
    ++guard;
    const Index n = 6 + static_cast<Index>(rng.uniform_index(7));
    MatrixX<double> a = MatrixX<double>::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.35) a(i, j) = a(j, i) = rng.uniform(0.2, 0.6);
    const auto topo = Topology<double>::from_adjacency(n / 2, a);
    FmParams<double> params;
    params.k = VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.5, 1.0); });
    params.gamma_bar =
        VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.6, 1.0); });
    params.nu = VectorX<double>::Constant(n, 1.0);
    GameConfig<double> cfg;
    const auto theta0 = GainProfile<double>::midpoint(n, {0.1, 0.9, 4.0, 6.0});

    double q_star = 0.0;
    try {
      q_star = find_qmax(topo, params, cfg, theta0);
    } catch (const std::exception&) {
      continue;  // midpoint gains certify nothing here; draw another instance
    }
    const auto feasible_at = [&](double q2) {
      return feasibility(frozen_budget_program(topo, params, cfg, theta0, q2),
                         GpSolveOptions<double>{})
          .feasible;
    };
    if (!feasible_at(q_star)) {
      ++bad;
      ++done;
      continue;
    }
    if (feasible_at(1.2 * q_star)) {
      ++bad;
      ++done;
      continue;
    }
    double lo = q_star, hi = 1.2 * q_star;
    for (int it = 0; it < 8; ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible_at(mid) ? lo : hi) = mid;
    }
    const double bisected = 0.5 * (lo + hi);
    const double raw = q_star / (1.0 - 1e-4);  // undo the published safety shave
    const double rel = std::abs(bisected - raw) / raw;
    worst_rel = std::max(worst_rel, rel);
    if (rel > kBudgetRelTol) ++bad;
    ++done;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d instances, worst bracket error %.2f%%", done,
                100.0 * worst_rel);
  report(4, "certifiable budget agrees with feasibility bisection", done == 10 && bad == 0,
         detail);
}

struct ReferenceGame {
  Topology<double> topo;
  FmParams<double> params;
  CostModel<double> cost;
  GameConfig<double> cfg;
};

ReferenceGame reference_game(std::uint64_t seed) {
  TopologyGeneratorSpec<double> spec;  // 22 nodes, 11 + 11, defaults throughout
  Rng rng(seed);
  auto topo = generate_topology(spec, rng);
  auto params = FmParams<double>::uniform(topo.size(), 1.0, 1.0, 1.0);
  CostModel<double> cost({0.1, 0.9, 4.0, 6.0}, 0.1, 1.0);
  return {std::move(topo), std::move(params), cost, GameConfig<double>{}};
}

void criterion_game_convergence() {
  const auto t0 = Clock::now();
  ReferenceGame ref = reference_game(1);
  const auto eq = run_hig(ref.topo, ref.params, ref.cost, ref.cfg);

  bool monotone = true;
  for (std::size_t m = 1; m < eq.trajectory.size(); ++m)
    if (eq.trajectory[m].cost > eq.trajectory[m - 1].cost + kTrajectorySlack) monotone = false;

  // a fresh best response for either player must not find real improvement
  double worst_gain = 0.0;
  for (int player = 0; player < 2; ++player) {
    const auto prog = assemble_q(ref.topo, ref.params, ref.cost, ref.cfg, player, eq.theta);
    const auto sol = solve(prog.problem, GpSolveOptions<double>{});
    if (sol.status != GpStatus::optimal) {
      worst_gain = std::numeric_limits<double>::infinity();
      break;
    }
    GainProfile<double> trial = eq.theta;
    const Index lo = player == 0 ? 0 : ref.topo.split();
    const Index hi = player == 0 ? ref.topo.split() : ref.topo.size();
    for (Index i = lo; i < hi; ++i) {
      trial.g(i) = sol.eta(prog.reduced_of[static_cast<std::size_t>(i)]);
      trial.h(i) =
          sol.eta(prog.reduced_of[static_cast<std::size_t>(ref.topo.size() + i)]);
    }
    double before = 0.0, after = 0.0;
    for (Index i = lo; i < hi; ++i) {
      before += ref.cost.alpha(eq.theta.g(i)) + ref.cost.beta(eq.theta.h(i));
      after += ref.cost.alpha(trial.g(i)) + ref.cost.beta(trial.h(i));
    }
    worst_gain = std::max(worst_gain, before - after);
  }

  const double wall = ms_since(t0);
  const bool ok = eq.converged && eq.rounds_used <= 200 && monotone &&
                  worst_gain < kUnilateralTol && wall < kGameWallMs;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "converged=%d in %d rounds, monotone=%d, best unilateral gain %.1e, %.1f s",
                int(eq.converged), eq.rounds_used, int(monotone), worst_gain, wall / 1000.0);
  report(5, "round-robin game converges on the reference network", ok, detail);
}

void criterion_sweep_trend() {
  // two equal halves, but the second faces stronger coupling targets, so its
  // nominal stabilization is dearer and it must invest first
  TopologyGeneratorSpec<double> spec;
  spec.n_total = 12;
  spec.split = 6;
  spec.edge_prob = 0.45;
  spec.intra_edges = 2;
  Rng rng(12);
  const auto topo = generate_topology(spec, rng);
  const Index n = topo.size();
  FmParams<double> params = FmParams<double>::uniform(n, 1.0, 1.0, 1.0);
  for (Index i = 0; i < n; ++i) params.gamma_bar(i) = topo.in_network1(i) ? 0.55 : 1.1;
  CostModel<double> cost({0.1, 0.9, 4.0, 6.0}, 0.1, 1.0);
  GameConfig<double> cfg;
  const auto theta0 = GainProfile<double>::midpoint(n, cost.bounds);
  const double q_star = find_qmax(topo, params, cfg, theta0);

  std::vector<double> total(8), net1(8), net2(8);
  bool solved = true;
  for (int m = 0; m < 8; ++m) {
    GameConfig<double> point = cfg;
    point.q2_bar = q_star * 0.95 * static_cast<double>(m) / 7.0;
    try {
      const auto eq = run_hig(topo, params, cost, point);
      double c1 = 0.0, c2 = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double c = cost.alpha(eq.theta.g(i)) + cost.beta(eq.theta.h(i));
        (topo.in_network1(i) ? c1 : c2) += c;
      }
      net1[static_cast<std::size_t>(m)] = c1;
      net2[static_cast<std::size_t>(m)] = c2;
      total[static_cast<std::size_t>(m)] = c1 + c2;
    } catch (const InfeasibleError&) {
      solved = false;
    }
  }

  bool nondecreasing = solved;
  for (int m = 1; m < 8 && nondecreasing; ++m)
    if (total[static_cast<std::size_t>(m)] <
        total[static_cast<std::size_t>(m - 1)] - kSweepSlack)
      nondecreasing = false;

  auto first_invest = [&](const std::vector<double>& c) {
    for (std::size_t m = 0; m < c.size(); ++m)
      if (c[m] > kInvestThreshold) return static_cast<int>(m);
    return 8;
  };
  const int cheap_start = first_invest(net1);    // low-target side
  const int costly_start = first_invest(net2);   // high-target side
  const bool ordering = solved && costly_start < 8 && cheap_start > costly_start;

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "8 budgets up to %.3f, total %.4f -> %.4f, invest starts: dear side %d, "
                "cheap side %d",
                q_star * 0.95, total[0], total[7], costly_start, cheap_start);
  report(6, "equilibrium cost grows with budget and the cheap side invests later",
         nondecreasing && ordering, detail);
}

MatrixX<double> random_star_attack(const Topology<double>& topo, double q1, double q2,
                                   Rng& rng) {
  const Index n = topo.size();
  MatrixX<double> a_q = MatrixX<double>::Zero(n, n);
  std::vector<char> src(static_cast<std::size_t>(n), 1);
  std::vector<std::pair<Index, Index>> added;
  double sw = 0.0, sw2 = 0.0;
  while (std::sqrt(sw2) < q2 && sw < q1) {
    std::vector<std::pair<Index, Index>> cands;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (topo.adjacency()(i, j) == 0.0 && a_q(i, j) == 0.0 &&
            (src[static_cast<std::size_t>(i)] || src[static_cast<std::size_t>(j)]))
          cands.emplace_back(i, j);
    if (cands.empty()) break;
    const auto [i, j] = cands[rng.uniform_index(static_cast<Index>(cands.size()))];
    a_q(i, j) = a_q(j, i) = 1.0;
    sw += 1.0;
    sw2 += 1.0;
    added.emplace_back(i, j);
    for (Index v = 0; v < n; ++v)
      if (v != i && v != j) src[static_cast<std::size_t>(v)] = 0;
  }
  if (!added.empty()) {
    const auto [i, j] = added.back();
    double w = a_q(i, j);
    const double b1 = sw - w, b2 = sw2 - w * w;
    if (sw >= q1) w = q1 - b1;
    if (std::sqrt(b2 + w * w) >= q2) w = std::sqrt(std::max(q2 * q2 - b2, 0.0));
    a_q(i, j) = a_q(j, i) = w;
  }
  return a_q;
}

void criterion_attacker() {
  Rng rng(707);
  int greedy_wins = 0, oracle_matches = 0, oracle_trials = 0, norm_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // two-block unit-weight networks: the scoring rule targets this regime,
    // where structurally twin candidates tie exactly instead of by luck
    const Index n = 5 + static_cast<Index>(rng.uniform_index(4));
    TopologyGeneratorSpec<double> spec;
    spec.n_total = n;
    spec.split = n / 2;
    spec.edge_prob = 0.4;
    spec.intra_edges = 2;
    const auto topo = generate_topology(spec, rng);
    FmParams<double> params;
    params.k = VectorX<double>::Constant(n, rng.uniform(0.5, 1.0));
    params.gamma_bar = VectorX<double>::Constant(n, rng.uniform(0.5, 1.5));
    params.nu = VectorX<double>::Constant(n, 1.0);
    const double g0 = rng.uniform(0.3, 0.7);
    const double h0 = rng.uniform(4.5, 5.5);
    GainProfile<double> gains{VectorX<double>::Constant(n, h0),
                              VectorX<double>::Constant(n, g0),
                              {0.1, 0.9, 4.0, 6.0}};
    const double q1 = rng.uniform(1.5, 3.0), q2 = rng.uniform(1.0, 2.2);

    const auto state = run_hwa(topo, params, gains, q1, q2);
    const MatrixX<double> greedy_m = topo.adjacency() + state.a_q;
    const double lam_greedy = spectral_abscissa(system_matrix(params, gains, greedy_m));

    const MatrixX<double> rnd = random_star_attack(topo, q1, q2, rng);
    const MatrixX<double> rnd_m = topo.adjacency() + rnd;
    const double lam_rnd = spectral_abscissa(system_matrix(params, gains, rnd_m));
    if (lam_greedy >= lam_rnd - 1e-12) ++greedy_wins;

    const auto norms = matrix_norms(state.a_q);
    if (norms.one_norm > q1 + 1e-12 || norms.two_norm > q2 + 1e-12) ++norm_bad;
    if (!state.exhausted && !state.added.empty()) {
      const double slack = std::min(q1 - norms.one_norm, q2 - norms.two_norm);
      if (std::abs(slack) > kNormTightTol) ++norm_bad;
    }

    if (!state.added.empty()) {
      // q1, q2 >= 1, so the first greedy edge carried weight one before any
      // truncation; compare true objectives over all single unit edges
      ++oracle_trials;
      double best_single = -std::numeric_limits<double>::infinity();
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
          if (topo.adjacency()(i, j) > 0.0) continue;
          MatrixX<double> one = topo.adjacency();
          one(i, j) = one(j, i) = 1.0;
          best_single =
              std::max(best_single, spectral_abscissa(system_matrix(params, gains, one)));
        }
      MatrixX<double> first = topo.adjacency();
      first(state.added[0].i, state.added[0].j) = 1.0;
      first(state.added[0].j, state.added[0].i) = 1.0;
      const double lam_first = spectral_abscissa(system_matrix(params, gains, first));
      if (lam_first >= best_single - kOracleTieTol) ++oracle_matches;
    }
  }
  const bool ok = greedy_wins >= 95 && oracle_trials > 0 &&
                  oracle_matches * 10 >= oracle_trials * 9 && norm_bad == 0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "beats random %d/100, first edge optimal %d/%d, norm violations %d",
                greedy_wins, oracle_matches, oracle_trials, norm_bad);
  report(7, "greedy attack beats random and matches the single-edge oracle", ok, detail);
}

void criterion_constants() {
  const CostModel<double> model({0.1, 0.9, 4.0, 6.0}, 0.1, 1.0);
  // closed forms written out independently of the model's helpers
  const double cg = 1.0 / (std::pow(0.1, -0.1) - std::pow(0.9, -0.1));
  const double ch = 1.0 / (std::pow(6.0, 1.0) - std::pow(4.0, 1.0));
  const double l0_direct = 22.0 * (cg * std::pow(0.9, -0.1) + ch * std::pow(4.0, 1.0));
  const double l0_lib = l0_constant(Index(22), model);
  const double gap = std::abs(l0_direct - l0_lib);

  const double ends = std::max(
      std::max(std::abs(model.alpha(0.1) - 1.0), std::abs(model.alpha(0.9))),
      std::max(std::abs(model.beta(4.0)), std::abs(model.beta(6.0) - 1.0)));
  const bool ok = gap <= kConstantsTol && ends <= kConstantsTol;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "shift %.11f vs %.11f (gap %.1e), endpoint gap %.1e",
                l0_lib, l0_direct, gap, ends);
  report(8, "cost constants and endpoint normalizations", ok, detail);
}

void criterion_shift_bound() {
  Rng rng(909);
  double worst_excess = -std::numeric_limits<double>::infinity();
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 3 + static_cast<Index>(rng.uniform_index(6));
    MatrixX<double> a = MatrixX<double>::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.5) a(i, j) = a(j, i) = rng.uniform(0.2, 1.0);
    const auto topo = Topology<double>::from_adjacency(std::max<Index>(1, n / 2), a);
    FmParams<double> params;
    params.k = VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.3, 1.0); });
    params.gamma_bar =
        VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.3, 2.0); });
    params.nu = VectorX<double>::Constant(n, 1.0);
    GainProfile<double> gains{
        VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(4.0, 6.0); }),
        VectorX<double>::NullaryExpr(n, [&](Index) { return rng.uniform(0.1, 0.9); }),
        {0.1, 0.9, 4.0, 6.0}};
    MatrixX<double> a_q = MatrixX<double>::Zero(n, n);
    const int extra = 1 + static_cast<int>(rng.uniform_index(3));
    for (int m = 0; m < extra; ++m) {
      const Index i = rng.uniform_index(n);
      const Index j = rng.uniform_index(n);
      if (i == j) continue;
      const double w = rng.uniform(0.1, 1.0);
      a_q(i, j) = a_q(j, i) = w;
    }
    const double bound = lambda_shift_lower_bound(topo, params, gains, a_q);
    const MatrixX<double> compromised = topo.adjacency() + a_q;
    const double truth = spectral_abscissa(system_matrix(params, gains, compromised));
    worst_excess = std::max(worst_excess, bound - truth);
    if (bound > truth + kBoundSlack) ++bad;
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "1000 pairs, worst bound excess %.2e", worst_excess);
  report(9, "symmetrized shift bound stays below the true abscissa", bad == 0, detail);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_gp_oracle();
  criterion_power_control();
  criterion_certificates();
  criterion_budget_boundary();
  criterion_game_convergence();
  criterion_sweep_trend();
  criterion_attacker();
  criterion_constants();
  criterion_shift_bound();
  std::printf("%d/9 criteria passed in %.1f s\n", 9 - g_failures, ms_since(t0) / 1000.0);
  return g_failures == 0 ? 0 : 1;
}
