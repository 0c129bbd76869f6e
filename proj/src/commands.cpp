#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "netgain/attacker.hpp"
#include "netgain/game.hpp"
#include "netgain/robust.hpp"
#include "netgain/spectral.hpp"

namespace netgain::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Reads node/g/h columns back out of a previously written gains table.
GainProfile<double> parse_gains(const std::string& path, Index n,
                                const GainBounds<double>& bounds) {
  VectorX<double> g = VectorX<double>::Constant(n, std::numeric_limits<double>::quiet_NaN());
  VectorX<double> h = g;
  auto place = [&](double node, double gv, double hv) {
    const Index i = static_cast<Index>(node) - 1;  // ids are 1-based on disk
    detail::require(i >= 0 && i < n && node == std::floor(node),
                    "gains file: node id out of range");
    g(i) = gv;
    h(i) = hv;
  };
  const std::string text = read_file(path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    const json doc = json::parse(text);
    detail::require(doc.is_array(), "gains file: expected an array of row objects");
    for (const auto& row : doc)
      place(row.at("node").get<double>(), row.at("g").get<double>(), row.at("h").get<double>());
  } else {
    std::istringstream in(text);
    std::string line;
    detail::require(static_cast<bool>(std::getline(in, line)), "gains file: empty");
    const auto header = split_csv_line(line);
    Index c_node = -1, c_g = -1, c_h = -1;
    for (std::size_t m = 0; m < header.size(); ++m) {
      if (header[m] == "node") c_node = static_cast<Index>(m);
      if (header[m] == "g") c_g = static_cast<Index>(m);
      if (header[m] == "h") c_h = static_cast<Index>(m);
    }
    detail::require(c_node >= 0 && c_g >= 0 && c_h >= 0,
                    "gains file: need node, g and h columns");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv_line(line);
      detail::require(static_cast<Index>(cells.size()) > std::max({c_node, c_g, c_h}),
                      "gains file: short row");
      place(std::stod(cells[static_cast<std::size_t>(c_node)]),
            std::stod(cells[static_cast<std::size_t>(c_g)]),
            std::stod(cells[static_cast<std::size_t>(c_h)]));
    }
  }
  detail::require(g.allFinite() && h.allFinite(), "gains file: some nodes are missing");
  GainProfile<double> profile{h, g, bounds};
  profile.validate();
  return profile;
}

/// True (unshifted) investment split by subnetwork.
struct CostSplit {
  double net1 = 0.0, net2 = 0.0;
  double total() const { return net1 + net2; }
};

CostSplit split_cost(const Topology<double>& topo, const CostModel<double>& cost,
                     const GainProfile<double>& theta) {
  CostSplit out;
  for (Index i = 0; i < topo.size(); ++i) {
    const double c = cost.alpha(theta.g(i)) + cost.beta(theta.h(i));
    (topo.in_network1(i) ? out.net1 : out.net2) += c;
  }
  return out;
}

Table gains_table(const Topology<double>& topo, const CostModel<double>& cost,
                  const GainProfile<double>& theta) {
  Table t({"node", "network", "g", "h", "alpha_cost", "beta_cost", "investment", "is_border"});
  for (Index i = 0; i < topo.size(); ++i) {
    const double a = cost.alpha(theta.g(i));
    const double b = cost.beta(theta.h(i));
    t.add_row({i + 1, topo.in_network1(i) ? 1 : 2, theta.g(i), theta.h(i), a, b, a + b,
               topo.is_border(i)});
  }
  return t;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

Instance resolve_instance(const ExperimentConfig& cfg) {
  std::optional<Topology<double>> topo;
  if (!cfg.topology.file.empty()) {
    topo = load_topology_file(cfg.topology.file);
  } else {
    const auto& gc = cfg.topology.generator;
    TopologyGeneratorSpec<double> spec;
    spec.n_total = gc.nodes;
    spec.split = gc.split;
    spec.edge_prob = gc.edge_prob;
    spec.intra_edges = gc.intra_edges;
    spec.weight = gc.weight;
    Rng rng(gc.seed.value_or(cfg.seed));
    topo = generate_topology(spec, rng);
  }
  const Index n = topo->size();

  std::vector<std::string> problems;
  for (const auto& [name, s] :
       {std::pair<const char*, const Spread*>{"params.k", &cfg.k},
        {"params.gamma_bar", &cfg.gamma_bar},
        {"params.nu", &cfg.nu}}) {
    if (s->is_vector() && static_cast<Index>(s->values.size()) != n)
      problems.push_back(std::string(name) + " has " + std::to_string(s->values.size()) +
                         " entries but the topology has " + std::to_string(n) + " nodes");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));

  FmParams<double> params{cfg.k.expand(n), cfg.gamma_bar.expand(n), cfg.nu.expand(n)};
  params.validate();
  CostModel<double> cost(cfg.bounds, cfg.cost_p, cfg.cost_q);
  cfg.game.validate();
  return Instance{std::move(*topo), std::move(params), cost, cfg.game};
}

ordered_json topology_to_json(const Topology<double>& t) {
  ordered_json edges = ordered_json::array();
  for (const auto& e : t.edges())
    edges.push_back(ordered_json{{"i", e.i + 1}, {"j", e.j + 1}, {"weight", e.weight}});
  return ordered_json{{"nodes", t.size()}, {"split", t.split()}, {"edges", std::move(edges)}};
}

Topology<double> topology_from_json(const json& doc) {
  detail::require(doc.is_object() && doc.contains("nodes") && doc.contains("split") &&
                      doc.contains("edges"),
                  "topology document: need nodes, split and edges");
  detail::require(doc.at("nodes").is_number_integer() && doc.at("split").is_number_integer() &&
                      doc.at("edges").is_array(),
                  "topology document: malformed fields");
  const Index n = doc.at("nodes").get<Index>();
  const Index split = doc.at("split").get<Index>();
  std::vector<Edge<double>> edges;
  for (const auto& e : doc.at("edges")) {
    detail::require(e.is_object() && e.contains("i") && e.contains("j"),
                    "topology document: each edge needs i and j");
    Edge<double> edge;
    edge.i = e.at("i").get<Index>() - 1;  // ids are 1-based on disk
    edge.j = e.at("j").get<Index>() - 1;
    edge.weight = e.value("weight", 1.0);
    edges.push_back(edge);
  }
  return Topology<double>(n, split, std::move(edges));
}

Topology<double> load_topology_file(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("topology file '" + path + "' is not valid JSON: " + e.what());
  }
  return topology_from_json(doc);
}

GainProfile<double> resolve_start_profile(const ExperimentConfig& cfg, Index n,
                                          const GainBounds<double>& bounds) {
  if (cfg.gains_file.empty()) return GainProfile<double>::midpoint(n, bounds);
  return parse_gains(cfg.gains_file, n, bounds);
}

CommandOutput command_gen_topology(const ExperimentConfig& cfg) {
  const auto& gc = cfg.topology.generator;
  TopologyGeneratorSpec<double> spec;
  spec.n_total = gc.nodes;
  spec.split = gc.split;
  spec.edge_prob = gc.edge_prob;
  spec.intra_edges = gc.intra_edges;
  spec.weight = gc.weight;
  Rng rng(gc.seed.value_or(cfg.seed));
  const auto topo = generate_topology(spec, rng);

  CommandOutput out;
  Table edges({"i", "j", "weight"});
  for (const auto& e : topo.edges()) edges.add_row({e.i + 1, e.j + 1, e.weight});
  out.tables.emplace_back("edges", std::move(edges));
  out.documents.emplace_back("topology", topology_to_json(topo));
  out.summary = ordered_json{{"nodes", topo.size()},
                             {"split", topo.split()},
                             {"edges", static_cast<Index>(topo.edges().size())},
                             {"adjacency_norm2", matrix_norms(topo.adjacency()).two_norm}};
  return out;
}

CommandOutput command_simulate(const ExperimentConfig& cfg) {
  const Instance inst = resolve_instance(cfg);
  const Index n = inst.topo.size();
  const auto gains = resolve_start_profile(cfg, n, inst.cost.bounds);

  SimulateOptions<double> opts;
  opts.tol = cfg.sim.tol;
  opts.max_steps = cfg.sim.max_steps;
  opts.record_trajectory = true;
  const VectorX<double> p0 = VectorX<double>::Constant(n, cfg.sim.p0);
  const auto sim = simulate(inst.params, gains, inst.topo.adjacency(), p0, opts);

  std::vector<std::string> cols = {"step"};
  for (Index i = 0; i < n; ++i) cols.push_back("p" + std::to_string(i + 1));
  Table powers(std::move(cols));
  for (std::size_t s = 0; s < sim.trajectory.size(); ++s) {
    std::vector<json> row = {static_cast<Index>(s)};
    for (Index i = 0; i < n; ++i) row.push_back(sim.trajectory[s](i));
    powers.add_row(std::move(row));
  }

  const VectorX<double> achieved = sinr(inst.params, gains, inst.topo.adjacency(), sim.p);
  Table quality({"node", "power", "sinr", "target"});
  for (Index i = 0; i < n; ++i)
    quality.add_row({i + 1, sim.p(i), achieved(i), inst.params.gamma_bar(i)});

  CommandOutput out;
  out.tables.emplace_back("simulate", std::move(powers));
  out.tables.emplace_back("sinr", std::move(quality));
  out.summary = ordered_json{{"steps", sim.steps},
                             {"converged", sim.converged},
                             {"abscissa", spectral_abscissa(
                                              system_matrix(inst.params, gains,
                                                            inst.topo.adjacency()))}};
  return out;
}

CommandOutput command_solve(const ExperimentConfig& cfg) {
  const Instance inst = resolve_instance(cfg);
  const Index n = inst.topo.size();
  const double eps1 = cfg.eps1.value_or(inst.game.q1_bar);
  const double eps2 = cfg.eps2.value_or(inst.game.q2_bar);
  const auto unc = UncertaintyStructure<double>::diagonal(n, eps1, eps2);
  const auto prog = assemble_p2(inst.topo, inst.params, unc, inst.cost, inst.game.varsigma,
                                inst.game.varsigma);
  const auto sol = solve(prog.problem, GpSolveOptions<double>{});
  if (sol.status == GpStatus::infeasible)
    throw InfeasibleError("no robust stability certificate exists at these uncertainty budgets",
                          sol.phase1_objective);
  if (sol.status != GpStatus::optimal)
    throw NumericalError(std::string("robust design solve failed: ") + to_string(sol.status));
  const auto cert = extract_certificate(sol.eta, prog.layout, inst.cost.bounds);

  const auto block_of = unc.block_index_map();
  Table t({"node", "network", "g", "h", "alpha_cost", "beta_cost", "investment", "rho", "pi",
           "u", "v", "xi", "zeta"});
  for (Index i = 0; i < n; ++i) {
    const double a = inst.cost.alpha(cert.profile.g(i));
    const double b = inst.cost.beta(cert.profile.h(i));
    t.add_row({i + 1, inst.topo.in_network1(i) ? 1 : 2, cert.profile.g(i), cert.profile.h(i), a,
               b, a + b, cert.rho(i), cert.pi(block_of[static_cast<std::size_t>(i)]), cert.u(i),
               cert.v(i), cert.xi(i), cert.zeta(i)});
  }

  const double l0 = l0_constant(n, inst.cost);
  const CostSplit costs = split_cost(inst.topo, inst.cost, cert.profile);
  CommandOutput out;
  out.tables.emplace_back("solve", std::move(t));
  out.summary = ordered_json{
      {"status", to_string(sol.status)},
      {"eps1", eps1},
      {"eps2", eps2},
      {"objective_shifted", sol.objective_value},
      {"l0_constant", l0},
      {"cost_total", costs.total()},
      {"kkt_residual", sol.kkt_residual},
      {"abscissa_nominal",
       spectral_abscissa(system_matrix(inst.params, cert.profile, inst.topo.adjacency()))}};
  return out;
}

CommandOutput command_qmax(const ExperimentConfig& cfg) {
  const Instance inst = resolve_instance(cfg);
  const auto theta0 = GainProfile<double>::midpoint(inst.topo.size(), inst.cost.bounds);
  const double q2_star = find_qmax(inst.topo, inst.params, inst.game, theta0);
  const double norm_a = matrix_norms(inst.topo.adjacency()).two_norm;

  Table t({"q2_star", "adjacency_norm2", "q2_star_over_norm", "q1_bar"});
  t.add_row({q2_star, norm_a, q2_star / norm_a, inst.game.q1_bar});
  CommandOutput out;
  out.tables.emplace_back("qmax", std::move(t));
  out.summary = ordered_json{{"q2_star", q2_star},
                             {"adjacency_norm2", norm_a},
                             {"q2_star_over_norm", q2_star / norm_a}};
  return out;
}

CommandOutput command_equilibrium(const ExperimentConfig& cfg) {
  const Instance inst = resolve_instance(cfg);
  const auto eq = run_hig(inst.topo, inst.params, inst.cost, inst.game);

  Table traj({"round", "player", "cost_shifted", "cost_true"});
  const double l0 = l0_constant(inst.topo.size(), inst.cost);
  for (const auto& p : eq.trajectory)
    traj.add_row({p.round, p.player + 1, p.cost, p.cost - l0});

  const CostSplit costs = split_cost(inst.topo, inst.cost, eq.theta);
  CommandOutput out;
  out.tables.emplace_back("equilibrium", gains_table(inst.topo, inst.cost, eq.theta));
  out.tables.emplace_back("trajectory", std::move(traj));
  out.summary = ordered_json{{"converged", eq.converged},
                             {"rounds_used", eq.rounds_used},
                             {"updates", static_cast<Index>(eq.trajectory.size())},
                             {"cost_net1", costs.net1},
                             {"cost_net2", costs.net2},
                             {"cost_total", costs.total()}};
  return out;
}

CommandOutput command_attack(const ExperimentConfig& cfg) {
  const Instance inst = resolve_instance(cfg);
  const Index n = inst.topo.size();
  const auto gains = resolve_start_profile(cfg, n, inst.cost.bounds);
  const auto state = run_hwa(inst.topo, inst.params, gains, inst.game.q1_bar, inst.game.q2_bar);

  Table t({"edge", "i", "j", "weight"});
  for (std::size_t m = 0; m < state.added.size(); ++m)
    t.add_row({static_cast<Index>(m + 1), state.added[m].i + 1, state.added[m].j + 1,
               state.added[m].weight});

  const double nominal =
      spectral_abscissa(system_matrix(inst.params, gains, inst.topo.adjacency()));
  const MatrixX<double> compromised = inst.topo.adjacency() + state.a_q;
  const double truth = spectral_abscissa(system_matrix(inst.params, gains, compromised));
  CommandOutput out;
  out.tables.emplace_back("attack", std::move(t));
  out.summary = ordered_json{{"edges", static_cast<Index>(state.added.size())},
                             {"norm1", state.norm1},
                             {"norm2", state.norm2},
                             {"exhausted", state.exhausted},
                             {"abscissa_nominal", nominal},
                             {"abscissa_attacked", truth}};
  if ((inst.params.gamma_bar.array() > 0.0).all())
    out.summary["abscissa_bound"] =
        lambda_shift_lower_bound(inst.topo, inst.params, gains, state.a_q);
  return out;
}

CommandOutput command_sweep(const ExperimentConfig& cfg) {
  if (cfg.q2_grid.empty())
    throw ConfigError({"sweep requires a nonempty game.q2_grid"});
  const Instance inst = resolve_instance(cfg);
  const double norm_a = matrix_norms(inst.topo.adjacency()).two_norm;

  struct PointResult {
    bool feasible = false;
    bool converged = false;
    int rounds = 0;
    CostSplit costs;
    double attack_norm1 = 0.0, attack_norm2 = 0.0, lambda_bound = 0.0;
    std::string error;
  };
  std::vector<PointResult> results(cfg.q2_grid.size());

  std::atomic<std::size_t> cursor{0};
  std::mutex first_error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const std::size_t m = cursor.fetch_add(1);
      if (m >= cfg.q2_grid.size()) return;
      PointResult& r = results[m];
      try {
        GameConfig<double> game = inst.game;
        game.q2_bar = cfg.q2_grid[m];
        const auto eq = run_hig(inst.topo, inst.params, inst.cost, game);
        r.feasible = true;
        r.converged = eq.converged;
        r.rounds = eq.rounds_used;
        r.costs = split_cost(inst.topo, inst.cost, eq.theta);
        const auto atk =
            run_hwa(inst.topo, inst.params, eq.theta, game.q1_bar, game.q2_bar);
        r.attack_norm1 = atk.norm1;
        r.attack_norm2 = atk.norm2;
        r.lambda_bound = (inst.params.gamma_bar.array() > 0.0).all()
                             ? lambda_shift_lower_bound(inst.topo, inst.params, eq.theta,
                                                        atk.a_q)
                             : std::numeric_limits<double>::quiet_NaN();
      } catch (const InfeasibleError& e) {
        r.feasible = false;
        r.error = e.what();
      } catch (...) {
        std::lock_guard<std::mutex> lock(first_error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), cfg.q2_grid.size());
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < n_workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);

  Table t({"q2_bar", "q2_over_normA", "cost_net1", "cost_net2", "cost_total", "rounds",
           "converged", "feasible", "attack_norm1", "attack_norm2", "lambda_bound"});
  ordered_json errors = ordered_json::array();
  for (std::size_t m = 0; m < cfg.q2_grid.size(); ++m) {
    const PointResult& r = results[m];
    if (r.feasible) {
      t.add_row({cfg.q2_grid[m], cfg.q2_grid[m] / norm_a, r.costs.net1, r.costs.net2,
                 r.costs.total(), r.rounds, r.converged, true, r.attack_norm1, r.attack_norm2,
                 r.lambda_bound});
    } else {
      t.add_row({cfg.q2_grid[m], cfg.q2_grid[m] / norm_a, nullptr, nullptr, nullptr, nullptr,
                 nullptr, false, nullptr, nullptr, nullptr});
      errors.push_back(ordered_json{{"q2_bar", cfg.q2_grid[m]}, {"message", r.error}});
    }
  }

  CommandOutput out;
  out.tables.emplace_back("sweep", std::move(t));
  out.summary = ordered_json{{"grid_points", static_cast<Index>(cfg.q2_grid.size())},
                             {"adjacency_norm2", norm_a},
                             {"infeasible_points", static_cast<Index>(errors.size())}};
  if (!errors.empty()) out.summary["errors"] = std::move(errors);
  return out;
}

CommandOutput command_report(const ExperimentConfig& cfg) {
  const Instance inst = resolve_instance(cfg);
  const auto eq = run_hig(inst.topo, inst.params, inst.cost, inst.game);
  if (!eq.converged)
    throw NumericalError("equilibrium did not converge; investments are not a fixed point");

  const VectorX<double> pr = pagerank(inst.topo);
  Table t({"node", "pagerank", "alpha_cost", "beta_cost", "total_investment",
           "is_border_node"});
  for (Index i = 0; i < inst.topo.size(); ++i) {
    const double a = inst.cost.alpha(eq.theta.g(i));
    const double b = inst.cost.beta(eq.theta.h(i));
    t.add_row({i + 1, pr(i), a, b, a + b, inst.topo.is_border(i)});
  }

  const CostSplit costs = split_cost(inst.topo, inst.cost, eq.theta);
  CommandOutput out;
  out.tables.emplace_back("report", std::move(t));
  out.summary = ordered_json{{"converged", eq.converged},
                             {"rounds_used", eq.rounds_used},
                             {"cost_net1", costs.net1},
                             {"cost_net2", costs.net2},
                             {"cost_total", costs.total()}};
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"gen-topology", "simulate", "solve",
                                                 "qmax",        "equilibrium", "attack",
                                                 "sweep",       "report"};
  return names;
}

namespace {

CommandOutput dispatch(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "gen-topology") return command_gen_topology(cfg);
  if (name == "simulate") return command_simulate(cfg);
  if (name == "solve") return command_solve(cfg);
  if (name == "qmax") return command_qmax(cfg);
  if (name == "equilibrium") return command_equilibrium(cfg);
  if (name == "attack") return command_attack(cfg);
  if (name == "sweep") return command_sweep(cfg);
  if (name == "report") return command_report(cfg);
  throw std::invalid_argument("unknown command '" + name + "'");
}

int write_error(const fs::path& out_dir, const std::string& command, const std::string& type,
                const std::string& message, int exit_code, ordered_json extra = {}) {
  ordered_json doc{{"command", command}, {"error_type", type}, {"message", message}};
  for (auto& [k, v] : extra.items()) doc[k] = v;
  try {
    atomic_write(out_dir / "error.json", doc.dump(2) + "\n");
    std::error_code ec;
    fs::remove(out_dir / "manifest.json", ec);
  } catch (const std::exception&) {
    // the error report itself is best effort
  }
  std::fprintf(stderr, "error (%s): %s\n", type.c_str(), message.c_str());
  return exit_code;
}

}  // namespace

int run_cli(const std::string& name, const CliOverrides& overrides) {
  ExperimentConfig cfg;
  fs::path err_dir = overrides.out_dir.value_or("out");
  try {
    if (overrides.config) cfg = load_config_file(*overrides.config);
    if (overrides.out_dir)
      cfg.out_dir = *overrides.out_dir;
    else
      err_dir = cfg.out_dir;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.workers) {
      if (*overrides.workers < 1) throw ConfigError({"--workers must be >= 1"});
      cfg.workers = *overrides.workers;
    }
    if (overrides.format) {
      if (*overrides.format != "csv" && *overrides.format != "json")
        throw ConfigError({"--format must be 'csv' or 'json'"});
      cfg.format = *overrides.format;
    }
  } catch (const ConfigError& e) {
    ordered_json extra;
    extra["problems"] = e.problems();
    return write_error(err_dir, name, "config", e.what(), 2, std::move(extra));
  }
  return run_command(name, cfg);
}

int run_command(const std::string& name, const ExperimentConfig& cfg) {
  const fs::path out_dir = cfg.out_dir;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    CommandOutput result = dispatch(name, cfg);

    std::vector<std::string> written;
    const std::string ext = cfg.format == "json" ? ".json" : ".csv";
    for (const auto& [base, table] : result.tables) {
      const fs::path p = out_dir / (base + ext);
      atomic_write(p, render(table, cfg.format));
      written.push_back(p.filename().string());
    }
    for (const auto& [base, doc] : result.documents) {
      const fs::path p = out_dir / (base + ".json");
      atomic_write(p, doc.dump(2) + "\n");
      written.push_back(p.filename().string());
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    ordered_json manifest{
        {"command", name},
        {"config_hash", hash_hex(fnv1a(serialize_config(cfg)))},
        {"seed", cfg.seed},
        {"versions",
         {{"netgain", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)}}},
        {"outputs", written},
        {"summary", result.summary},
        {"timings_ms", {{"total", elapsed}}}};
    atomic_write(out_dir / "manifest.json", manifest.dump(2) + "\n");
    std::error_code ec;
    fs::remove(out_dir / "error.json", ec);
    return 0;
  } catch (const ConfigError& e) {
    ordered_json extra;
    extra["problems"] = e.problems();
    return write_error(out_dir, name, "config", e.what(), 2, std::move(extra));
  } catch (const InfeasibleError& e) {
    ordered_json extra;
    if (std::isfinite(e.phase1_objective)) extra["phase1_objective"] = e.phase1_objective;
    if (e.round >= 0) extra["round"] = e.round;
    return write_error(out_dir, name, "infeasible", e.what(), 3, std::move(extra));
  } catch (const NumericalError& e) {
    return write_error(out_dir, name, "numerical", e.what(), 4);
  } catch (const std::invalid_argument& e) {
    return write_error(out_dir, name, "invalid_argument", e.what(), 2);
  } catch (const std::exception& e) {
    return write_error(out_dir, name, "error", e.what(), 1);
  }
}

}  // namespace netgain::cli
