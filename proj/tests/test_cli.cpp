#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "table.hpp"

using namespace netgain;
using namespace netgain::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("netgain_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  REQUIRE(out.good());
}

const Table& table_named(const CommandOutput& out, const std::string& name) {
  for (const auto& [base, t] : out.tables)
    if (base == name) return t;
  REQUIRE_MESSAGE(false, ("no table named " + name));
  std::abort();
}

double cell(const Table& t, std::size_t row, const std::string& column) {
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    if (t.columns[c] == column) return t.rows.at(row).at(c).get<double>();
  REQUIRE_MESSAGE(false, ("no column named " + column));
  std::abort();
}

}  // namespace

TEST_CASE("an empty config document is runnable defaults") {
  const auto cfg = parse_config("{}");
  CHECK(cfg.topology.file.empty());
  CHECK(cfg.topology.generator.nodes == 22);
  CHECK(cfg.topology.generator.split == 11);
  CHECK(cfg.topology.generator.edge_prob == 0.3);
  CHECK(cfg.topology.generator.intra_edges == 3);
  CHECK(cfg.bounds.g_lo == 0.1);
  CHECK(cfg.bounds.g_hi == 0.9);
  CHECK(cfg.bounds.h_lo == 4.0);
  CHECK(cfg.bounds.h_hi == 6.0);
  CHECK(cfg.cost_p == 0.1);
  CHECK(cfg.cost_q == 1.0);
  CHECK(cfg.game.q1_bar == 2.25);
  CHECK(cfg.game.varsigma == 0.01);
  CHECK(cfg.game.c1 == 2);
  CHECK(cfg.game.c2 == 3);
  CHECK(cfg.game.tol == 1e-4);
  CHECK(cfg.k.scalar == 1.0);
  CHECK(cfg.format == "csv");
}

TEST_CASE("config parse and serialize round-trip exactly") {
  const std::string text = R"({
    "topology": {"generator": {"nodes": 9, "split": 4, "edge_prob": 0.45,
                               "intra_edges": 2, "weight": 1.5, "seed": 11}},
    "params": {"k": 0.7, "gamma_bar": [1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5], "nu": 2.0},
    "cost": {"p": 0.2, "q": 1.5, "g_lo": 0.2, "g_hi": 0.8, "h_lo": 3.0, "h_hi": 7.0},
    "game": {"q1_bar": 1.5, "q2_bar": 0.25, "q2_grid": [0.0, 0.1, 0.2],
             "varsigma": 0.02, "c1": 3, "c2": 2, "tol": 1e-5, "max_rounds": 150,
             "eps1": 0.4, "eps2": 0.6},
    "sim": {"p0": 0.5, "tol": 1e-9, "max_steps": 400},
    "gains_file": "gains.csv",
    "out_dir": "results",
    "seed": 99,
    "workers": 4,
    "format": "json"
  })";
  const auto a = parse_config(text);
  const std::string canon = serialize_config(a);
  const auto b = parse_config(canon);
  CHECK(serialize_config(b) == canon);  // canonical form is a fixed point
  CHECK(b.topology.generator.seed == std::uint64_t(11));
  CHECK(b.gamma_bar.is_vector());
  CHECK(b.gamma_bar.values.size() == 9);
  CHECK(b.gamma_bar.values.back() == 0.5);
  CHECK(b.k.scalar == 0.7);
  CHECK_FALSE(b.k.is_vector());
  CHECK(b.q2_grid == std::vector<double>{0.0, 0.1, 0.2});
  CHECK(b.eps1.value() == 0.4);
  CHECK(b.eps2.value() == 0.6);
  CHECK(b.sim.max_steps == 400);
  CHECK(b.gains_file == "gains.csv");
  CHECK(b.workers == 4);
  CHECK(b.format == "json");
}

TEST_CASE("every config problem is reported in one pass") {
  try {
    parse_config(R"({"cost": {"p": -1, "q": 0}, "game": {"varsigma": 2, "c1": 0},
                     "workers": 0, "format": "xml", "bogus": 1,
                     "topology": {"generator": {"nodes": 5, "split": 9}}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() >= 7);
    bool unknown = false, split = false;
    for (const auto& p : e.problems()) {
      if (p.find("unknown key 'bogus'") != std::string::npos) unknown = true;
      if (p.find("split") != std::string::npos) split = true;
    }
    CHECK(unknown);
    CHECK(split);
  }
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"game": {"q2_grid": [0.2, 0.1]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"params": {"k": 1.5}})"), ConfigError);
}

TEST_CASE("csv rendering quotes, formats and leaves nulls empty") {
  Table t({"name", "value", "count", "flag"});
  t.add_row({"plain", 1.0 / 3.0, 7, true});
  t.add_row({"with,comma", 2e-17, -1, false});
  t.add_row({"quote\"d", nullptr, 0, true});
  const std::string csv = to_csv(t);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "name,value,count,flag");
  std::getline(in, line);
  CHECK(line == "plain,0.333333333333,7,true");
  std::getline(in, line);
  CHECK(line == "\"with,comma\",2e-17,-1,false");
  std::getline(in, line);
  CHECK(line == "\"quote\"\"d\",,0,true");

  const std::string js = to_json(t);
  const auto doc = nlohmann::json::parse(js);
  CHECK(doc.size() == 3);
  CHECK(doc[0]["count"] == 7);
  CHECK(doc[2]["value"].is_null());
  CHECK_THROWS_AS(t.add_row({"short row"}), std::invalid_argument);
}

TEST_CASE("the config fingerprint matches published reference values") {
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("topology documents use 1-based ids and round-trip") {
  MatrixX<double> a = MatrixX<double>::Zero(5, 5);
  a(0, 1) = a(1, 0) = 1.0;
  a(2, 4) = a(4, 2) = 0.5;
  a(1, 3) = a(3, 1) = 2.0;
  const auto topo = Topology<double>::from_adjacency(2, a);

  const auto doc = topology_to_json(topo);
  CHECK(doc["nodes"] == 5);
  CHECK(doc["split"] == 2);
  CHECK(doc["edges"].size() == 3);
  for (const auto& e : doc["edges"]) {
    CHECK(e["i"].get<int>() >= 1);
    CHECK(e["j"].get<int>() <= 5);
  }

  const auto back = topology_from_json(doc);
  CHECK(back.size() == 5);
  CHECK(back.split() == 2);
  CHECK(back.adjacency().isApprox(topo.adjacency()));

  CHECK_THROWS_AS(topology_from_json(nlohmann::json::parse(R"({"nodes": 3})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      topology_from_json(nlohmann::json::parse(
          R"({"nodes": 3, "split": 1, "edges": [{"i": 0, "j": 2}]})")),
      std::invalid_argument);  // 0 is not a valid 1-based id
}

TEST_CASE("simulate reproduces the two-channel equilibrium") {
  const auto dir = fresh_dir("simulate");
  const auto topo_doc = topology_to_json(
      Topology<double>(2, 1, {{0, 1, 1.0}}));
  spit(dir / "topo.json", topo_doc.dump());

  ExperimentConfig cfg = parse_config("{}");
  cfg.topology.file = (dir / "topo.json").string();
  cfg.bounds = {0.1, 0.9, 0.5, 1.5};  // box midpoint is exactly (g, h) = (0.5, 1)
  cfg.sim.max_steps = 200;
  cfg.sim.tol = 1e-12;

  const auto out = command_simulate(cfg);
  const Table& powers = table_named(out, "simulate");
  CHECK(powers.columns == std::vector<std::string>{"step", "p1", "p2"});
  const std::size_t last = powers.rows.size() - 1;
  CHECK(cell(powers, 0, "p1") == 0.0);
  CHECK(cell(powers, last, "p1") == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(cell(powers, last, "p2") == doctest::Approx(2.0).epsilon(1e-8));

  const Table& quality = table_named(out, "sinr");
  CHECK(quality.rows.size() == 2);
  CHECK(cell(quality, 0, "sinr") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cell(quality, 1, "sinr") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(out.summary.at("converged").get<bool>());
}

TEST_CASE("runs write their datasets, manifest and nothing stale") {
  const auto dir = fresh_dir("run");
  ExperimentConfig cfg = parse_config(R"({
    "topology": {"generator": {"nodes": 6, "split": 3, "edge_prob": 0.6, "intra_edges": 2}},
    "game": {"q1_bar": 0.3, "q2_bar": 0.2},
    "seed": 5})");
  cfg.out_dir = (dir / "run").string();

  CHECK(run_command("equilibrium", cfg) == 0);
  CHECK(fs::exists(dir / "run" / "equilibrium.csv"));
  CHECK(fs::exists(dir / "run" / "trajectory.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "run" / "manifest.json"));
  CHECK(manifest["command"] == "equilibrium");
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  CHECK(manifest["summary"]["converged"].get<bool>());
  CHECK(!fs::exists(dir / "run" / "error.json"));

  // header row is always present
  const std::string csv = slurp(dir / "run" / "equilibrium.csv");
  CHECK(csv.rfind("node,network,g,h,alpha_cost,beta_cost,investment,is_border\n", 0) == 0);

  // a failing run replaces the manifest with an error record
  ExperimentConfig bad = cfg;
  bad.game.q1_bar = 80.0;
  bad.game.q2_bar = 60.0;
  CHECK(run_command("equilibrium", bad) == 3);
  CHECK(fs::exists(dir / "run" / "error.json"));
  CHECK(!fs::exists(dir / "run" / "manifest.json"));
  const auto err = nlohmann::json::parse(slurp(dir / "run" / "error.json"));
  CHECK(err["error_type"] == "infeasible");

  CHECK(run_command("no-such-command", cfg) == 2);
}

TEST_CASE("identical config and seed give byte-identical datasets") {
  const auto dir = fresh_dir("repro");
  ExperimentConfig cfg = parse_config(R"({
    "topology": {"generator": {"nodes": 6, "split": 3, "edge_prob": 0.6, "intra_edges": 2}},
    "game": {"q1_bar": 0.3, "q2_grid": [0.0, 0.1, 0.2]},
    "seed": 5})");

  ExperimentConfig first = cfg;
  first.out_dir = (dir / "a").string();
  first.workers = 1;
  ExperimentConfig second = cfg;
  second.out_dir = (dir / "b").string();
  second.workers = 3;  // scheduling must not leak into the data
  REQUIRE(run_command("sweep", first) == 0);
  REQUIRE(run_command("sweep", second) == 0);
  CHECK(slurp(dir / "a" / "sweep.csv") == slurp(dir / "b" / "sweep.csv"));

  first.out_dir = (dir / "c").string();
  REQUIRE(run_command("gen-topology", first) == 0);
  second.out_dir = (dir / "d").string();
  REQUIRE(run_command("gen-topology", second) == 0);
  CHECK(slurp(dir / "c" / "topology.json") == slurp(dir / "d" / "topology.json"));
}

TEST_CASE("sweep flags infeasible grid points and keeps going") {
  ExperimentConfig cfg = parse_config(R"({
    "topology": {"generator": {"nodes": 5, "split": 2, "edge_prob": 0.7, "intra_edges": 1}},
    "game": {"q1_bar": 0.3, "q2_grid": [0.1, 70.0]},
    "seed": 3})");
  const auto out = command_sweep(cfg);
  const Table& t = table_named(out, "sweep");
  REQUIRE(t.rows.size() == 2);
  CHECK(cell(t, 0, "cost_total") >= 0.0);
  auto col = [&](const std::string& name) {
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      if (t.columns[c] == name) return c;
    REQUIRE(false);
    return std::size_t(0);
  };
  CHECK(t.rows[0][col("feasible")].get<bool>());
  CHECK_FALSE(t.rows[1][col("feasible")].get<bool>());
  CHECK(t.rows[1][col("cost_total")].is_null());
  CHECK(out.summary.at("infeasible_points").get<int>() == 1);

  ExperimentConfig no_grid = parse_config("{}");
  CHECK_THROWS_AS(command_sweep(no_grid), ConfigError);
}

TEST_CASE("attack can start from a gains file written by equilibrium") {
  const auto dir = fresh_dir("gains");
  ExperimentConfig cfg = parse_config(R"({
    "topology": {"generator": {"nodes": 6, "split": 3, "edge_prob": 0.6, "intra_edges": 2}},
    "game": {"q1_bar": 0.6, "q2_bar": 0.4},
    "seed": 5})");
  cfg.out_dir = (dir / "eq").string();
  REQUIRE(run_command("equilibrium", cfg) == 0);

  ExperimentConfig atk = cfg;
  atk.gains_file = (dir / "eq" / "equilibrium.csv").string();
  atk.out_dir = (dir / "atk").string();
  REQUIRE(run_command("attack", atk) == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "atk" / "manifest.json"));
  CHECK(manifest["summary"]["norm2"].get<double>() ==
        doctest::Approx(0.4).epsilon(1e-9));
  CHECK(manifest["summary"]["abscissa_bound"].get<double>() <=
        manifest["summary"]["abscissa_attacked"].get<double>() + 1e-9);
}

TEST_CASE("investment follows centrality on a pressured instance") {
  ExperimentConfig cfg = parse_config(R"({
    "topology": {"generator": {"nodes": 8, "split": 4, "edge_prob": 0.5, "intra_edges": 2}},
    "game": {"q1_bar": 2.25, "q2_bar": 3.5},
    "seed": 12})");
  const auto out = command_report(cfg);
  const Table& t = table_named(out, "report");
  REQUIRE(t.rows.size() == 8);

  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const double n = static_cast<double>(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double x = cell(t, r, "pagerank");
    const double y = cell(t, r, "total_investment");
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  CHECK(sy / n > 1e-4);  // the attack actually forces investment
  const double cov = sxy - sx * sy / n;
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  if (vx > 0 && vy > 0) CHECK(cov / std::sqrt(vx * vy) >= 0.0);
}
