#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace netgain::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::ostringstream out;
  out << "configuration invalid (" << problems.size() << " problem"
      << (problems.size() == 1 ? "" : "s") << "):";
  for (const auto& p : problems) out << "\n  - " << p;
  return out.str();
}

/// Collects typed reads and range checks; every failure lands in `problems`
/// so one pass reports everything.
class Reader {
 public:
  Reader(const json& j, std::string scope, std::vector<std::string>& problems)
      : j_(j), scope_(std::move(scope)), problems_(problems) {}

  bool has(const char* key) const { return j_.contains(key); }

  void check_keys(std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j_.items()) {
      bool known = false;
      for (const char* a : allowed)
        if (key == a) known = true;
      if (!known) fail("unknown key '" + key + "'");
    }
  }

  void number(const char* key, double& out) {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) return fail(std::string(key) + " must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(std::string(key) + " must be finite");
  }

  void integer(const char* key, Index& out, Index lo) {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) return fail(std::string(key) + " must be an integer");
    out = v.get<Index>();
    if (out < lo) fail(std::string(key) + " must be >= " + std::to_string(lo));
  }

  void integer(const char* key, int& out, int lo) {
    Index wide = out;
    integer(key, wide, Index(lo));
    out = static_cast<int>(wide);
  }

  void unsigned64(const char* key, std::uint64_t& out) {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      return fail(std::string(key) + " must be a nonnegative integer");
    out = v.get<std::uint64_t>();
  }

  void text(const char* key, std::string& out) {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) return fail(std::string(key) + " must be a string");
    out = v.get<std::string>();
  }

  void spread(const char* key, Spread& out) {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (v.is_number()) {
      out.values.clear();
      out.scalar = v.get<double>();
      if (!std::isfinite(out.scalar)) fail(std::string(key) + " must be finite");
      return;
    }
    if (v.is_array()) {
      std::vector<double> vals;
      for (const auto& e : v) {
        if (!e.is_number()) return fail(std::string(key) + " entries must be numbers");
        vals.push_back(e.get<double>());
        if (!std::isfinite(vals.back())) return fail(std::string(key) + " entries must be finite");
      }
      if (vals.empty()) return fail(std::string(key) + " must not be an empty array");
      out.values = std::move(vals);
      return;
    }
    fail(std::string(key) + " must be a number or an array of numbers");
  }

  void require(bool ok, const std::string& message) {
    if (!ok) fail(message);
  }

  void fail(const std::string& message) { problems_.push_back(scope_ + message); }

 private:
  const json& j_;
  std::string scope_;
  std::vector<std::string>& problems_;
};

void spread_range(Reader& r, const char* key, const Spread& s, double lo, bool lo_strict,
                  double hi) {
  auto bad = [&](double v) {
    return (lo_strict ? v <= lo : v < lo) || v > hi;
  };
  std::ostringstream range;
  range << key << " must lie in " << (lo_strict ? "(" : "[") << lo << ", " << hi << "]";
  if (s.is_vector()) {
    for (double v : s.values)
      if (bad(v)) return r.fail(range.str());
  } else if (bad(s.scalar)) {
    r.fail(range.str());
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

VectorX<double> Spread::expand(Index n) const {
  if (values.empty()) return VectorX<double>::Constant(n, scalar);
  detail::require(static_cast<Index>(values.size()) == n,
                  "per-node vector length does not match the topology size");
  return Eigen::Map<const VectorX<double>>(values.data(), n);
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<std::string> problems;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    problems.emplace_back(std::string("not valid JSON: ") + e.what());
    throw ConfigError(std::move(problems));
  }
  if (!doc.is_object()) {
    problems.emplace_back("top level must be a JSON object");
    throw ConfigError(std::move(problems));
  }

  ExperimentConfig cfg;
  Reader top(doc, "", problems);
  top.check_keys({"topology", "params", "cost", "game", "sim", "gains_file", "out_dir", "seed",
                  "workers", "format"});

  if (top.has("topology")) {
    const json& t = doc.at("topology");
    if (!t.is_object()) {
      top.fail("topology must be an object");
    } else {
      Reader rt(t, "topology.", problems);
      rt.check_keys({"file", "generator"});
      rt.text("file", cfg.topology.file);
      if (rt.has("generator")) {
        const json& g = t.at("generator");
        if (!g.is_object()) {
          rt.fail("generator must be an object");
        } else {
          Reader rg(g, "topology.generator.", problems);
          rg.check_keys({"nodes", "split", "edge_prob", "intra_edges", "weight", "seed"});
          auto& gen = cfg.topology.generator;
          rg.integer("nodes", gen.nodes, Index(2));
          rg.integer("split", gen.split, Index(1));
          rg.number("edge_prob", gen.edge_prob);
          rg.integer("intra_edges", gen.intra_edges, Index(1));
          rg.number("weight", gen.weight);
          if (rg.has("seed")) {
            std::uint64_t s = 0;
            rg.unsigned64("seed", s);
            gen.seed = s;
          }
          rg.require(gen.split < gen.nodes, "split must be smaller than nodes");
          rg.require(gen.edge_prob >= 0.0 && gen.edge_prob <= 1.0,
                     "edge_prob must lie in [0, 1]");
          rg.require(gen.weight > 0.0, "weight must be positive");
          rg.require(gen.intra_edges <= gen.split * (gen.nodes - gen.split),
                     "intra_edges exceeds the number of crossing pairs");
        }
      }
    }
  }

  if (top.has("params")) {
    const json& p = doc.at("params");
    if (!p.is_object()) {
      top.fail("params must be an object");
    } else {
      Reader rp(p, "params.", problems);
      rp.check_keys({"k", "gamma_bar", "nu"});
      rp.spread("k", cfg.k);
      rp.spread("gamma_bar", cfg.gamma_bar);
      rp.spread("nu", cfg.nu);
      spread_range(rp, "k", cfg.k, 0.0, true, 1.0);
      spread_range(rp, "gamma_bar", cfg.gamma_bar, 0.0, false,
                   std::numeric_limits<double>::infinity());
      spread_range(rp, "nu", cfg.nu, 0.0, true, std::numeric_limits<double>::infinity());
    }
  }

  if (top.has("cost")) {
    const json& c = doc.at("cost");
    if (!c.is_object()) {
      top.fail("cost must be an object");
    } else {
      Reader rc(c, "cost.", problems);
      rc.check_keys({"p", "q", "g_lo", "g_hi", "h_lo", "h_hi"});
      rc.number("p", cfg.cost_p);
      rc.number("q", cfg.cost_q);
      rc.number("g_lo", cfg.bounds.g_lo);
      rc.number("g_hi", cfg.bounds.g_hi);
      rc.number("h_lo", cfg.bounds.h_lo);
      rc.number("h_hi", cfg.bounds.h_hi);
      rc.require(cfg.cost_p > 0.0, "p must be positive");
      rc.require(cfg.cost_q > 0.0, "q must be positive");
      rc.require(0.0 < cfg.bounds.g_lo && cfg.bounds.g_lo < cfg.bounds.g_hi,
                 "bounds must satisfy 0 < g_lo < g_hi");
      rc.require(0.0 < cfg.bounds.h_lo && cfg.bounds.h_lo < cfg.bounds.h_hi,
                 "bounds must satisfy 0 < h_lo < h_hi");
    }
  }

  if (top.has("game")) {
    const json& g = doc.at("game");
    if (!g.is_object()) {
      top.fail("game must be an object");
    } else {
      Reader rg(g, "game.", problems);
      rg.check_keys({"q1_bar", "q2_bar", "q2_grid", "varsigma", "c1", "c2", "tol", "max_rounds",
                     "eps1", "eps2"});
      rg.number("q1_bar", cfg.game.q1_bar);
      rg.number("q2_bar", cfg.game.q2_bar);
      rg.number("varsigma", cfg.game.varsigma);
      rg.integer("c1", cfg.game.c1, 1);
      rg.integer("c2", cfg.game.c2, 1);
      rg.number("tol", cfg.game.tol);
      rg.integer("max_rounds", cfg.game.max_rounds, 1);
      if (rg.has("q2_grid")) {
        const json& grid = g.at("q2_grid");
        if (!grid.is_array()) {
          rg.fail("q2_grid must be an array of numbers");
        } else {
          cfg.q2_grid.clear();
          bool numeric = true;
          for (const auto& e : grid) {
            if (!e.is_number()) {
              rg.fail("q2_grid entries must be numbers");
              numeric = false;
              break;
            }
            cfg.q2_grid.push_back(e.get<double>());
          }
          if (numeric) {
            for (std::size_t m = 0; m < cfg.q2_grid.size(); ++m) {
              if (!(cfg.q2_grid[m] >= 0.0) || !std::isfinite(cfg.q2_grid[m])) {
                rg.fail("q2_grid entries must be finite and nonnegative");
                break;
              }
              if (m > 0 && cfg.q2_grid[m] <= cfg.q2_grid[m - 1]) {
                rg.fail("q2_grid must be strictly increasing");
                break;
              }
            }
          }
        }
      }
      for (const char* key : {"eps1", "eps2"}) {
        if (!rg.has(key)) continue;
        double v = 0.0;
        rg.number(key, v);
        rg.require(v >= 0.0, std::string(key) + " must be nonnegative");
        (key[3] == '1' ? cfg.eps1 : cfg.eps2) = v;
      }
      rg.require(cfg.game.q1_bar >= 0.0, "q1_bar must be nonnegative");
      rg.require(cfg.game.q2_bar >= 0.0, "q2_bar must be nonnegative");
      rg.require(cfg.game.varsigma > 0.0 && cfg.game.varsigma < 1.0,
                 "varsigma must lie in (0, 1)");
      rg.require(cfg.game.tol > 0.0, "tol must be positive");
    }
  }

  if (top.has("sim")) {
    const json& s = doc.at("sim");
    if (!s.is_object()) {
      top.fail("sim must be an object");
    } else {
      Reader rs(s, "sim.", problems);
      rs.check_keys({"p0", "tol", "max_steps"});
      rs.number("p0", cfg.sim.p0);
      rs.number("tol", cfg.sim.tol);
      rs.integer("max_steps", cfg.sim.max_steps, 1L);
      rs.require(cfg.sim.p0 >= 0.0, "p0 must be nonnegative");
      rs.require(cfg.sim.tol > 0.0, "tol must be positive");
    }
  }

  top.text("gains_file", cfg.gains_file);
  top.text("out_dir", cfg.out_dir);
  top.unsigned64("seed", cfg.seed);
  top.integer("workers", cfg.workers, 1);
  top.text("format", cfg.format);
  top.require(!cfg.out_dir.empty(), "out_dir must not be empty");
  top.require(cfg.format == "csv" || cfg.format == "json", "format must be 'csv' or 'json'");

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  ordered_json doc;
  ordered_json topo;
  if (!cfg.topology.file.empty()) topo["file"] = cfg.topology.file;
  const auto& gen = cfg.topology.generator;
  ordered_json g{{"nodes", gen.nodes},
                 {"split", gen.split},
                 {"edge_prob", gen.edge_prob},
                 {"intra_edges", gen.intra_edges},
                 {"weight", gen.weight}};
  if (gen.seed) g["seed"] = *gen.seed;
  topo["generator"] = std::move(g);
  doc["topology"] = std::move(topo);

  auto spread_out = [](const Spread& s) -> ordered_json {
    if (s.is_vector()) return ordered_json(s.values);
    return ordered_json(s.scalar);
  };
  doc["params"] = ordered_json{
      {"k", spread_out(cfg.k)}, {"gamma_bar", spread_out(cfg.gamma_bar)},
      {"nu", spread_out(cfg.nu)}};
  doc["cost"] = ordered_json{{"p", cfg.cost_p},        {"q", cfg.cost_q},
                             {"g_lo", cfg.bounds.g_lo}, {"g_hi", cfg.bounds.g_hi},
                             {"h_lo", cfg.bounds.h_lo}, {"h_hi", cfg.bounds.h_hi}};
  ordered_json game{{"q1_bar", cfg.game.q1_bar},   {"q2_bar", cfg.game.q2_bar},
                    {"varsigma", cfg.game.varsigma}, {"c1", cfg.game.c1},
                    {"c2", cfg.game.c2},             {"tol", cfg.game.tol},
                    {"max_rounds", cfg.game.max_rounds}};
  if (!cfg.q2_grid.empty()) game["q2_grid"] = cfg.q2_grid;
  if (cfg.eps1) game["eps1"] = *cfg.eps1;
  if (cfg.eps2) game["eps2"] = *cfg.eps2;
  doc["game"] = std::move(game);
  doc["sim"] = ordered_json{
      {"p0", cfg.sim.p0}, {"tol", cfg.sim.tol}, {"max_steps", cfg.sim.max_steps}};
  if (!cfg.gains_file.empty()) doc["gains_file"] = cfg.gains_file;
  doc["out_dir"] = cfg.out_dir;
  doc["seed"] = cfg.seed;
  doc["workers"] = cfg.workers;
  doc["format"] = cfg.format;
  return doc.dump(2) + "\n";
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace netgain::cli
