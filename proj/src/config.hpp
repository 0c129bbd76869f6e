#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "netgain/fm.hpp"
#include "netgain/game.hpp"
#include "netgain/topology.hpp"

namespace netgain::cli {

/// Every problem found in one validation pass, joined into what().
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// A per-node quantity given either as one broadcast scalar or as an explicit
/// vector. Remembers which form the config used so serialization round-trips.
struct Spread {
  double scalar = 1.0;
  std::vector<double> values;  // non-empty takes precedence over scalar

  VectorX<double> expand(Index n) const;
  bool is_vector() const { return !values.empty(); }
};

struct GeneratorConfig {
  Index nodes = 22;
  Index split = 11;
  double edge_prob = 0.3;
  Index intra_edges = 3;
  double weight = 1.0;
  std::optional<std::uint64_t> seed;  // falls back to the experiment seed
};

/// Where the graph comes from: an explicit file wins over the generator.
struct TopologySource {
  std::string file;  // empty = generate
  GeneratorConfig generator;
};

struct SimulateConfig {
  double p0 = 0.0;
  double tol = 1e-10;
  long max_steps = 200;
};

/// Full experiment description. Field defaults reproduce the reference
/// parameter set, so an empty config document is already runnable.
struct ExperimentConfig {
  TopologySource topology;
  Spread k{1.0, {}};
  Spread gamma_bar{1.0, {}};
  Spread nu{1.0, {}};
  GainBounds<double> bounds{0.1, 0.9, 4.0, 6.0};
  double cost_p = 0.1;
  double cost_q = 1.0;
  GameConfig<double> game;
  std::vector<double> q2_grid;       // sweep command only
  std::optional<double> eps1, eps2;  // solve command; default to the attack budgets
  SimulateConfig sim;
  std::string gains_file;  // attack/simulate start profile; empty = box midpoint
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int workers = 1;
  std::string format = "csv";  // csv | json
};

/// Parses and validates a JSON document; reports all problems at once.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Canonical serialization: fixed key order, round-trip floating point.
/// parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a 64-bit, used to fingerprint configs in run manifests.
std::uint64_t fnv1a(std::string_view data);

}  // namespace netgain::cli
