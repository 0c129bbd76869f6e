#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "table.hpp"

#include "netgain/cost.hpp"
#include "netgain/fm.hpp"
#include "netgain/topology.hpp"

namespace netgain::cli {

/// Everything a command produces, before any file is written. Tables go out
/// in the configured format, documents always as JSON, the summary into the
/// run manifest.
struct CommandOutput {
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::pair<std::string, nlohmann::ordered_json>> documents;
  nlohmann::ordered_json summary;
};

/// The config resolved against a concrete graph.
struct Instance {
  Topology<double> topo;
  FmParams<double> params;
  CostModel<double> cost;
  GameConfig<double> game;
};

Instance resolve_instance(const ExperimentConfig& cfg);

/// Node ids are 1-based on disk, 0-based in memory.
nlohmann::ordered_json topology_to_json(const Topology<double>& t);
Topology<double> topology_from_json(const nlohmann::json& doc);
Topology<double> load_topology_file(const std::string& path);

/// Box midpoint, or the profile stored by a previous solve/equilibrium run
/// when the config names a gains file.
GainProfile<double> resolve_start_profile(const ExperimentConfig& cfg, Index n,
                                          const GainBounds<double>& bounds);

CommandOutput command_gen_topology(const ExperimentConfig& cfg);
CommandOutput command_simulate(const ExperimentConfig& cfg);
CommandOutput command_solve(const ExperimentConfig& cfg);
CommandOutput command_qmax(const ExperimentConfig& cfg);
CommandOutput command_equilibrium(const ExperimentConfig& cfg);
CommandOutput command_attack(const ExperimentConfig& cfg);
CommandOutput command_sweep(const ExperimentConfig& cfg);
CommandOutput command_report(const ExperimentConfig& cfg);

/// Dispatches, writes all outputs plus manifest.json, and maps failures to
/// error.json plus a nonzero exit code.
int run_command(const std::string& name, const ExperimentConfig& cfg);

/// Command-line overrides layered on top of the config document.
struct CliOverrides {
  std::optional<std::string> config;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

/// Loads the config (defaults when none is named), applies overrides, and
/// runs. Config problems land in error.json like any other failure.
int run_cli(const std::string& name, const CliOverrides& overrides);

const std::vector<std::string>& command_names();

}  // namespace netgain::cli
