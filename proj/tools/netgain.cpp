#include <CLI11.hpp>

#include "commands.hpp"

namespace {

const char* describe(const std::string& name) {
  if (name == "gen-topology") return "Generate a two-subnetwork random topology";
  if (name == "simulate") return "Run the distributed power-control iteration";
  if (name == "solve") return "Solve one robust gain design program";
  if (name == "qmax") return "Largest certifiable 2-norm attack budget";
  if (name == "equilibrium") return "Round-robin game until neither player moves";
  if (name == "attack") return "Greedy worst-case edge additions within budget";
  if (name == "sweep") return "Equilibrium cost curve over a budget grid";
  if (name == "report") return "Per-node investments versus centrality";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust gain design for power-controlled wireless networks"};
  app.require_subcommand(1);

  netgain::cli::CliOverrides ov;
  for (const auto& name : netgain::cli::command_names()) {
    auto* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", ov.config, "JSON experiment config file");
    sub->add_option("--out", ov.out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", ov.seed, "rng seed (overrides the config)");
    sub->add_option("--workers", ov.workers, "sweep worker threads (overrides the config)");
    sub->add_option("--format", ov.format, "dataset format: csv or json");
  }
  CLI11_PARSE(app, argc, argv);

  return netgain::cli::run_cli(app.get_subcommands().front()->get_name(), ov);
}
