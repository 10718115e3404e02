#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cheapbandits/cli.hpp"
#include "cheapbandits/error.hpp"

using namespace cheapbandits;

int main(int argc, char** argv) {
  CLI::App app{"Cost-aware spectral bandits on graphs"};
  app.require_subcommand(1);

  std::string config, out = ".", policies, cost_model;
  std::uint64_t seed = 0;
  int runs = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--out", out, "Output directory (created if absent)");
    sub->add_option("--seed", seed, "Override the config seed");
  };
  auto* gen = app.add_subcommand("gen-graph", "Generate a random graph and write its edge list");
  auto* ing = app.add_subcommand("ingest", "Cluster labeled points into a graph with rewards");
  auto* run = app.add_subcommand("run", "Run bandit experiments and write CSV reports");
  auto* rep = app.add_subcommand("report", "Recompute summary.csv from trajectories.csv");
  for (auto* sub : {gen, ing, run, rep}) add_common(sub);
  gen->get_option("--config")->required();
  ing->get_option("--config")->required();
  run->get_option("--config")->required();
  run->add_option("--policies", policies, "Comma-separated: CheapUCB,SpectralUCB,LinUCB,Oracle");
  run->add_option("--runs", runs, "Override the number of runs")->check(CLI::PositiveNumber);
  run->add_option("--cost-model", cost_model, "Ledger cost model")
      ->check(CLI::IsMember({"width", "quadratic"}));

  CLI11_PARSE(app, argc, argv);

  Command cmd;
  try {
    CLI::App* chosen = app.get_subcommands().front();
    cmd.verb = parse_verb(chosen->get_name());
    if (!config.empty()) cmd.config = config;
    cmd.out = out;
    if (chosen->count("--seed")) cmd.seed = seed;
    if (chosen == run) {
      if (run->count("--runs")) cmd.runs = runs;
      if (!cost_model.empty()) cmd.cost_model = parse_cost_model(cost_model);
      if (!policies.empty()) {
        std::vector<PolicyKind> kinds;
        std::stringstream ss(policies);
        for (std::string name; std::getline(ss, name, ',');) kinds.push_back(parse_policy(name));
        cmd.policies = kinds;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return execute(cmd, std::cout, std::cerr);
}
