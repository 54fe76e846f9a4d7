// shiftplan: command-line front end.
//
//   shiftplan plan      --config cfg.json [--out dir] [--gap rel]
//   shiftplan sweep     --config cfg.json [--out dir] [--gap rel]
//   shiftplan compare   --config cfg.json [--out dir] [--gap rel]
//   shiftplan roster    --config cfg.json [--out dir] [--seed n]
//   shiftplan export-lp --config cfg.json [--out dir]
//
// Exit codes: 0 ok, 1 usage, 2 bad config, 3 no feasible plan, 4 I/O,
// 5 roster verification failed.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "shiftplan/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reward-maximizing shift planning"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  shiftplan::cli::CommandOptions opts;
  std::string config, out;
  std::uint64_t seed = 0;
  double gap = 0.0;
  CLI::Option* seed_opt = app.add_option("--seed", seed, "Seed for randomized self-checks");
  CLI::Option* gap_opt =
      app.add_option("--gap", gap, "Relative optimality gap for the MILP solver")->check(CLI::NonNegativeNumber);
  app.add_option("--config", config, "Experiment config (JSON)");
  app.add_option("--out", out, "Output directory");

  const char* commands[][2] = {{"plan", "Solve the reward MILP and write plan.csv, supply.csv, summary.json"},
                               {"sweep", "Run a parameter sweep and write sweep.csv"},
                               {"compare", "Compare against service and economic standards; write compare.csv"},
                               {"roster", "Assign the plan to drivers and write roster.csv"},
                               {"export-lp", "Write the reward MILP as model.lp (CPLEX LP format)"}};
  for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : shiftplan::cli::kExitUsage;
  }
  if (config.empty()) {
    std::cerr << "--config is required\n";
    return shiftplan::cli::kExitUsage;
  }
  opts.config = config;
  opts.out = out;
  if (*seed_opt) opts.seed = seed;
  if (*gap_opt) opts.rel_gap = gap;
  return shiftplan::cli::run_command(app.get_subcommands().front()->get_name(), opts);
}
