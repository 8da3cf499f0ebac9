#include <cstdint>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Track-before-detect particle filtering experiments"};
  app.require_subcommand(1);

  rltbd::cli::CommonOptions sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "Generate a scenario and write its frames");
  sim->add_option("--config", sim_opts.config_path, "JSON config file (defaults built in)");
  sim->add_option("--out", sim_opts.out_dir, "Output directory (overrides config)");
  sim->add_option("--seed", sim_opts.seed, "Master seed (overrides config)");

  rltbd::cli::RunOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "Run the filter batch and write metrics");
  run->add_option("--config", run_opts.config_path, "JSON config file (defaults built in)");
  run->add_option("--out", run_opts.out_dir, "Output directory (overrides config)");
  run->add_option("--seed", run_opts.seed, "Master seed (overrides config)");
  run->add_option("--runs", run_opts.n_runs, "Number of Monte-Carlo runs (overrides config)");
  run->add_option("--filter", run_opts.filters,
                  "Only run the filter with this label (repeatable)");

  bool quick = false;
  CLI::App* selftest = app.add_subcommand("selftest", "Run numerical self-checks");
  selftest->add_flag("--quick", quick, "Use smaller Monte-Carlo budgets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return rltbd::cli::cmd_simulate(sim_opts);
    }
    if (run->parsed()) {
      return rltbd::cli::cmd_run(run_opts);
    }
    if (selftest->parsed()) {
      return rltbd::cli::cmd_selftest(quick);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
