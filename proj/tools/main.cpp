// coroica command-line harness.
#include "CLI11.hpp"
#include "coroica/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"coroica: confounding-robust ICA, baselines, simulation and benchmarks"};
  app.require_subcommand(1);

  coroica::cli::Options opts;
  std::string config, out = "out";
  std::uint64_t seed = 0;
  int jobs = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "run seed (overrides the config's \"seed\")");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic data set");
  auto* fit = app.add_subcommand("fit", "fit an unmixing matrix and score it");
  auto* bench = app.add_subcommand("bench", "run a benchmark sweep");
  auto* climate = app.add_subcommand("climate", "lag-swept SVAR identification on ice-core records");
  for (auto* sub : {simulate, fit, bench, climate}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  opts.config = config;
  opts.out = out;
  opts.jobs = jobs;
  for (auto* sub : {simulate, fit, bench, climate})
    if (sub->count("--seed")) opts.seed = seed;

  try {
    if (*simulate) return coroica::cli::cmd_simulate(opts, std::cout);
    if (*fit) return coroica::cli::cmd_fit(opts, std::cout);
    if (*bench) return coroica::cli::cmd_bench(opts, std::cout);
    if (*climate) return coroica::cli::cmd_climate(opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
