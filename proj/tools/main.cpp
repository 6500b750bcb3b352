#include "parlab/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"parlab: propagator laboratory for non-autonomous parabolic "
               "equations with rough coefficients"};
  app.require_subcommand(1);

  parlab::RunOptions opts;
  std::string config, out;
  std::uint64_t seed = 0;
  bool have_seed = false;

  auto* run = app.add_subcommand("run", "run the configured check suite");
  run->add_option("--config", config, "scenario config (JSON)")->required();
  run->add_option("--out", out, "output directory")->required();
  run->add_flag("--dump-kernels", opts.dump_kernels,
                "write coefficient and kernel-column binary dumps");
  auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");

  auto* list = app.add_subcommand("list-checks", "print the known check ids");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    std::cout << parlab::list_checks_text();
    return 0;
  }
  have_seed = seed_opt->count() > 0;
  opts.config_path = config;
  opts.out_dir = out;
  if (have_seed) opts.seed_override = seed;
  return parlab::run_suite(opts);
}
