// Command-line front end; all work happens behind the C API of libcarleman.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "carleman/carleman.h"

int main(int argc, char** argv) {
  CLI::App app{"Carleman-weighted convexification solver for the wave-equation "
               "coefficient inverse problem"};
  app.set_version_flag("--version", std::string(clm_version()));

  std::string subcommand, config_path;
  std::vector<std::string> overrides;
  int threads = 0;
  std::string property, lambda_grid, samples, seed;

  app.add_option("subcommand", subcommand,
                 "one of: synth, preprocess, solve, reconstruct, verify, experiment")
      ->required();
  app.add_option("-c,--config", config_path, "config file (sectioned key = value)")->required();
  app.add_option("-s,--set", overrides, "override section.key=value (repeatable)");
  app.add_option("--threads", threads, "worker threads (0 = hardware; results invariant)");
  app.add_option("--property", property, "verify: property to certify");
  app.add_option("--lambda-grid", lambda_grid, "verify: comma-separated lambda grid");
  app.add_option("--samples", samples, "verify: sample count");
  app.add_option("--seed", seed, "verify: master seed");

  CLI11_PARSE(app, argc, argv);

  clm_context* ctx = nullptr;
  clm_status st = clm_context_create(config_path.c_str(), &ctx);
  if (st != CLM_OK) {
    std::fprintf(stderr, "ERROR CONFIG_ERROR: cannot load config %s\n", config_path.c_str());
    return 2;
  }

  auto apply = [&](const std::string& dotted) {
    if (clm_context_set(ctx, dotted.c_str()) != CLM_OK) {
      std::fprintf(stderr, "ERROR %s: %s\n", clm_last_error_name(ctx), clm_last_error(ctx));
      clm_context_destroy(ctx);
      std::exit(2);
    }
  };
  for (const auto& o : overrides) apply(o);
  if (!property.empty()) apply("verify.property=" + property);
  if (!lambda_grid.empty()) apply("verify.lambda_grid=" + lambda_grid);
  if (!samples.empty()) apply("verify.samples=" + samples);
  if (!seed.empty()) apply("verify.seed=" + seed);
  if (threads > 0) clm_context_set_threads(ctx, threads);

  st = clm_run(ctx, subcommand.c_str());
  int rc = static_cast<int>(st);
  if (st != CLM_OK)
    std::fprintf(stderr, "ERROR %s: %s\n", clm_last_error_name(ctx), clm_last_error(ctx));
  clm_context_destroy(ctx);
  return rc;
}
