// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

#include "mepqlab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mep-qlab experiment runner"};
  std::string experiment, config_path, outdir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;

  std::string names;
  for (const auto& n : mepqlab::experiment_names()) names += n + " ";
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_path, "config file (key = value, [section] headers)")
      ->required();
  app.add_option("--out", outdir, "output directory (default: cwd)");
  app.add_option("--seed", seed, "RNG seed for stochastic experiments")
      ->each([&](const std::string&) { seed_set = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    const mepqlab::Config cfg = mepqlab::Config::parse_file(config_path);
    const std::optional<std::uint64_t> seed_opt =
        seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt;
    const mepqlab::ExperimentSummary sum =
        mepqlab::run_experiment(experiment, cfg, outdir, seed_opt);
    for (const auto& c : sum.criteria)
      std::printf("[%s] %s: %s (value %.6g, threshold %.6g)\n",
                  c.pass ? "PASS" : "FAIL", c.id.c_str(), c.description.c_str(),
                  c.value, c.threshold);
    if (!sum.pass()) {
      std::fprintf(stderr, "mep-qlab: assertion failure in %s\n",
                   experiment.c_str());
      return 1;
    }
    return 0;
  } catch (const mepqlab::config_error& e) {
    std::fprintf(stderr, "mep-qlab: config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mep-qlab: numerical error: %s\n", e.what());
    return 3;
  }
}
