// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mepqlab/experiments.hpp"

using namespace mepqlab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("mepqlab_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("config parsing") {
  const Config cfg = Config::parse_string(
      "# comment\n[packet]\nQ = 1.5\ndQ=2.0\n\n[run]\nseed = 42\n");
  CHECK(cfg.get_double("packet", "Q", 0.0) == 1.5);
  CHECK(cfg.get_double("packet", "dQ", 0.0) == 2.0);
  CHECK(cfg.get_u64("run", "seed", 0) == 42);
  CHECK(cfg.get_double("packet", "missing", 7.0) == 7.0);

  CHECK_THROWS_AS(Config::parse_string("[oops\n"), config_error);
  CHECK_THROWS_AS(Config::parse_string("novalue\n"), config_error);
  CHECK_THROWS_AS(Config::parse_string("[p]\nx = abc\n").get_double("p", "x", 0),
                  config_error);

  // unknown keys are rejected against the schema, with the line number
  const Config bad = Config::parse_string("[packet]\nbogus = 1\n");
  try {
    bad.check_known({{"packet", {"Q"}}});
    CHECK(false);
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("stochastic experiments demand a seed") {
  const Config empty = Config::parse_string("");
  const std::string dir = fresh_dir("seed");
  CHECK_THROWS_AS(run_experiment("mepacket-evolve", empty, dir, std::nullopt),
                  config_error);
  CHECK_THROWS_AS(run_experiment("no-such-experiment", empty, dir, std::nullopt),
                  config_error);
}

TEST_CASE("entanglement demo") {
  const Config empty = Config::parse_string("");
  const std::string dir = fresh_dir("ent");
  const ExperimentSummary sum =
      run_experiment("entanglement-demo", empty, dir, std::nullopt);
  CHECK(sum.pass());
  CHECK(std::filesystem::exists(dir + "/entanglement_demo.json"));
  const std::string summary = slurp(dir + "/entanglement-demo_summary.json");
  CHECK(summary.find("\"AC4\"") != std::string::npos);
}

TEST_CASE("classical limit table") {
  const Config empty = Config::parse_string("");
  const std::string dir = fresh_dir("limit");
  const ExperimentSummary sum =
      run_experiment("classical-limit-table", empty, dir, std::nullopt);
  CHECK(sum.pass());
}

TEST_CASE("determinism: identical config and seed give identical bytes") {
  const Config cfg = Config::parse_string("[trigger]\nn_models = 6\nprop23_trials = 10\n");
  const std::string d1 = fresh_dir("det1");
  const std::string d2 = fresh_dir("det2");
  run_experiment("trigger-report", cfg, d1, 99);
  run_experiment("trigger-report", cfg, d2, 99);
  CHECK(slurp(d1 + "/trigger_report.json") == slurp(d2 + "/trigger_report.json"));
  CHECK(slurp(d1 + "/trigger-report_summary.json") ==
        slurp(d2 + "/trigger-report_summary.json"));
  CHECK(!slurp(d1 + "/trigger_report.json").empty());
}
