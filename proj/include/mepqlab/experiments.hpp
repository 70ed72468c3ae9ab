// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef MEPQLAB_EXPERIMENTS_HPP
#define MEPQLAB_EXPERIMENTS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mepqlab/common.hpp"

namespace mepqlab {

/// Plain-text `key = value` configuration with [section] headers.
/// Unknown sections or keys are rejected against the experiment schema.
struct Config {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, std::map<std::string, Entry>> sections;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  void check_known(const std::map<std::string, std::set<std::string>>& schema) const;
};

struct CriterionResult {
  std::string id;           // acceptance criterion id, e.g. "AC2"
  std::string description;
  double value;
  double threshold;
  bool pass;
};

struct ExperimentSummary {
  std::string experiment;
  std::uint64_t seed = 0;
  bool stochastic = false;
  std::vector<std::string> outputs;
  std::vector<CriterionResult> criteria;

  bool pass() const;
  void add(const std::string& id, const std::string& desc, double value,
           double threshold, bool ok);
  std::string to_json() const;
};

std::vector<std::string> experiment_names();

/// Runs one experiment, writing CSV artifacts and a JSON summary into
/// `outdir`. Throws config_error / numerical_error; assertion failures are
/// reported through the summary.
ExperimentSummary run_experiment(const std::string& name, const Config& config,
                                 const std::string& outdir,
                                 std::optional<std::uint64_t> seed_override);

}  // namespace mepqlab

#endif
