// Copyright 2026 The crowdauction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "crowdauction/distribution.hpp"
#include "crowdauction/simulation.hpp"

namespace crowdauction {

/// Serializable description of a bid prior.
struct DistributionSpec {
  std::string kind = "truncated_log_normal";
  double mu = 0.0;
  double sigma = 0.3;
  double bbar = 2.01;  // <= 0 requests the 99th-percentile default
  double lower = 0.0;
  std::vector<double> knots_b;  // tabulated only
  std::vector<double> knots_cdf;

  BidDistribution build() const;
};

/// Experiment file: prior, simulation grids, seed. Parsing and serialization
/// round-trip exactly.
struct ExperimentConfig {
  DistributionSpec distribution;
  SimulationConfig simulation;
};

DistributionSpec distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const DistributionSpec& spec);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

ExperimentConfig load_config_file(const std::string& path);

/// FNV-1a 64 over the canonical (key-sorted) serialization, as a fixed-width
/// hex string; recorded in output manifests so replays are checkable.
std::string config_hash(const nlohmann::json& j);

/// "inf" or the numeric value.
std::string exponent_to_string(const Exponent& k);
Exponent exponent_from_string(const std::string& text);

}  // namespace crowdauction
