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

#include <cstdint>
#include <vector>

#include "crowdauction/mechanism.hpp"

namespace crowdauction {

/// One candidate strategy: the stage-1 bid, the declared capacity, and the
/// stage-2 work actually submitted.
struct StrategyPoint {
  double bid = 0.0;
  double declared_cap = 0.0;
  double work = 0.0;  // \hat{x}
};

/// Box constraints for the best-response search.
struct SearchBox {
  StrategyPoint lo;
  StrategyPoint hi;

  /// [1-frac, 1+frac] times the nominal point per coordinate, with the bid
  /// clamped into the prior's support.
  static SearchBox around(const StrategyPoint& nominal, double frac,
                          const BidDistribution& dist);
  StrategyPoint clamp(StrategyPoint p) const;
};

struct SearchOptions {
  int sweeps = 3;               // coordinate passes before the polish
  int golden_iterations = 40;   // per line search
  int polish_iterations = 120;  // simplex polish budget
  double min_gain = 1e-11;      // required improvement to move off the start
};

/// Bounded derivative-free maximization of worker_utility over
/// (bid, declared capacity, submitted work): coordinate-wise golden-section
/// passes followed by a simplex-style polish, all clamped to `box`.
/// `omega == nullptr` maximizes the strict utility (zero beyond capacity).
/// Deterministic; returns `start` when no strict improvement is found.
StrategyPoint search_best_response(const WorkerProfile& profile,
                                   const BidderContext& context,
                                   const OmegaSpec* omega, StrategyPoint start,
                                   const SearchBox& box,
                                   const SearchOptions& options = {});

struct StudyConfig {
  std::vector<Exponent> k_grid;
  std::vector<double> slopes;     // omega slopes s
  int trials = 100;               // per (k, s) cell
  int n_workers = 10;             // auction size, probe included
  double rho = 0.1;               // c = 100 * n * rho; probe bid conditioned on F(b) < rho
  double box_half_width = 0.5;    // search box: nominal * (1 +- this)
  double agreement_rel_tol = 1e-3;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Per-(k, s) departure statistics, one slot per strategy coordinate in the
/// order (bid, declared capacity, work). Bid and declared capacity compare
/// against the truthful values; the work coordinate compares against the
/// allocation the platform computes from the found bid pair, since that is
/// the assignment the submission answers to.
struct DepartureCell {
  double agreement[3] = {0, 0, 0};      // fraction of trials staying nominal
  double mean_rel_diff[3] = {0, 0, 0};  // over departing trials; NaN when none
  int departures[3] = {0, 0, 0};
  int trials = 0;
};

struct DepartureReport {
  std::vector<Exponent> k_grid;
  std::vector<double> slopes;
  std::vector<DepartureCell> cells;  // k-major

  const DepartureCell& cell(int k_index, int slope_index) const {
    return cells[k_index * slopes.size() + slope_index];
  }
};

/// Replicates the departure-study pipeline: sample a population, condition
/// the probe's bid on F(b) < rho, search from the nominal strategy under the
/// downweighted utility, and tabulate per-coordinate agreement.
DepartureReport departure_study(const StudyConfig& config, const BidDistribution& dist);

}  // namespace crowdauction
