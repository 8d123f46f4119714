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

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "crowdauction/allocation.hpp"
#include "crowdauction/distribution.hpp"
#include "crowdauction/mechanism.hpp"
#include "crowdauction/rng.hpp"

namespace crowdauction {

/// Probe worker used for ROI curves: bids pinned to prior quantiles, fixed
/// capacity and acceptable-work rate.
struct ProbeSettings {
  std::vector<double> quantiles = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double capacity = 100.0;
  double accept_rate = 0.95;
};

struct SimulationConfig {
  std::vector<int> population_sizes = {10, 100};
  std::vector<double> rho = {0.1, 0.5};  // c = 100 * n * rho
  std::vector<Exponent> k_grid = {Exponent::finite(0), Exponent::finite(1),
                                  Exponent::finite(2), Exponent::finite(4),
                                  Exponent::finite(8), Exponent::infinity()};
  std::vector<double> gamma_grid = {0, 1, 2, 3, 4, 5};  // indirect costs
  int repeats = 100;
  ProbeSettings probe;
  std::uint64_t seed = 12345;
  int threads = 0;  // 0 = machine parallelism
};

struct Population {
  Eigen::ArrayXd bids;          // ~ prior
  Eigen::ArrayXd capacities;    // ~ 100 * logNormal(0, 0.3)
  Eigen::ArrayXd accept_rates;  // ~ Uniform(0.9, 1)
};

/// Draws one population; per worker the stream is consumed in the order
/// (bid, capacity, accept rate).
Population sample_population(const BidDistribution& dist, int n, Rng& rng);

/// Pool-adjacent-violators fit, constrained non-increasing in v. `v` must be
/// strictly increasing; returns the fitted values.
Eigen::ArrayXd monotone_smooth(const Eigen::ArrayXd& v, const Eigen::ArrayXd& roi);

struct RoiCurve {
  Eigen::ArrayXd v;         // probe unit costs, ascending
  Eigen::ArrayXd raw;       // Monte Carlo ROI estimates
  Eigen::ArrayXd smoothed;  // non-increasing fit
};

/// Population fraction with non-negative ROI: locates the zero crossing of
/// the smoothed curve and maps it through the bid prior at v = b * beta_bar.
/// Returns 1 when the curve never goes negative and 0 when it starts there.
double participation_rate(const RoiCurve& curve, const BidDistribution& dist,
                          double beta_bar);

/// Monte Carlo sums for the probe across `repeats` auctions with everyone
/// else resampled per repeat (common random numbers across k, rho and the
/// probe quantile: the population substream depends only on (n, repeat)).
struct ProbeRunStats {
  double mean_realized_pay = 0.0;  // sum of p~ over repeats / repeats
  double mean_assigned = 0.0;      // sum of x over repeats / repeats
};
ProbeRunStats probe_run(const BidDistribution& dist, int n, double rho, Exponent k,
                        double quantile_a, const ProbeSettings& probe, int repeats,
                        std::uint64_t seed, int threads = 1);

/// ROI of the probe at one grid point:
///   mean realized pay / (mean assigned work * v1 + gamma) - 1,
/// with v1 = quantile(a) * accept_rate (inverting the truthful bid). A zero
/// denominator (gamma = 0 and never allocated) yields 0.
double estimate_roi(const BidDistribution& dist, int n, double rho, Exponent k,
                    double quantile_a, const ProbeSettings& probe, double gamma,
                    int repeats, std::uint64_t seed, int threads = 1);

/// Mean total virtual cost over shared populations for every k in the grid,
/// divided by the same mean at k = infinity; the k = infinity baseline is
/// appended internally when absent from the grid.
std::vector<double> cost_inflation(const BidDistribution& dist, int n, double rho,
                                   const std::vector<Exponent>& k_grid, int repeats,
                                   std::uint64_t seed, int threads = 1);

struct Fig2Row {
  int n;
  double rho, gamma;
  Exponent k;
  double v1, roi_raw, roi_smoothed;
};
struct Fig3Row {
  int n;
  double rho, gamma;
  Exponent k;
  double participation;
};
struct Fig4Row {
  int n;
  double rho;
  Exponent k;
  double inflation;
};
struct Fig5Row {
  int n;
  double rho, gamma;
  Exponent k;
  double inflation, participation;
};

struct FigureTables {
  std::vector<Fig2Row> roi;
  std::vector<Fig3Row> participation;
  std::vector<Fig4Row> inflation;
  std::vector<Fig5Row> tradeoff;
};

/// Full study: ROI curves, participation, cost inflation and the
/// inflation/participation tradeoff over the configured grids.
FigureTables run_figures(const SimulationConfig& config, const BidDistribution& dist);

}  // namespace crowdauction
