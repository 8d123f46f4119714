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

#include "crowdauction/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "crowdauction/errors.hpp"
#include "crowdauction/parallel.hpp"
#include "crowdauction/payment.hpp"

namespace crowdauction {

Population sample_population(const BidDistribution& dist, int n, Rng& rng) {
  if (n < 1) raise(errc::domain, "population size must be >= 1");
  Population pop;
  pop.bids.resize(n);
  pop.capacities.resize(n);
  pop.accept_rates.resize(n);
  for (int i = 0; i < n; ++i) {
    pop.bids[i] = dist.draw(rng);
    pop.capacities[i] = 100.0 * std::exp(0.3 * detail::norm_quantile(rng.uniform01()));
    pop.accept_rates[i] = rng.uniform(0.9, 1.0);
  }
  return pop;
}

Eigen::ArrayXd monotone_smooth(const Eigen::ArrayXd& v, const Eigen::ArrayXd& roi) {
  const auto n = v.size();
  if (n < 2 || roi.size() != n) raise(errc::domain, "need >= 2 matching points");
  for (Eigen::Index i = 1; i < n; ++i)
    if (!(v[i] > v[i - 1])) raise(errc::domain, "v grid must be strictly increasing");

  // Pool adjacent violators for a non-increasing fit: merge any block whose
  // mean exceeds its predecessor's.
  struct Block {
    double sum;
    int count;
  };
  std::vector<Block> blocks;
  blocks.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    blocks.push_back({roi[i], 1});
    while (blocks.size() > 1) {
      const Block& prev = blocks[blocks.size() - 2];
      const Block& cur = blocks.back();
      if (cur.sum * prev.count <= prev.sum * cur.count) break;
      blocks[blocks.size() - 2] = {prev.sum + cur.sum, prev.count + cur.count};
      blocks.pop_back();
    }
  }
  Eigen::ArrayXd out(n);
  Eigen::Index pos = 0;
  for (const Block& b : blocks) {
    const double mean = b.sum / b.count;
    for (int j = 0; j < b.count; ++j) out[pos++] = mean;
  }
  return out;
}

double participation_rate(const RoiCurve& curve, const BidDistribution& dist,
                          double beta_bar) {
  const auto n = curve.smoothed.size();
  if (n < 2) raise(errc::domain, "curve needs >= 2 points");
  if (curve.smoothed[0] < 0.0) return 0.0;
  if (curve.smoothed[n - 1] >= 0.0) return 1.0;
  Eigen::Index i = 1;
  while (curve.smoothed[i] >= 0.0) ++i;
  const double r0 = curve.smoothed[i - 1], r1 = curve.smoothed[i];
  const double v0 = curve.v[i - 1], v1 = curve.v[i];
  const double crossing = v0 + (v1 - v0) * r0 / (r0 - r1);
  return dist.cdf(std::min(crossing / beta_bar, dist.upper()));
}

ProbeRunStats probe_run(const BidDistribution& dist, int n, double rho, Exponent k,
                        double quantile_a, const ProbeSettings& probe, int repeats,
                        std::uint64_t seed, int threads) {
  if (n < 2) raise(errc::domain, "probe runs need n >= 2");
  if (repeats < 1) raise(errc::domain, "repeats must be >= 1");
  const double b1 = dist.quantile(quantile_a);
  const double c = 100.0 * n * rho;

  std::vector<double> pay(repeats), assigned(repeats);
  parallel_for(0, repeats, threads, [&](int j) {
    Rng rng(derive_seed(seed, "roi-pop", static_cast<std::uint64_t>(n), j));
    const Population others = sample_population(dist, n - 1, rng);

    BidderContext context;
    context.other_bids = others.bids;
    context.other_caps = others.capacities;
    context.k = k;
    context.work_total = c;
    context.dist = &dist;

    const AuctionInstance inst = context.assemble(b1, probe.capacity);
    const double x1 = solve(inst).x[0];
    const double p1 = compute_max_payment(inst, dist, 0);
    // Truthful play with alpha = beta: accepted work is beta * x1, so the
    // realized pay is beta * p1.
    pay[j] = probe.accept_rate * p1;
    assigned[j] = x1;
  });

  ProbeRunStats stats;
  for (int j = 0; j < repeats; ++j) {
    stats.mean_realized_pay += pay[j];
    stats.mean_assigned += assigned[j];
  }
  stats.mean_realized_pay /= repeats;
  stats.mean_assigned /= repeats;
  return stats;
}

namespace {
double roi_from_stats(const ProbeRunStats& stats, double v1, double gamma) {
  const double denom = stats.mean_assigned * v1 + gamma;
  if (denom <= 0.0) return 0.0;
  return stats.mean_realized_pay / denom - 1.0;
}
}  // namespace

double estimate_roi(const BidDistribution& dist, int n, double rho, Exponent k,
                    double quantile_a, const ProbeSettings& probe, double gamma,
                    int repeats, std::uint64_t seed, int threads) {
  const ProbeRunStats stats =
      probe_run(dist, n, rho, k, quantile_a, probe, repeats, seed, threads);
  const double v1 = dist.quantile(quantile_a) * probe.accept_rate;
  return roi_from_stats(stats, v1, gamma);
}

std::vector<double> cost_inflation(const BidDistribution& dist, int n, double rho,
                                   const std::vector<Exponent>& k_grid, int repeats,
                                   std::uint64_t seed, int threads) {
  if (repeats < 1) raise(errc::domain, "repeats must be >= 1");
  const double c = 100.0 * n * rho;
  const int nk = static_cast<int>(k_grid.size());

  // Shared populations across the whole grid plus the baseline: the ratio is
  // then exactly 1 at k = infinity and free of between-population noise.
  std::vector<double> cost(repeats * (nk + 1));
  parallel_for(0, repeats, threads, [&](int j) {
    Rng rng(derive_seed(seed, "inflation-pop", static_cast<std::uint64_t>(n), j));
    const Population pop = sample_population(dist, n, rng);
    AuctionInstance inst;
    inst.bids = pop.bids;
    inst.caps = pop.capacities;
    inst.delta.resize(n);
    for (int i = 0; i < n; ++i) inst.delta[i] = dist.virtual_welfare(pop.bids[i]);
    inst.work_total = c;
    for (int ik = 0; ik <= nk; ++ik) {
      inst.k = ik < nk ? k_grid[ik] : Exponent::infinity();
      cost[j * (nk + 1) + ik] = total_virtual_cost(inst, solve(inst));
    }
  });

  std::vector<double> mean(nk + 1, 0.0);
  for (int j = 0; j < repeats; ++j)
    for (int ik = 0; ik <= nk; ++ik) mean[ik] += cost[j * (nk + 1) + ik];
  std::vector<double> ratios(nk);
  for (int ik = 0; ik < nk; ++ik) ratios[ik] = mean[ik] / mean[nk];
  return ratios;
}

FigureTables run_figures(const SimulationConfig& config, const BidDistribution& dist) {
  FigureTables tables;
  const auto& quantiles = config.probe.quantiles;
  const int na = static_cast<int>(quantiles.size());
  if (na < 2) raise(errc::config, "need at least two probe quantiles");

  Eigen::ArrayXd v_grid(na);
  for (int ia = 0; ia < na; ++ia)
    v_grid[ia] = dist.quantile(quantiles[ia]) * config.probe.accept_rate;

  for (int n : config.population_sizes) {
    for (double rho : config.rho) {
      const std::vector<double> inflation =
          cost_inflation(dist, n, rho, config.k_grid, config.repeats, config.seed,
                         config.threads);
      for (std::size_t ik = 0; ik < config.k_grid.size(); ++ik)
        tables.inflation.push_back({n, rho, config.k_grid[ik], inflation[ik]});

      for (std::size_t ik = 0; ik < config.k_grid.size(); ++ik) {
        std::vector<ProbeRunStats> stats(na);
        for (int ia = 0; ia < na; ++ia) {
          stats[ia] = probe_run(dist, n, rho, config.k_grid[ik], quantiles[ia],
                                config.probe, config.repeats, config.seed,
                                config.threads);
        }
        for (double gamma : config.gamma_grid) {
          RoiCurve curve;
          curve.v = v_grid;
          curve.raw.resize(na);
          for (int ia = 0; ia < na; ++ia)
            curve.raw[ia] = roi_from_stats(stats[ia], v_grid[ia], gamma);
          curve.smoothed = monotone_smooth(curve.v, curve.raw);

          for (int ia = 0; ia < na; ++ia) {
            tables.roi.push_back({n, rho, gamma, config.k_grid[ik], curve.v[ia],
                                  curve.raw[ia], curve.smoothed[ia]});
          }
          const double part =
              participation_rate(curve, dist, config.probe.accept_rate);
          tables.participation.push_back({n, rho, gamma, config.k_grid[ik], part});
          tables.tradeoff.push_back(
              {n, rho, gamma, config.k_grid[ik], inflation[ik], part});
        }
      }
    }
  }
  return tables;
}

}  // namespace crowdauction
