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

#include "crowdauction/allocation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "crowdauction/errors.hpp"

namespace crowdauction {

namespace {

// exp with saturation instead of ERANGE surprises; only relevant for
// exploratory k far beyond the usual {0..8} grid.
double exp_sat(double x) {
  if (x > 709.0) return std::numeric_limits<double>::infinity();
  if (x < -745.0) return 0.0;
  return std::exp(x);
}

double feasibility_scale(const AuctionInstance& inst) {
  return std::max(1.0, inst.work_total);
}

// c = sum(caps): every capacity is pinned and the duals are degenerate; pick
// the smallest mu that keeps every tight multiplier non-negative.
AllocationResult forced_result(const AuctionInstance& inst, double k) {
  AllocationResult res;
  const int n = inst.size();
  res.x = inst.caps;
  res.iterations = 1;
  res.lambda = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd gamma(n);
  for (int i = 0; i < n; ++i) {
    gamma[i] = exp_sat(k * std::log(inst.delta[i])) * inst.caps[i];
    res.tight.push_back(i);
  }
  res.mu = 2.0 * gamma.maxCoeff();
  res.lambda = res.mu - 2.0 * gamma;
  res.objective = 0.0;
  for (int i = 0; i < n; ++i)
    res.objective += exp_sat(k * std::log(inst.delta[i])) * inst.caps[i] * inst.caps[i];
  return res;
}

}  // namespace

Exponent Exponent::finite(double k) {
  if (!std::isfinite(k) || k < 0.0)
    raise(errc::domain, "exponent must be finite and non-negative");
  Exponent e;
  e.value_ = k;
  return e;
}

double Exponent::value() const {
  if (infinite_) raise(errc::domain, "exponent is infinite");
  return value_;
}

void AuctionInstance::validate() const {
  const auto n = delta.size();
  if (n < 1) raise(errc::domain, "instance needs at least one worker");
  if (bids.size() != n || caps.size() != n)
    raise(errc::domain, "bids, caps and delta must have equal length");
  if (!(bids > 0.0).all()) raise(errc::domain, "all bids must be positive");
  if (!(caps > 0.0).all()) raise(errc::domain, "all capacities must be positive");
  if (!(delta > 0.0).all())
    raise(errc::domain, "virtual welfare must be positive for every worker");
  if (!(work_total >= 0.0)) raise(errc::domain, "total work must be non-negative");
  const double cap_sum = caps.sum();
  if (work_total > cap_sum && work_total - cap_sum > 1e-9 * cap_sum)
    raise(errc::infeasible, "demanded work " + std::to_string(work_total) +
                                " exceeds total capacity " + std::to_string(cap_sum));
}

AuctionInstance AuctionInstance::from_bids(const BidDistribution& dist,
                                           Eigen::ArrayXd bids, Eigen::ArrayXd caps,
                                           Exponent k, double work_total) {
  AuctionInstance inst;
  inst.delta.resize(bids.size());
  for (Eigen::Index i = 0; i < bids.size(); ++i)
    inst.delta[i] = dist.virtual_welfare(bids[i]);
  inst.bids = std::move(bids);
  inst.caps = std::move(caps);
  inst.k = k;
  inst.work_total = work_total;
  inst.validate();
  return inst;
}

bool AllocationResult::is_tight(int i) const {
  return std::binary_search(tight.begin(), tight.end(), i);
}

AllocationResult allocate(const AuctionInstance& inst) {
  inst.validate();
  if (inst.k.is_infinite())
    raise(errc::domain, "allocate requires finite k; use allocate_limit_k_inf");
  const double k = inst.k.value();
  const int n = inst.size();
  const double c = std::min(inst.work_total, inst.caps.sum());
  if (c >= inst.caps.sum()) return forced_result(inst, k);

  // All weight arithmetic in log space: log_w_i = -k log(delta_i), shifted by
  // the free-set maximum before exponentiation, which keeps the closed form
  // exact up to scale for any k (the k = 1e6 regime included).
  const Eigen::ArrayXd log_w = -k * inst.delta.log();

  std::vector<char> tight_mask(n, 0);
  Eigen::ArrayXd x(n);
  double c_free = c;        // c'(A): work left for the free set
  double log_sum_free = 0;  // log sum over the free set of delta^{-k}
  int iterations = 0;

  while (true) {
    ++iterations;
    c_free = c;
    double shift = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (tight_mask[i])
        c_free -= inst.caps[i];
      else
        shift = std::max(shift, log_w[i]);
    }
    c_free = std::max(c_free, 0.0);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i)
      if (!tight_mask[i]) wsum += exp_sat(log_w[i] - shift);
    log_sum_free = shift + std::log(wsum);

    for (int i = 0; i < n; ++i)
      x[i] = tight_mask[i] ? inst.caps[i] : c_free * exp_sat(log_w[i] - shift) / wsum;

    bool violated = false;
    for (int i = 0; i < n; ++i) {
      if (!tight_mask[i] && x[i] > inst.caps[i]) {
        tight_mask[i] = 1;
        violated = true;
      }
    }
    if (!violated) break;
    assert(iterations <= n && "tight-set iteration exceeded worker count");
  }

  AllocationResult res;
  res.x = x;
  res.iterations = iterations;
  for (int i = 0; i < n; ++i)
    if (tight_mask[i]) res.tight.push_back(i);

  res.lambda = Eigen::ArrayXd::Zero(n);
  if (c_free > 0.0) {
    res.mu = 2.0 * c_free * exp_sat(-log_sum_free);
  } else if (!res.tight.empty()) {
    // Degenerate c' = 0: duals are non-unique; pick the smallest mu keeping
    // every tight multiplier non-negative.
    double max_gamma = 0.0;
    for (int i : res.tight)
      max_gamma = std::max(max_gamma, exp_sat(k * std::log(inst.delta[i])) * inst.caps[i]);
    res.mu = 2.0 * max_gamma;
  }
  for (int i : res.tight)
    res.lambda[i] = res.mu - 2.0 * exp_sat(k * std::log(inst.delta[i])) * inst.caps[i];

  res.objective = 0.0;
  for (int i = 0; i < n; ++i)
    res.objective += exp_sat(k * std::log(inst.delta[i])) * x[i] * x[i];
  return res;
}

AllocationResult allocate_limit_k_inf(const AuctionInstance& inst) {
  inst.validate();
  const int n = inst.size();
  const double c = std::min(inst.work_total, inst.caps.sum());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return inst.delta[a] < inst.delta[b]; });

  AllocationResult res;
  res.x = Eigen::ArrayXd::Zero(n);
  double remaining = c;
  const double dust = 1e-12 * std::max(1.0, c);
  double marginal_welfare = 0.0;

  int g = 0;
  while (g < n && remaining > dust) {
    int g_end = g + 1;
    while (g_end < n && inst.delta[order[g_end]] == inst.delta[order[g]]) ++g_end;
    ++res.iterations;
    marginal_welfare = inst.delta[order[g]];

    // Equal split across the group; members whose capacity falls below the
    // running share are pinned at capacity and the share recomputed.
    std::vector<int> open(order.begin() + g, order.begin() + g_end);
    while (!open.empty() && remaining > dust) {
      const double share = remaining / static_cast<double>(open.size());
      std::vector<int> still_open;
      double pinned = 0.0;
      for (int i : open) {
        if (inst.caps[i] <= share) {
          res.x[i] = inst.caps[i];
          pinned += inst.caps[i];
        } else {
          still_open.push_back(i);
        }
      }
      if (pinned == 0.0) {
        for (int i : open) res.x[i] = share;
        remaining = 0.0;
        break;
      }
      remaining -= pinned;
      open.swap(still_open);
    }
    g = g_end;
  }

  res.mu = marginal_welfare;
  res.lambda = Eigen::ArrayXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (res.x[i] == inst.caps[i]) {
      res.tight.push_back(i);
      res.lambda[i] = std::max(res.mu - inst.delta[i], 0.0);
    }
  }
  std::sort(res.tight.begin(), res.tight.end());
  res.objective = (res.x * inst.delta).sum();
  return res;
}

AllocationResult solve(const AuctionInstance& inst) {
  return inst.k.is_infinite() ? allocate_limit_k_inf(inst) : allocate(inst);
}

AllocationResult oracle_allocate(const AuctionInstance& inst) {
  inst.validate();
  if (inst.k.is_infinite()) raise(errc::domain, "oracle requires finite k");
  const int n = inst.size();
  if (n > 16) raise(errc::size, "exhaustive oracle limited to n <= 16");
  const double k = inst.k.value();
  const double c = std::min(inst.work_total, inst.caps.sum());
  if (c >= inst.caps.sum()) return forced_result(inst, k);
  const double scale = feasibility_scale(inst);

  const Eigen::ArrayXd log_w = -k * inst.delta.log();
  Eigen::ArrayXd gamma(n);
  for (int i = 0; i < n; ++i)
    gamma[i] = exp_sat(k * std::log(inst.delta[i])) * inst.caps[i];

  AllocationResult best;
  double best_objective = std::numeric_limits<double>::infinity();
  bool found = false;

  Eigen::ArrayXd x(n), lambda(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double c_free = c;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) c_free -= inst.caps[i];
    if (c_free < -1e-9 * scale) continue;
    c_free = std::max(c_free, 0.0);

    double shift = -std::numeric_limits<double>::infinity();
    int free_count = 0;
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) {
        shift = std::max(shift, log_w[i]);
        ++free_count;
      }
    }
    double mu;
    if (free_count == 0) {
      if (std::abs(c_free) > 1e-9 * scale) continue;
      mu = 0.0;
      for (int i = 0; i < n; ++i) mu = std::max(mu, 2.0 * gamma[i]);
      x = inst.caps;
    } else {
      double wsum = 0.0;
      for (int i = 0; i < n; ++i)
        if (!(mask & (1u << i))) wsum += exp_sat(log_w[i] - shift);
      mu = 2.0 * c_free * exp_sat(-shift) / wsum;
      bool primal_ok = true;
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          x[i] = inst.caps[i];
        } else {
          x[i] = c_free * exp_sat(log_w[i] - shift) / wsum;
          if (x[i] > inst.caps[i] + 1e-9 * (1.0 + inst.caps[i])) primal_ok = false;
        }
      }
      if (!primal_ok) continue;
    }

    bool dual_ok = true;
    lambda.setZero();
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        lambda[i] = mu - 2.0 * gamma[i];
        if (lambda[i] < -1e-9 * std::max(1.0, mu)) dual_ok = false;
      }
    }
    if (!dual_ok) continue;

    double objective = 0.0;
    for (int i = 0; i < n; ++i)
      objective += exp_sat(k * std::log(inst.delta[i])) * x[i] * x[i];
    if (objective < best_objective) {
      best_objective = objective;
      best.x = x;
      best.lambda = lambda;
      best.mu = mu;
      best.objective = objective;
      best.tight.clear();
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) best.tight.push_back(i);
      found = true;
    }
  }
  if (!found) raise(errc::infeasible, "no feasible tight-set candidate");
  best.iterations = 1;
  return best;
}

Eigen::ArrayXd sort_keys(const AuctionInstance& inst) {
  if (inst.k.is_infinite()) raise(errc::domain, "sort keys require finite k");
  const double k = inst.k.value();
  Eigen::ArrayXd gamma(inst.size());
  for (int i = 0; i < inst.size(); ++i)
    gamma[i] = exp_sat(k * std::log(inst.delta[i])) * inst.caps[i];
  return gamma;
}

double allocation_at_bid(const AuctionInstance& inst, const BidDistribution& dist,
                         int worker, double s) {
  if (worker < 0 || worker >= inst.size()) raise(errc::domain, "worker index out of range");
  AuctionInstance probe = inst;
  probe.bids[worker] = s;
  probe.delta[worker] = dist.virtual_welfare(s);
  return solve(probe).x[worker];
}

std::vector<std::pair<double, double>> allocation_curve(
    const AuctionInstance& inst, const BidDistribution& dist, int worker,
    std::span<const double> grid) {
  if (worker < 0 || worker >= inst.size()) raise(errc::domain, "worker index out of range");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(grid.size());
  AuctionInstance probe = inst;
  for (double s : grid) {
    probe.bids[worker] = s;
    probe.delta[worker] = dist.virtual_welfare(s);
    curve.emplace_back(s, solve(probe).x[worker]);
  }
  return curve;
}

double total_virtual_cost(const AuctionInstance& inst, const AllocationResult& result) {
  return (result.x * inst.delta).sum();
}

}  // namespace crowdauction
