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
#include <optional>
#include <vector>

#include "crowdauction/allocation.hpp"
#include "crowdauction/distribution.hpp"
#include "crowdauction/payment.hpp"
#include "crowdauction/rng.hpp"

namespace crowdauction {

/// A worker's private values: true unit cost v, true capacity, expected
/// acceptable fraction beta, and the indirect participation cost gamma.
/// The truthful stage-1 bid is v / beta.
struct WorkerProfile {
  double unit_cost = 1.0;
  double capacity = 1.0;
  double accept_rate = 1.0;     // beta in (0, 1]
  double indirect_cost = 0.0;   // gamma >= 0

  double truthful_bid() const { return unit_cost / accept_rate; }
};

/// Stage-2 submission: units handed in and the acceptable fraction the
/// requester measured on min(assigned, submitted) units.
struct WorkSubmission {
  double submitted = 0.0;          // \hat{x}
  double accepted_fraction = 1.0;  // alpha in [0, 1]
};

struct SettlementEntry {
  double assigned = 0.0;   // x
  double max_pay = 0.0;    // p
  double submitted = 0.0;  // \hat{x}
  double accepted = 0.0;   // \tilde{x} = alpha * min(x, \hat{x})
  double pay = 0.0;        // \tilde{p} = p * \tilde{x} / x
  std::optional<double> utility;  // present when a profile was supplied
};

struct Stage1Result {
  AuctionInstance instance;
  AllocationResult allocation;
  PaymentSchedule payments;
};

/// Stage 1: collect (bid, declared capacity) pairs, fix the work vector and
/// the maximum-pay schedule. Rejects an irregular prior (errc::config) and
/// an infeasible work demand (errc::infeasible).
Stage1Result run_stage1(Eigen::ArrayXd bids, Eigen::ArrayXd declared_caps,
                        Exponent k, double work_total, const BidDistribution& dist);

/// Stage 2: assess submissions (at most x_i units each), settle realized pay
/// and, when profiles are supplied, each worker's expected utility.
std::vector<SettlementEntry> run_stage2(const Stage1Result& stage1,
                                        const std::vector<WorkSubmission>& submissions,
                                        const std::vector<WorkerProfile>* profiles = nullptr);

/// Downweighting factor for work beyond the true capacity:
///   omega(xhat) = 1                                   for xhat <= capacity
///   omega(xhat) = 1 + slope * (xhat - capacity)/capacity   beyond it.
/// The truthfulness guarantee needs omega(xhat) < capacity/xhat past the
/// capacity, which this family satisfies exactly when slope <= -1; slopes in
/// (-1, 0) deliberately break the premise for departure studies.
struct OmegaSpec {
  double slope = -1.0;  // < 0

  bool satisfies_capacity_bound() const { return slope <= -1.0; }
  double operator()(double x_hat, double capacity) const {
    if (x_hat <= capacity) return 1.0;
    return 1.0 + slope * (x_hat - capacity) / capacity;
  }
};

/// Everything in a round that one worker does not control.
struct BidderContext {
  Eigen::ArrayXd other_bids;
  Eigen::ArrayXd other_caps;
  Exponent k = Exponent::finite(1.0);
  double work_total = 0.0;
  const BidDistribution* dist = nullptr;

  /// Instance with the strategic worker in slot 0.
  AuctionInstance assemble(double bid, double declared_cap) const;
};

/// Assigned work and maximum pay for a worker playing (bid, declared_cap)
/// against a fixed context.
struct WorkerOutcome {
  double assigned = 0.0;
  double max_pay = 0.0;
};
WorkerOutcome evaluate_stage1(const BidderContext& context, double bid,
                              double declared_cap);

/// Expected utility of the worker for the full strategy (bid, declared
/// capacity, submitted work). With `omega == nullptr` the strict form is
/// used: utility drops to zero beyond the true capacity. Otherwise the
/// relaxed form omega(xhat) * (expected pay - direct cost) applies.
double worker_utility(const WorkerProfile& profile, double bid, double declared_cap,
                      double x_hat, const BidderContext& context,
                      const OmegaSpec* omega = nullptr);

/// Utility of truthful play by its closed form
///   beta * integral_{v/beta}^{bbar} x_i(s) ds,
/// evaluated by integrating the allocation curve directly; an independent
/// route from the worker_utility composition.
double truthful_utility_closed_form(const WorkerProfile& profile,
                                    const BidderContext& context);

/// How realized acceptable fractions are drawn in simulations. The analysis
/// only touches E[alpha] = beta, so the default is the degenerate draw
/// alpha = beta; a Beta draw with matching mean is available for realism.
struct AlphaModel {
  enum class Kind { deterministic, beta } kind = Kind::deterministic;
  double concentration = 20.0;  // Beta(c*beta, c*(1-beta)) when kind == beta
};
double sample_accept_fraction(Rng& rng, double mean_accept, const AlphaModel& model);

}  // namespace crowdauction
