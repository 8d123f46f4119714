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
#include <span>
#include <utility>
#include <vector>

#include "crowdauction/distribution.hpp"

namespace crowdauction {

/// Equality/efficiency exponent. k = infinity is a distinguished state, never
/// a float sentinel, so the weight delta^k is never formed at infinity.
class Exponent {
 public:
  static Exponent finite(double k);
  static Exponent infinity() {
    Exponent e;
    e.infinite_ = true;
    return e;
  }
  bool is_infinite() const { return infinite_; }
  double value() const;  // errc::domain when infinite

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// One auction round: per-worker bids, declared capacities, their virtual
/// welfare, the exponent k, and the total work demanded.
struct AuctionInstance {
  Eigen::ArrayXd bids;
  Eigen::ArrayXd caps;    // declared capacities \hat{x}^max
  Eigen::ArrayXd delta;   // virtual welfare of each bid
  Exponent k = Exponent::finite(1.0);
  double work_total = 0.0;  // c

  int size() const { return static_cast<int>(delta.size()); }

  /// Checks positivity, matching lengths and feasibility c <= sum(caps).
  /// An overshoot below 1e-9 * sum(caps) is tolerated (clamped later).
  void validate() const;

  /// Convenience constructor deriving delta from the bids via the prior.
  static AuctionInstance from_bids(const BidDistribution& dist,
                                   Eigen::ArrayXd bids, Eigen::ArrayXd caps,
                                   Exponent k, double work_total);
};

/// Work vector, tight constraint set, multipliers and objective for one
/// solved instance. Multipliers satisfy the stationarity identity
///   2 delta_i^k x_i + lambda_i - mu = 0
/// so lambda and mu are twice the values written against the dual in the
/// closed-form solution; tightness (lambda_i > 0 iff x_i pinned at its cap)
/// is unaffected by the scaling. Results from the k = infinity routine carry
/// the linear-program limit multipliers instead (mu = marginal welfare,
/// lambda_i = max(mu - delta_i, 0)).
struct AllocationResult {
  Eigen::ArrayXd x;
  std::vector<int> tight;   // indices with the capacity constraint tight
  Eigen::ArrayXd lambda;
  double mu = 0.0;
  double objective = 0.0;   // sum delta_i^k x_i^2 (finite k); sum delta_i x_i at k = infinity
  int iterations = 0;

  bool is_tight(int i) const;
};

/// Iterative tight-set solver for the equality/efficiency program
///   min sum delta_i^k x_i^2  s.t.  sum x_i = c,  0 <= x_i <= cap_i.
/// Starts from an empty tight set, applies the closed form on the free set,
/// and batches every violated capacity into the tight set until none remain.
/// Terminates in at most n iterations. Requires finite k.
AllocationResult allocate(const AuctionInstance& inst);

/// k -> infinity limit: fill capacity greedily in ascending virtual-welfare
/// order; a marginal group of equal-welfare workers splits the remaining
/// work equally (capacities permitting).
AllocationResult allocate_limit_k_inf(const AuctionInstance& inst);

/// Dispatches on inst.k.
AllocationResult solve(const AuctionInstance& inst);

/// Independent exhaustive check: enumerates all 2^n candidate tight sets,
/// solves the equality-constrained closed form for each, keeps candidates
/// that are primal feasible with non-negative multipliers, and returns the
/// one with the smallest objective. n <= 16, finite k.
AllocationResult oracle_allocate(const AuctionInstance& inst);

/// Tight-set ordering statistic gamma_i = delta_i^k * cap_i. The tight set
/// of any solution is a prefix of the workers sorted by this key. Finite k.
Eigen::ArrayXd sort_keys(const AuctionInstance& inst);

/// Worker `i`'s allocation when its own bid is replaced by `s`, all else
/// fixed. `s` must lie in the prior's support.
double allocation_at_bid(const AuctionInstance& inst, const BidDistribution& dist,
                         int worker, double s);

/// Samples s -> x_i(s, b_{-i}) over a bid grid; the curve integrated by the
/// payment rule. Non-increasing in s for a regular prior.
std::vector<std::pair<double, double>> allocation_curve(
    const AuctionInstance& inst, const BidDistribution& dist, int worker,
    std::span<const double> grid);

/// sum_i x_i delta_i, the expected-cost surrogate.
double total_virtual_cost(const AuctionInstance& inst, const AllocationResult& result);

}  // namespace crowdauction
