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

#include "crowdauction/allocation.hpp"
#include "crowdauction/distribution.hpp"

namespace crowdauction {

/// Per-worker maximum promised payments and quadrature error estimates.
struct PaymentSchedule {
  Eigen::ArrayXd pay;
  Eigen::ArrayXd error_estimate;
};

/// Maximum promised pay for one worker:
///   p_i = b_i x_i(b) + integral_{b_i}^{bbar} x_i(s, b_{-i}) ds.
/// For finite k the integrand is continuous and piecewise smooth, handled by
/// adaptive Simpson (max depth 20); at k = infinity the allocation is a step
/// function of the own bid with breakpoints at the other workers' bids, so
/// the integral is evaluated exactly segment by segment. The reported error
/// estimate is below 1e-6 * max(1, p_i), else errc::precision is raised.
double compute_max_payment(const AuctionInstance& inst, const BidDistribution& dist,
                           int worker, double* error_estimate = nullptr);

/// Pay actually disbursed after quality scaling: p * accepted / assigned
/// (zero when nothing was assigned). accepted > assigned is a domain error.
double realized_payment(double max_pay, double assigned, double accepted);

/// compute_max_payment for every worker.
PaymentSchedule payment_schedule(const AuctionInstance& inst, const BidDistribution& dist);

}  // namespace crowdauction
