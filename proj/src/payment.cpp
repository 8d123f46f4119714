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

#include "crowdauction/payment.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crowdauction/errors.hpp"
#include "crowdauction/quadrature.hpp"

namespace crowdauction {

namespace {

// Integral of the step-function allocation curve at k = infinity. Rank order
// against the other bids is all that matters, so the curve is constant
// between consecutive other-worker bids and each segment is integrated
// exactly at its midpoint.
double integrate_greedy_curve(AuctionInstance& probe, const BidDistribution& dist,
                              int worker, double lo, double hi) {
  std::vector<double> cuts;
  cuts.push_back(lo);
  for (int j = 0; j < probe.size(); ++j) {
    if (j == worker) continue;
    const double b = probe.bids[j];
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());

  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double len = cuts[s + 1] - cuts[s];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[s] + cuts[s + 1]);
    probe.bids[worker] = mid;
    probe.delta[worker] = dist.virtual_welfare(mid);
    total += solve(probe).x[worker] * len;
  }
  return total;
}

}  // namespace

double compute_max_payment(const AuctionInstance& inst, const BidDistribution& dist,
                           int worker, double* error_estimate) {
  if (worker < 0 || worker >= inst.size()) raise(errc::domain, "worker index out of range");
  const double own_bid = inst.bids[worker];
  const double bbar = dist.upper();
  if (own_bid > bbar)
    raise(errc::domain, "bid " + std::to_string(own_bid) + " above the support bound");

  const double x_at_bid = solve(inst).x[worker];
  const double base = own_bid * x_at_bid;

  double rent = 0.0;
  double err = 0.0;
  if (own_bid < bbar) {
    AuctionInstance probe = inst;
    if (inst.k.is_infinite()) {
      rent = integrate_greedy_curve(probe, dist, worker, own_bid, bbar);
    } else {
      auto curve = [&](double s) {
        probe.bids[worker] = s;
        probe.delta[worker] = dist.virtual_welfare(s);
        return solve(probe).x[worker];
      };
      // The allocation is non-increasing in the own bid, so x(b) * (bbar - b)
      // bounds the rent; budget the quadrature a decade under the contract.
      const double rough = base + (bbar - own_bid) * x_at_bid;
      const double tol = 1e-7 * std::max(1.0, rough);
      const QuadratureResult q = adaptive_simpson(curve, own_bid, bbar, tol);
      rent = q.value;
      err = q.error;
    }
  }

  const double pay = base + rent;
  if (err > 1e-6 * std::max(1.0, pay))
    raise(errc::precision, "payment quadrature error " + std::to_string(err) +
                               " above tolerance for worker " + std::to_string(worker));
  if (error_estimate) *error_estimate = err;
  return pay;
}

double realized_payment(double max_pay, double assigned, double accepted) {
  if (accepted < 0.0 || assigned < 0.0)
    raise(errc::domain, "work quantities must be non-negative");
  if (accepted > assigned * (1.0 + 1e-12) + 1e-12)
    raise(errc::domain, "accepted work exceeds assigned work");
  if (assigned == 0.0) return 0.0;
  return max_pay * std::min(accepted, assigned) / assigned;
}

PaymentSchedule payment_schedule(const AuctionInstance& inst, const BidDistribution& dist) {
  PaymentSchedule sched;
  const int n = inst.size();
  sched.pay.resize(n);
  sched.error_estimate.resize(n);
  for (int i = 0; i < n; ++i)
    sched.pay[i] = compute_max_payment(inst, dist, i, &sched.error_estimate[i]);
  return sched;
}

}  // namespace crowdauction
