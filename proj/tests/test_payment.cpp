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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "crowdauction/errors.hpp"
#include "crowdauction/payment.hpp"
#include "test_support.hpp"

using namespace crowdauction;
using doctest::Approx;

namespace {

AuctionInstance two_worker_uniform(double b0, double b1, double c,
                                   const BidDistribution& dist) {
  AuctionInstance inst;
  inst.bids.resize(2);
  inst.caps.resize(2);
  inst.delta.resize(2);
  inst.bids << b0, b1;
  inst.caps << 1e9, 1e9;
  inst.delta << dist.virtual_welfare(b0), dist.virtual_welfare(b1);
  inst.k = Exponent::finite(1);
  inst.work_total = c;
  return inst;
}

}  // namespace

TEST_CASE("constant allocation integrates to x * bbar") {
  // A single worker receives c at every bid, so p = b*c + (bbar - b)*c.
  const BidDistribution& dist = catest::paper_prior();
  AuctionInstance inst;
  inst.bids.resize(1);
  inst.caps.resize(1);
  inst.delta.resize(1);
  inst.bids << 1.0;
  inst.caps << 5.0;
  inst.delta << dist.virtual_welfare(1.0);
  inst.k = Exponent::finite(2);
  inst.work_total = 3.0;

  double err = 0.0;
  const double p = compute_max_payment(inst, dist, 0, &err);
  CHECK(p == Approx(3.0 * 2.01).epsilon(1e-9));
  CHECK(err < 1e-6 * std::max(1.0, p));
}

TEST_CASE("bid at the truncation bound earns no information rent") {
  const BidDistribution& dist = catest::paper_prior();
  AuctionInstance inst;
  inst.bids.resize(2);
  inst.caps.resize(2);
  inst.delta.resize(2);
  inst.bids << 2.01, 1.0;
  inst.caps << 10.0, 3.0;
  inst.delta << dist.virtual_welfare(2.01), dist.virtual_welfare(1.0);
  inst.k = Exponent::finite(1);
  inst.work_total = 5.0;

  const double x0 = solve(inst).x[0];
  CHECK(compute_max_payment(inst, dist, 0) == Approx(2.01 * x0).epsilon(1e-12));
}

TEST_CASE("uniform prior payment has a logarithmic closed form") {
  // Uniform(0,1), k = 1, c = 1, bids (0.4, 0.6): delta(s) = 2s, so
  // x_0(s) = 1.2 / (1.2 + 2s) and
  // p_0 = 0.4 x_0(0.4) + 0.6 ln(3.2/2.0) = 0.24 + 0.6 ln 1.6.
  const BidDistribution u = BidDistribution::uniform(0.0, 1.0);
  const AuctionInstance inst = two_worker_uniform(0.4, 0.6, 1.0, u);

  const auto analytic_curve = [](double s) { return 1.2 / (1.2 + 2.0 * s); };
  for (double s : {0.4, 0.55, 0.7, 0.9, 1.0})
    CHECK(allocation_at_bid(inst, u, 0, s) == Approx(analytic_curve(s)).epsilon(1e-10));

  double err = 0.0;
  const double p = compute_max_payment(inst, u, 0, &err);
  CHECK(p == Approx(0.24 + 0.6 * std::log(1.6)).epsilon(1e-9));
  CHECK(p == Approx(0.5220021775474413).epsilon(1e-9));
  CHECK(err < 1e-6 * std::max(1.0, p));

  // Independent fixed-step oracle over the implementation's own curve, and
  // self-consistency under step halving.
  const auto curve = [&](double s) { return allocation_at_bid(inst, u, 0, s); };
  const double oracle_coarse = 0.4 * curve(0.4) + catest::oracle_simpson(curve, 0.4, 1.0, 2000);
  const double oracle_fine = 0.4 * curve(0.4) + catest::oracle_simpson(curve, 0.4, 1.0, 4000);
  CHECK(p == Approx(oracle_fine).epsilon(1e-8));
  CHECK(std::abs(oracle_fine - oracle_coarse) < 1e-6 * std::max(1.0, std::abs(oracle_fine)));
}

TEST_CASE("payment is non-increasing in the own bid") {
  Rng rng(11);
  const BidDistribution& dist = catest::paper_prior();
  for (int trial = 0; trial < 5; ++trial) {
    const double k_grid[3] = {1, 2, 8};
    auto inst = catest::random_instance(rng, dist, 6, Exponent::finite(k_grid[trial % 3]));
    double prev = std::numeric_limits<double>::infinity();
    for (int g = 0; g < 12; ++g) {
      const double s = dist.quantile(0.05 + 0.9 * g / 11.0);
      inst.bids[0] = s;
      inst.delta[0] = dist.virtual_welfare(s);
      const double p = compute_max_payment(inst, dist, 0);
      // Slack: both evaluations carry up to 1e-6 * max(1, p) quadrature error.
      CHECK(p <= prev + 5e-6 * std::max(1.0, prev));
      prev = p;
    }
  }
}

TEST_CASE("per-worker Myerson identity as a quadrature identity") {
  // For fixed rival bids, E_b[p_i(b)] = E_b[x_i(b) delta(b)]; both sides are
  // one-dimensional integrals against the prior density.
  const BidDistribution& dist = catest::paper_prior();
  Rng rng(207);
  auto inst = catest::random_instance(rng, dist, 4, Exponent::finite(2), 0.2, 0.5);

  const double lo = 1e-6, hi = dist.upper();
  const auto pay_side = [&](double b) {
    inst.bids[0] = b;
    inst.delta[0] = dist.virtual_welfare(b);
    return compute_max_payment(inst, dist, 0) * dist.pdf(b);
  };
  const auto welfare_side = [&](double b) {
    inst.bids[0] = b;
    inst.delta[0] = dist.virtual_welfare(b);
    return solve(inst).x[0] * inst.delta[0] * dist.pdf(b);
  };
  const double lhs = catest::oracle_simpson(pay_side, lo, hi, 600);
  const double rhs = catest::oracle_simpson(welfare_side, lo, hi, 600);
  CHECK(lhs == Approx(rhs).epsilon(2e-4));
}

TEST_CASE("greedy-limit payment integrates the step curve exactly") {
  const BidDistribution& dist = catest::paper_prior();
  AuctionInstance inst;
  inst.bids.resize(3);
  inst.caps.resize(3);
  inst.delta.resize(3);
  inst.bids << 0.5, 0.8, 1.2;
  inst.caps << 2.0, 2.0, 2.0;
  for (int i = 0; i < 3; ++i) inst.delta[i] = dist.virtual_welfare(inst.bids[i]);
  inst.k = Exponent::infinity();
  inst.work_total = 3.0;

  // x_0(s): 2 while cheapest, 1 between the rivals' bids, 0 beyond both.
  CHECK(allocation_at_bid(inst, dist, 0, 0.6) == Approx(2.0));
  CHECK(allocation_at_bid(inst, dist, 0, 1.0) == Approx(1.0));
  CHECK(allocation_at_bid(inst, dist, 0, 1.5) == 0.0);
  double err = -1.0;
  const double p = compute_max_payment(inst, dist, 0, &err);
  CHECK(p == Approx(0.5 * 2.0 + 0.3 * 2.0 + 0.4 * 1.0).epsilon(1e-12));
  CHECK(err == 0.0);
}

TEST_CASE("realized payment scales proportionally") {
  CHECK(realized_payment(100, 10, 10) == Approx(100.0));
  CHECK(realized_payment(100, 10, 0) == 0.0);
  CHECK(realized_payment(100, 10, 9.5) == Approx(95.0));
  CHECK(realized_payment(100, 0, 0) == 0.0);
  CHECK_THROWS_AS(realized_payment(100, 10, 10.5), Error);
  CHECK_THROWS_AS(realized_payment(100, -1, 0), Error);
}

TEST_CASE("schedule: symmetry and zero-allocation workers") {
  const BidDistribution& dist = catest::paper_prior();

  SUBCASE("identical workers at k = 0 earn identical pay") {
    AuctionInstance inst;
    inst.bids.resize(3);
    inst.caps.resize(3);
    inst.delta.resize(3);
    inst.bids << 1.0, 1.0, 1.0;
    inst.caps << 10.0, 10.0, 10.0;
    for (int i = 0; i < 3; ++i) inst.delta[i] = dist.virtual_welfare(1.0);
    inst.k = Exponent::finite(0);
    inst.work_total = 9.0;
    const PaymentSchedule sched = payment_schedule(inst, dist);
    CHECK(sched.pay[0] == Approx(sched.pay[1]).epsilon(1e-10));
    CHECK(sched.pay[1] == Approx(sched.pay[2]).epsilon(1e-10));
    const auto res = solve(inst);
    for (int i = 0; i < 3; ++i) CHECK(sched.pay[i] >= inst.bids[i] * res.x[i] - 1e-9);
  }

  SUBCASE("a worker bidding bbar with zero work earns zero") {
    AuctionInstance inst;
    inst.bids.resize(2);
    inst.caps.resize(2);
    inst.delta.resize(2);
    inst.bids << 2.01, 0.7;
    inst.caps << 5.0, 5.0;
    inst.delta << dist.virtual_welfare(2.01), dist.virtual_welfare(0.7);
    inst.k = Exponent::infinity();
    inst.work_total = 4.0;
    const PaymentSchedule sched = payment_schedule(inst, dist);
    CHECK(solve(inst).x[0] == 0.0);
    CHECK(sched.pay[0] == 0.0);
  }
}
