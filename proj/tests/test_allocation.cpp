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

#include "crowdauction/allocation.hpp"
#include "crowdauction/errors.hpp"
#include "test_support.hpp"

using namespace crowdauction;
using doctest::Approx;

namespace {

AuctionInstance make(std::vector<double> delta, std::vector<double> caps, Exponent k,
                     double c) {
  AuctionInstance inst;
  const auto n = static_cast<Eigen::Index>(delta.size());
  inst.bids.resize(n);
  inst.caps.resize(n);
  inst.delta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inst.bids[i] = delta[i];  // bids only need positivity here
    inst.delta[i] = delta[i];
    inst.caps[i] = caps[i];
  }
  inst.k = k;
  inst.work_total = c;
  return inst;
}

void check_kkt(const AuctionInstance& inst, const AllocationResult& res) {
  const double k = inst.k.value();
  const double c = inst.work_total;
  CHECK(std::abs(res.x.sum() - c) < 1e-9 * std::max(1.0, c));
  for (int i = 0; i < inst.size(); ++i) {
    CHECK(res.x[i] >= -1e-12);
    CHECK(res.x[i] <= inst.caps[i] * (1.0 + 1e-12) + 1e-12);
    const double stat = 2.0 * std::pow(inst.delta[i], k) * res.x[i] + res.lambda[i] - res.mu;
    const double scale = std::max({1.0, std::abs(res.mu), std::abs(res.lambda[i])});
    CHECK(std::abs(stat) < 1e-9 * scale);
    // complementary slackness
    CHECK(std::abs(res.lambda[i] * (inst.caps[i] - res.x[i])) < 1e-9 * scale);
    if (res.is_tight(i)) {
      CHECK(res.lambda[i] > 0.0);
      CHECK(res.x[i] == Approx(inst.caps[i]));
    } else {
      CHECK(res.lambda[i] == 0.0);
    }
  }
}

}  // namespace

TEST_CASE("closed form with no tight constraints") {
  const auto inst = make({1, 2}, {10, 10}, Exponent::finite(1), 3);
  const auto res = allocate(inst);
  CHECK(res.x[0] == Approx(2.0).epsilon(1e-12));  // x_i proportional to 1/delta_i
  CHECK(res.x[1] == Approx(1.0).epsilon(1e-12));
  CHECK(res.tight.empty());
  CHECK(res.iterations == 1);
  check_kkt(inst, res);
}

TEST_CASE("k = 0 equalizes work") {
  const auto inst = make({1, 2, 3}, {10, 10, 10}, Exponent::finite(0), 9);
  const auto res = allocate(inst);
  for (int i = 0; i < 3; ++i) CHECK(res.x[i] == Approx(3.0).epsilon(1e-12));
  check_kkt(inst, res);
}

TEST_CASE("tight set engages and splits the remainder") {
  // delta = (1,2,4), k = 2, caps = (0.5,10,10), c = 5:
  // worker 0 pins at 0.5; the remaining 4.5 splits as 1/4 : 1/16.
  const auto inst = make({1, 2, 4}, {0.5, 10, 10}, Exponent::finite(2), 5);
  const auto res = allocate(inst);
  CHECK(res.x[0] == Approx(0.5).epsilon(1e-12));
  CHECK(res.x[1] == Approx(3.6).epsilon(1e-12));
  CHECK(res.x[2] == Approx(0.9).epsilon(1e-12));
  CHECK(res.tight == std::vector<int>{0});
  CHECK(res.iterations == 2);
  check_kkt(inst, res);

  const auto oracle = oracle_allocate(inst);
  CHECK(oracle.objective == Approx(res.objective).epsilon(1e-12));
}

TEST_CASE("single worker") {
  SUBCASE("forced to capacity") {
    const auto inst = make({1.5}, {4}, Exponent::finite(3), 4);
    const auto res = allocate(inst);
    CHECK(res.x[0] == 4.0);
    CHECK(res.tight == std::vector<int>{0});
    const auto oracle = oracle_allocate(inst);
    CHECK(oracle.x[0] == 4.0);
    CHECK(oracle.tight == std::vector<int>{0});
  }
  SUBCASE("below capacity") {
    const auto inst = make({1.5}, {4}, Exponent::finite(3), 2.5);
    const auto res = allocate(inst);
    CHECK(res.x[0] == Approx(2.5));
    CHECK(res.tight.empty());
  }
}

TEST_CASE("feasibility guards") {
  auto inst = make({1, 2}, {1, 1}, Exponent::finite(1), 3);
  CHECK_THROWS_AS(allocate(inst), Error);  // c > sum caps

  inst.work_total = 2.0 + 1e-12;  // inside the clamp band
  const auto res = allocate(inst);
  CHECK(res.x[0] == 1.0);
  CHECK(res.x[1] == 1.0);
  CHECK(res.tight.size() == 2);

  auto bad = make({1, -2}, {1, 1}, Exponent::finite(1), 1);
  CHECK_THROWS_AS(allocate(bad), Error);  // delta must be positive

  auto inf = make({1, 2}, {1, 1}, Exponent::infinity(), 1);
  CHECK_THROWS_AS(allocate(inf), Error);
  CHECK_NOTHROW(allocate_limit_k_inf(inf));
}

TEST_CASE("greedy limit: fill lowest welfare first") {
  const auto inst = make({1, 2, 3}, {2, 2, 2}, Exponent::infinity(), 3);
  const auto res = allocate_limit_k_inf(inst);
  CHECK(res.x[0] == Approx(2.0));
  CHECK(res.x[1] == Approx(1.0));
  CHECK(res.x[2] == 0.0);
  CHECK(res.is_tight(0));
  CHECK_FALSE(res.is_tight(1));
  CHECK(total_virtual_cost(inst, res) == Approx(4.0));

  // Same instance at k = 0 costs more (equal split).
  auto equal = inst;
  equal.k = Exponent::finite(0);
  const auto res0 = allocate(equal);
  CHECK(total_virtual_cost(equal, res0) == Approx(6.0));
}

TEST_CASE("greedy limit: welfare ties split equally") {
  const auto inst = make({1, 1, 3}, {4, 4, 4}, Exponent::infinity(), 3);
  const auto res = allocate_limit_k_inf(inst);
  CHECK(res.x[0] == Approx(1.5));
  CHECK(res.x[1] == Approx(1.5));
  CHECK(res.x[2] == 0.0);

  // A capped member of the tie group hands its excess to its peers.
  const auto capped = make({1, 1, 3}, {1, 4, 4}, Exponent::infinity(), 3);
  const auto res2 = allocate_limit_k_inf(capped);
  CHECK(res2.x[0] == Approx(1.0));
  CHECK(res2.x[1] == Approx(2.0));
  CHECK(res2.x[2] == 0.0);
  CHECK(res2.is_tight(0));
}

TEST_CASE("large finite k converges to the greedy limit") {
  Rng rng(99);
  const BidDistribution& dist = catest::paper_prior();
  for (int trial = 0; trial < 25; ++trial) {
    auto inst = catest::random_instance(rng, dist, 2 + trial % 7, Exponent::finite(1e6));
    const auto big_k = allocate(inst);
    inst.k = Exponent::infinity();
    const auto greedy = allocate_limit_k_inf(inst);
    for (int i = 0; i < inst.size(); ++i)
      CHECK(std::abs(big_k.x[i] - greedy.x[i]) < 1e-4 * std::max(1.0, greedy.x[i]));
  }
}

TEST_CASE("oracle equivalence on random instances") {
  Rng rng(2024);
  const BidDistribution& dist = catest::paper_prior();
  const double k_grid[5] = {0, 1, 2, 4, 8};
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 9;
    const auto inst =
        catest::random_instance(rng, dist, n, Exponent::finite(k_grid[trial % 5]));
    const auto fast = allocate(inst);
    const auto oracle = oracle_allocate(inst);
    CHECK(std::abs(fast.objective - oracle.objective) <=
          1e-8 * std::max(1.0, std::abs(oracle.objective)));
    for (int i = 0; i < n; ++i) CHECK(std::abs(fast.x[i] - oracle.x[i]) < 1e-6);
    check_kkt(inst, fast);
    CHECK(fast.iterations <= n);

    // Tight set is a prefix of the gamma = delta^k * cap ordering.
    const Eigen::ArrayXd gamma = sort_keys(inst);
    double max_tight = -1.0, min_free = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (fast.is_tight(i))
        max_tight = std::max(max_tight, gamma[i]);
      else
        min_free = std::min(min_free, gamma[i]);
    }
    if (max_tight >= 0.0) CHECK(max_tight <= min_free * (1.0 + 1e-12));
  }
}

TEST_CASE("oracle rejects oversized instances") {
  Rng rng(5);
  const auto inst = catest::random_instance(rng, catest::paper_prior(), 17, Exponent::finite(1));
  CHECK_THROWS_AS(oracle_allocate(inst), Error);
}

TEST_CASE("allocation curve is non-increasing and continuous in the own bid") {
  Rng rng(31337);
  const BidDistribution& dist = catest::paper_prior();
  for (int trial = 0; trial < 10; ++trial) {
    const double k_grid[5] = {0, 1, 2, 4, 8};
    const auto inst =
        catest::random_instance(rng, dist, 6, Exponent::finite(k_grid[trial % 5]));
    std::vector<double> grid;
    const double lo = dist.quantile(0.02);
    for (int g = 0; g < 50; ++g) grid.push_back(lo + (dist.upper() - lo) * g / 49.0);
    const auto curve = allocation_curve(inst, dist, 0, grid);

    std::vector<double> step;
    for (std::size_t g = 1; g < curve.size(); ++g) {
      CHECK(curve[g].second <= curve[g - 1].second + 1e-10 * std::max(1.0, curve[0].second));
      step.push_back(std::abs(curve[g].second - curve[g - 1].second));
    }
    for (std::size_t g = 1; g + 1 < step.size(); ++g) {
      const double neighbor = std::max(step[g - 1], step[g + 1]);
      CHECK(step[g] <= 10.0 * neighbor + 1e-9 * std::max(1.0, inst.work_total));
    }
  }
}

TEST_CASE("symmetric two-worker instance splits evenly at the rival's bid") {
  const BidDistribution& dist = catest::paper_prior();
  AuctionInstance inst;
  inst.bids.resize(2);
  inst.caps.resize(2);
  inst.delta.resize(2);
  inst.bids << 1.0, 1.0;
  inst.caps << 1e6, 1e6;
  inst.delta << dist.virtual_welfare(1.0), dist.virtual_welfare(1.0);
  inst.k = Exponent::finite(1);
  inst.work_total = 10.0;
  CHECK(allocation_at_bid(inst, dist, 0, 1.0) == Approx(5.0).epsilon(1e-12));
}

TEST_CASE("share of work crosses over at most once between adjacent k") {
  Rng rng(777);
  const BidDistribution& dist = catest::paper_prior();
  const double k_pairs[4][2] = {{0, 1}, {1, 2}, {2, 4}, {4, 8}};
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = catest::random_instance(rng, dist, 8, Exponent::finite(0));
    const auto& pair = k_pairs[trial % 4];
    inst.k = Exponent::finite(pair[0]);
    const auto lo = allocate(inst);
    inst.k = Exponent::finite(pair[1]);
    const auto hi = allocate(inst);

    std::vector<int> order(inst.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return inst.bids[a] < inst.bids[b]; });
    int sign_changes = 0, prev_sign = 0;
    for (int idx : order) {
      const double diff = (lo.x[idx] - hi.x[idx]) / inst.work_total;
      if (std::abs(diff) <= 1e-12) continue;
      const int sign = diff > 0 ? 1 : -1;
      if (prev_sign != 0 && sign != prev_sign) ++sign_changes;
      prev_sign = sign;
    }
    CHECK(sign_changes <= 1);
  }
}

TEST_CASE("total virtual cost is non-increasing in k per instance") {
  Rng rng(4321);
  const BidDistribution& dist = catest::paper_prior();
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = catest::random_instance(rng, dist, 7, Exponent::finite(0));
    double prev = std::numeric_limits<double>::infinity();
    for (double k : {0.0, 1.0, 2.0, 4.0, 8.0}) {
      inst.k = Exponent::finite(k);
      const double cost = total_virtual_cost(inst, allocate(inst));
      CHECK(cost <= prev * (1.0 + 1e-9));
      prev = cost;
    }
    inst.k = Exponent::infinity();
    const double greedy_cost = total_virtual_cost(inst, allocate_limit_k_inf(inst));
    CHECK(greedy_cost <= prev * (1.0 + 1e-9));
  }
}

TEST_CASE("exponent type") {
  CHECK_THROWS_AS(Exponent::finite(-1), Error);
  CHECK_THROWS_AS(Exponent::finite(std::numeric_limits<double>::infinity()), Error);
  CHECK(Exponent::infinity().is_infinite());
  CHECK_THROWS_AS(Exponent::infinity().value(), Error);
  CHECK(Exponent::finite(2).value() == 2.0);
}
