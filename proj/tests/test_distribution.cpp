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

#include <algorithm>
#include <cmath>
#include <vector>

#include "crowdauction/distribution.hpp"
#include "crowdauction/errors.hpp"
#include "test_support.hpp"

using namespace crowdauction;
using doctest::Approx;

TEST_CASE("uniform prior basics") {
  const BidDistribution u = BidDistribution::uniform(0.0, 1.0);
  CHECK(u.pdf(0.5) == Approx(1.0));
  CHECK(u.quantile(0.25) == Approx(0.25));
  CHECK(u.cdf(0.0) == 0.0);
  CHECK(u.cdf(1.0) == 1.0);
  CHECK(u.virtual_welfare(0.3) == Approx(0.6).epsilon(1e-12));  // delta = 2b
  CHECK(u.check_regularity(100));
  CHECK_THROWS_AS(u.pdf(1.1), Error);
  CHECK_THROWS_AS(u.quantile(-0.1), Error);
  CHECK_THROWS_AS(u.quantile(1.1), Error);
}

TEST_CASE("truncated log-normal matches the quadrature oracle") {
  const BidDistribution& d = catest::paper_prior();

  // Normalization: the analytic truncated density integrates to 1.
  const double mass =
      catest::oracle_simpson([&](double b) { return d.pdf(b); }, 1e-9, 2.01, 20000);
  CHECK(mass == Approx(1.0).epsilon(1e-6));

  // Oracle route for pdf/cdf/delta at the (untruncated) median b = 1:
  // normalize the raw kernel by its numeric mass over (0, bbar).
  const auto kernel = [](double b) { return catest::lognormal_kernel(b, 0.0, 0.3); };
  const double z = catest::oracle_simpson(kernel, 1e-9, 2.01, 20000);
  const double pdf_oracle = kernel(1.0) / z;
  const double cdf_oracle = catest::oracle_simpson(kernel, 1e-9, 1.0, 20000) / z;
  CHECK(d.pdf(1.0) == Approx(pdf_oracle).epsilon(1e-8));
  CHECK(d.cdf(1.0) == Approx(cdf_oracle).epsilon(1e-8));
  CHECK(d.virtual_welfare(1.0) == Approx(1.0 + cdf_oracle / pdf_oracle).epsilon(1e-8));

  // Frozen oracle values (30-digit reference computation).
  CHECK(d.pdf(1.0) == Approx(1.3432122592573875).epsilon(1e-12));
  CHECK(d.cdf(1.0) == Approx(0.5050400741828330).epsilon(1e-12));
  CHECK(d.virtual_welfare(1.0) == Approx(1.3759942411946501).epsilon(1e-12));
  CHECK(d.virtual_welfare(2.01) == Approx(24.449091692096953).epsilon(1e-10));
}

TEST_CASE("percentiles of the simulation prior") {
  const BidDistribution& d = catest::paper_prior();
  const double q[5] = {0.05, 0.25, 0.50, 0.75, 0.95};
  const double expected[5] = {0.61, 0.81, 1.00, 1.22, 1.60};
  const double frozen[5] = {0.60962374634758243, 0.81488479556336433, 0.99625467898438844,
                            1.2157192286482155, 1.5963897270653280};
  for (int i = 0; i < 5; ++i) {
    const double got = d.quantile(q[i]);
    CHECK(std::abs(got - expected[i]) < 0.005);
    CHECK(got == Approx(frozen[i]).epsilon(1e-10));
  }
}

TEST_CASE("default truncation bound is the untruncated 99th percentile") {
  const BidDistribution d = BidDistribution::truncated_log_normal(0.0, 0.3);
  CHECK(d.upper() == Approx(2.0095370300108465).epsilon(1e-12));
}

TEST_CASE("quantile/cdf round-trip") {
  const BidDistribution& d = catest::paper_prior();
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double b = d.quantile(rng.uniform(0.001, 0.999));
    CHECK(std::abs(d.quantile(d.cdf(b)) - b) < 1e-8);
  }
  CHECK(d.check_regularity(1000));
}

TEST_CASE("virtual welfare dominates the bid and uses the edge limit") {
  const BidDistribution& d = catest::paper_prior();
  for (int i = 1; i <= 200; ++i) {
    const double b = 2.01 * i / 201.0;
    CHECK(d.virtual_welfare(b) >= b);
  }
  // Far below the support mass, F underflows and delta falls back to b.
  CHECK(d.virtual_welfare(0.05) == 0.05);
}

TEST_CASE("sampling is deterministic and matches the analytic CDF") {
  const BidDistribution& d = catest::paper_prior();
  const Eigen::ArrayXd a = d.sample(42, 5);
  const Eigen::ArrayXd b = d.sample(42, 5);
  for (int i = 0; i < 5; ++i) CHECK(a[i] == b[i]);

  const int n = 100000;
  Eigen::ArrayXd big = d.sample(1234, n);
  std::vector<double> sorted(big.data(), big.data() + n);
  std::sort(sorted.begin(), sorted.end());

  CHECK(sorted.front() > 0.0);
  CHECK(sorted.back() < 2.01);
  const double median = 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  CHECK(std::abs(median - 1.00) < 0.01);

  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = d.cdf(sorted[i]);
    ks = std::max(ks, std::abs((i + 1.0) / n - F));
    ks = std::max(ks, std::abs(static_cast<double>(i) / n - F));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("tabulated priors: density, inversion, regularity") {
  Eigen::ArrayXd b(3), F(3);
  b << 0.0, 0.5, 1.0;

  SUBCASE("convex CDF gives a non-monotone delta") {
    F << 0.0, 0.2, 1.0;  // density jumps up at 0.5, so delta drops there
    const BidDistribution d = BidDistribution::tabulated(b, F);
    CHECK(d.pdf(0.25) == Approx(0.4));
    CHECK(d.pdf(0.75) == Approx(1.6));
    CHECK(d.quantile(d.cdf(0.3)) == Approx(0.3));
    CHECK(d.virtual_welfare(0.5) == Approx(0.5 + 0.2 / 0.4));
    CHECK(d.virtual_welfare(0.51) < d.virtual_welfare(0.5));
    CHECK_FALSE(d.check_regularity(100));
  }

  SUBCASE("concave CDF stays regular") {
    F << 0.0, 0.8, 1.0;
    const BidDistribution d = BidDistribution::tabulated(b, F);
    CHECK(d.check_regularity(100));
  }
}

TEST_CASE("construction rejects bad parameters") {
  CHECK_THROWS_AS(BidDistribution::uniform(1.0, 0.5), Error);
  CHECK_THROWS_AS(BidDistribution::truncated_log_normal(0.0, -0.3), Error);
  Eigen::ArrayXd b(2), F(2);
  b << 0.0, 1.0;
  F << 0.1, 1.0;
  CHECK_THROWS_AS(BidDistribution::tabulated(b, F), Error);
}
