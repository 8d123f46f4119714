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

#include "crowdauction/rng.hpp"

namespace crowdauction {

enum class DistKind { truncated_log_normal, uniform, tabulated };

/// Prior over unit bids. Supplies the density f, distribution F, quantile
/// F^{-1}, inverse-CDF sampling and the virtual-welfare transform
/// delta(b) = b + F(b)/f(b) used by the allocation and payment rules.
///
/// Immutable after construction; safe for concurrent reads. Sampling takes
/// an explicit RNG owned by the caller.
class BidDistribution {
 public:
  /// Log-normal with log-scale location `mu` and spread `sigma`, truncated to
  /// (lower, upper). When `upper` <= 0 it defaults to the 99th percentile of
  /// the untruncated distribution. Truncation renormalization is analytic
  /// (via the untruncated normal CDF), not numeric.
  static BidDistribution truncated_log_normal(double mu, double sigma,
                                              double upper = -1.0,
                                              double lower = 0.0);

  /// Flat density on (lower, upper).
  static BidDistribution uniform(double lower, double upper);

  /// Piecewise-linear CDF through the given (bid, probability) knots.
  /// Density is the per-segment slope. `cdf_values` must start at 0, end at
  /// 1, and be strictly increasing, and `bids` strictly increasing with
  /// bids[0] >= 0. Regularity is NOT implied; call check_regularity before
  /// using a tabulated prior in a mechanism.
  static BidDistribution tabulated(Eigen::ArrayXd bids, Eigen::ArrayXd cdf_values);

  /// Truncated density f(b). Domain: lower < b <= upper (the upper endpoint
  /// is included because payment integrals evaluate there).
  double pdf(double b) const;

  /// Truncated CDF F(b); exactly 0 at `lower` and 1 at `upper`.
  double cdf(double b) const;

  /// Inverse CDF; q must lie in [0, 1].
  double quantile(double q) const;

  /// Virtual welfare delta(b) = b + F(b)/f(b). Near the lower support edge
  /// returns the analytic limit b (F -> 0). Raises errc::singular if the
  /// density vanishes below 1e-12 away from that edge.
  double virtual_welfare(double b) const;

  /// True iff delta is strictly increasing on a uniform grid of `grid_size`
  /// points spanning the support interior.
  bool check_regularity(int grid_size) const;

  /// n i.i.d. inverse-CDF draws; deterministic for a fixed seed.
  Eigen::ArrayXd sample(std::uint64_t seed, int n) const;

  /// One inverse-CDF draw from a caller-owned stream.
  double draw(Rng& rng) const { return quantile(rng.uniform01()); }

  DistKind kind() const { return kind_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

 private:
  BidDistribution() = default;

  DistKind kind_ = DistKind::uniform;
  double lower_ = 0.0;
  double upper_ = 1.0;
  double mu_ = 0.0;     // log-normal parameters (unused otherwise)
  double sigma_ = 1.0;
  double z_lo_ = 0.0;   // untruncated CDF mass at the truncation bounds
  double z_hi_ = 1.0;
  Eigen::ArrayXd tab_b_;  // tabulated knots
  Eigen::ArrayXd tab_F_;
};

namespace detail {
/// Standard normal CDF and its inverse (Acklam's rational approximation
/// polished with one Halley step; ~1e-15 absolute accuracy).
double norm_cdf(double z);
double norm_quantile(double p);
}  // namespace detail

}  // namespace crowdauction
