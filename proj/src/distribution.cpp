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

#include "crowdauction/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crowdauction/errors.hpp"

namespace crowdauction {

namespace detail {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005024;

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }

// Acklam's rational approximation to the standard normal quantile.
double norm_quantile_acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}
}  // namespace

double norm_quantile(double p) {
  if (p <= 0.0) return -HUGE_VAL;
  if (p >= 1.0) return HUGE_VAL;
  double z = norm_quantile_acklam(p);
  // One Halley step against the erfc-based CDF.
  const double e = norm_cdf(z) - p;
  const double u = e / norm_pdf(z);
  z -= u / (1.0 + 0.5 * z * u);
  return z;
}

}  // namespace detail

namespace {
constexpr double kDensityFloor = 1e-12;  // below this, delta is singular
constexpr double kCdfFloor = 1e-14;      // below this, delta uses the limit b
}  // namespace

BidDistribution BidDistribution::truncated_log_normal(double mu, double sigma,
                                                      double upper, double lower) {
  if (sigma <= 0.0) raise(errc::domain, "sigma must be positive");
  if (lower < 0.0) raise(errc::domain, "lower bound must be non-negative");
  if (upper <= 0.0) upper = std::exp(mu + sigma * detail::norm_quantile(0.99));
  if (upper <= lower) raise(errc::domain, "upper bound must exceed lower bound");
  BidDistribution d;
  d.kind_ = DistKind::truncated_log_normal;
  d.mu_ = mu;
  d.sigma_ = sigma;
  d.lower_ = lower;
  d.upper_ = upper;
  d.z_lo_ = lower > 0.0 ? detail::norm_cdf((std::log(lower) - mu) / sigma) : 0.0;
  d.z_hi_ = detail::norm_cdf((std::log(upper) - mu) / sigma);
  return d;
}

BidDistribution BidDistribution::uniform(double lower, double upper) {
  if (lower < 0.0) raise(errc::domain, "lower bound must be non-negative");
  if (upper <= lower) raise(errc::domain, "upper bound must exceed lower bound");
  BidDistribution d;
  d.kind_ = DistKind::uniform;
  d.lower_ = lower;
  d.upper_ = upper;
  return d;
}

BidDistribution BidDistribution::tabulated(Eigen::ArrayXd bids, Eigen::ArrayXd cdf_values) {
  const auto n = bids.size();
  if (n < 2 || cdf_values.size() != n) raise(errc::domain, "need >= 2 matching knots");
  if (bids[0] < 0.0) raise(errc::domain, "knot bids must be non-negative");
  if (std::abs(cdf_values[0]) > 0.0 || std::abs(cdf_values[n - 1] - 1.0) > 1e-12)
    raise(errc::domain, "tabulated CDF must run from 0 to 1");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (bids[i] <= bids[i - 1] || cdf_values[i] <= cdf_values[i - 1])
      raise(errc::domain, "tabulated knots must be strictly increasing");
  }
  BidDistribution d;
  d.kind_ = DistKind::tabulated;
  d.lower_ = bids[0];
  d.upper_ = bids[n - 1];
  d.tab_b_ = std::move(bids);
  d.tab_F_ = std::move(cdf_values);
  d.tab_F_[n - 1] = 1.0;
  return d;
}

double BidDistribution::pdf(double b) const {
  if (!(b > lower_ && b <= upper_))
    raise(errc::domain, "bid " + std::to_string(b) + " outside support");
  switch (kind_) {
    case DistKind::uniform:
      return 1.0 / (upper_ - lower_);
    case DistKind::truncated_log_normal: {
      const double z = (std::log(b) - mu_) / sigma_;
      const double untruncated = std::exp(-0.5 * z * z) / (b * sigma_ * 2.5066282746310005024);
      return untruncated / (z_hi_ - z_lo_);
    }
    case DistKind::tabulated: {
      // segment with tab_b_[j] < b <= tab_b_[j+1]
      const double* begin = tab_b_.data();
      const double* end = begin + tab_b_.size();
      const auto j = static_cast<Eigen::Index>(std::lower_bound(begin, end, b) - begin) - 1;
      return (tab_F_[j + 1] - tab_F_[j]) / (tab_b_[j + 1] - tab_b_[j]);
    }
  }
  raise(errc::domain, "unreachable");
}

double BidDistribution::cdf(double b) const {
  if (b <= lower_) return 0.0;
  if (b >= upper_) return 1.0;
  switch (kind_) {
    case DistKind::uniform:
      return (b - lower_) / (upper_ - lower_);
    case DistKind::truncated_log_normal:
      return (detail::norm_cdf((std::log(b) - mu_) / sigma_) - z_lo_) / (z_hi_ - z_lo_);
    case DistKind::tabulated: {
      const double* begin = tab_b_.data();
      const double* end = begin + tab_b_.size();
      const auto j = static_cast<Eigen::Index>(std::lower_bound(begin, end, b) - begin) - 1;
      const double t = (b - tab_b_[j]) / (tab_b_[j + 1] - tab_b_[j]);
      return tab_F_[j] + t * (tab_F_[j + 1] - tab_F_[j]);
    }
  }
  raise(errc::domain, "unreachable");
}

double BidDistribution::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0))
    raise(errc::domain, "quantile argument " + std::to_string(q) + " outside [0,1]");
  if (q == 0.0) return lower_;
  if (q == 1.0) return upper_;
  switch (kind_) {
    case DistKind::uniform:
      return lower_ + q * (upper_ - lower_);
    case DistKind::truncated_log_normal: {
      const double z = detail::norm_quantile(z_lo_ + q * (z_hi_ - z_lo_));
      return std::min(std::exp(mu_ + sigma_ * z), upper_);
    }
    case DistKind::tabulated: {
      const double* begin = tab_F_.data();
      const double* end = begin + tab_F_.size();
      auto j = static_cast<Eigen::Index>(std::lower_bound(begin, end, q) - begin);
      if (j > 0) --j;
      if (j >= tab_F_.size() - 1) j = tab_F_.size() - 2;
      const double t = (q - tab_F_[j]) / (tab_F_[j + 1] - tab_F_[j]);
      return tab_b_[j] + t * (tab_b_[j + 1] - tab_b_[j]);
    }
  }
  raise(errc::domain, "unreachable");
}

double BidDistribution::virtual_welfare(double b) const {
  if (!(b > lower_ && b <= upper_))
    raise(errc::domain, "bid " + std::to_string(b) + " outside support");
  const double F = cdf(b);
  if (F < kCdfFloor) return b;  // analytic limit: F/f -> 0 at the lower edge
  const double f = pdf(b);
  if (f < kDensityFloor) raise(errc::singular, "density vanishes at bid " + std::to_string(b));
  return b + F / f;
}

bool BidDistribution::check_regularity(int grid_size) const {
  if (grid_size < 2) raise(errc::domain, "grid_size must be >= 2");
  // Interior grid: avoid the open lower endpoint.
  const double h = (upper_ - lower_) / (grid_size + 1);
  double prev = virtual_welfare(lower_ + h);
  for (int i = 2; i <= grid_size; ++i) {
    const double cur = virtual_welfare(lower_ + i * h);
    if (!(cur > prev)) return false;
    prev = cur;
  }
  return true;
}

Eigen::ArrayXd BidDistribution::sample(std::uint64_t seed, int n) const {
  if (n < 1) raise(errc::domain, "sample size must be >= 1");
  Rng rng(seed);
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) out[i] = quantile(rng.uniform01());
  return out;
}

}  // namespace crowdauction
