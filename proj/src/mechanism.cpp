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

#include "crowdauction/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crowdauction/errors.hpp"
#include "crowdauction/quadrature.hpp"

namespace crowdauction {

namespace {
constexpr int kRegularityGrid = 512;

double gamma_draw(Rng& rng, double shape) {
  // Marsaglia-Tsang; shapes below 1 are boosted and rescaled.
  if (shape < 1.0) {
    const double u = rng.uniform01();
    return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double z = detail::norm_quantile(rng.uniform01());
    const double t = 1.0 + c * z;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform01();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
  }
}
}  // namespace

AuctionInstance BidderContext::assemble(double bid, double declared_cap) const {
  if (dist == nullptr) raise(errc::config, "context has no bid distribution");
  const auto m = other_bids.size();
  AuctionInstance inst;
  inst.bids.resize(m + 1);
  inst.caps.resize(m + 1);
  inst.delta.resize(m + 1);
  inst.bids[0] = bid;
  inst.caps[0] = declared_cap;
  inst.delta[0] = dist->virtual_welfare(bid);
  for (Eigen::Index j = 0; j < m; ++j) {
    inst.bids[j + 1] = other_bids[j];
    inst.caps[j + 1] = other_caps[j];
    inst.delta[j + 1] = dist->virtual_welfare(other_bids[j]);
  }
  inst.k = k;
  inst.work_total = work_total;
  return inst;
}

WorkerOutcome evaluate_stage1(const BidderContext& context, double bid,
                              double declared_cap) {
  const AuctionInstance inst = context.assemble(bid, declared_cap);
  WorkerOutcome out;
  out.assigned = solve(inst).x[0];
  out.max_pay = compute_max_payment(inst, *context.dist, 0);
  return out;
}

Stage1Result run_stage1(Eigen::ArrayXd bids, Eigen::ArrayXd declared_caps,
                        Exponent k, double work_total, const BidDistribution& dist) {
  if (!dist.check_regularity(kRegularityGrid))
    raise(errc::config, "bid prior is irregular: virtual welfare is not increasing");
  Stage1Result out;
  out.instance = AuctionInstance::from_bids(dist, std::move(bids), std::move(declared_caps),
                                            k, work_total);
  out.allocation = solve(out.instance);
  out.payments = payment_schedule(out.instance, dist);
  return out;
}

std::vector<SettlementEntry> run_stage2(const Stage1Result& stage1,
                                        const std::vector<WorkSubmission>& submissions,
                                        const std::vector<WorkerProfile>* profiles) {
  const int n = stage1.instance.size();
  if (static_cast<int>(submissions.size()) != n)
    raise(errc::domain, "one submission per worker required");
  if (profiles && static_cast<int>(profiles->size()) != n)
    raise(errc::domain, "one profile per worker required");

  std::vector<SettlementEntry> records(n);
  for (int i = 0; i < n; ++i) {
    const WorkSubmission& sub = submissions[i];
    if (sub.submitted < 0.0) raise(errc::domain, "submitted work must be non-negative");
    if (sub.accepted_fraction < 0.0 || sub.accepted_fraction > 1.0)
      raise(errc::domain, "accepted fraction must lie in [0,1]");

    SettlementEntry& rec = records[i];
    rec.assigned = stage1.allocation.x[i];
    rec.max_pay = stage1.payments.pay[i];
    rec.submitted = sub.submitted;
    rec.accepted = sub.accepted_fraction * std::min(rec.assigned, sub.submitted);
    rec.pay = realized_payment(rec.max_pay, rec.assigned, rec.accepted);

    if (profiles) {
      const WorkerProfile& prof = (*profiles)[i];
      double expected_pay = 0.0;
      if (rec.assigned > 0.0 && sub.submitted > 0.0) {
        expected_pay = prof.accept_rate *
                       std::min(sub.submitted / rec.assigned, 1.0) * rec.max_pay;
      }
      const double net = expected_pay - sub.submitted * prof.unit_cost;
      rec.utility = (sub.submitted <= prof.capacity) ? net : 0.0;
    }
  }
  return records;
}

double worker_utility(const WorkerProfile& profile, double bid, double declared_cap,
                      double x_hat, const BidderContext& context,
                      const OmegaSpec* omega) {
  if (x_hat < 0.0) raise(errc::domain, "submitted work must be non-negative");
  if (x_hat == 0.0) return 0.0;

  const WorkerOutcome outcome = evaluate_stage1(context, bid, declared_cap);
  double expected_pay = 0.0;
  if (outcome.assigned > 0.0) {
    expected_pay = profile.accept_rate *
                   std::min(x_hat / outcome.assigned, 1.0) * outcome.max_pay;
  }
  const double net = expected_pay - x_hat * profile.unit_cost;
  if (omega == nullptr)
    return (x_hat <= profile.capacity) ? net : 0.0;
  return (*omega)(x_hat, profile.capacity) * net;
}

double truthful_utility_closed_form(const WorkerProfile& profile,
                                    const BidderContext& context) {
  const double b_star = profile.truthful_bid();
  const BidDistribution& dist = *context.dist;
  const double bbar = dist.upper();
  if (b_star >= bbar) return 0.0;

  AuctionInstance probe = context.assemble(b_star, profile.capacity);
  double rent;
  if (context.k.is_infinite()) {
    // The curve is constant between consecutive other-worker bids; sum the
    // segments exactly.
    std::vector<double> cuts{b_star, bbar};
    for (Eigen::Index j = 0; j < context.other_bids.size(); ++j) {
      const double b = context.other_bids[j];
      if (b > b_star && b < bbar) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    rent = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double mid = 0.5 * (cuts[s] + cuts[s + 1]);
      probe.bids[0] = mid;
      probe.delta[0] = dist.virtual_welfare(mid);
      rent += solve(probe).x[0] * (cuts[s + 1] - cuts[s]);
    }
  } else {
    auto curve = [&](double s) {
      probe.bids[0] = s;
      probe.delta[0] = dist.virtual_welfare(s);
      return solve(probe).x[0];
    };
    rent = adaptive_simpson(curve, b_star, bbar, 1e-9 * std::max(1.0, context.work_total)).value;
  }
  return profile.accept_rate * rent;
}

double sample_accept_fraction(Rng& rng, double mean_accept, const AlphaModel& model) {
  if (mean_accept <= 0.0 || mean_accept > 1.0)
    raise(errc::domain, "mean accept fraction must lie in (0,1]");
  if (model.kind == AlphaModel::Kind::deterministic || mean_accept == 1.0)
    return mean_accept;
  const double a = model.concentration * mean_accept;
  const double b = model.concentration * (1.0 - mean_accept);
  const double ga = gamma_draw(rng, a);
  const double gb = gamma_draw(rng, b);
  return ga / (ga + gb);
}

}  // namespace crowdauction
