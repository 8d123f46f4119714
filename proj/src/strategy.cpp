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

#include "crowdauction/strategy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "crowdauction/errors.hpp"
#include "crowdauction/parallel.hpp"

namespace crowdauction {

namespace {

// Utility evaluations are dominated by the stage-1 solve (allocation plus
// payment quadrature), which depends on (bid, declared_cap) only; the work
// coordinate just rescales the cached outcome.
class UtilityEvaluator {
 public:
  UtilityEvaluator(const WorkerProfile& profile, const BidderContext& context,
                   const OmegaSpec* omega)
      : profile_(profile), context_(context), omega_(omega) {}

  double operator()(const StrategyPoint& p) {
    if (!cached_ || p.bid != cached_bid_ || p.declared_cap != cached_cap_) {
      outcome_ = evaluate_stage1(context_, p.bid, p.declared_cap);
      max_pay_seen_ = std::max(max_pay_seen_, outcome_.max_pay);
      cached_bid_ = p.bid;
      cached_cap_ = p.declared_cap;
      cached_ = true;
    }
    if (p.work <= 0.0) return 0.0;
    double expected_pay = 0.0;
    if (outcome_.assigned > 0.0) {
      expected_pay = profile_.accept_rate *
                     std::min(p.work / outcome_.assigned, 1.0) * outcome_.max_pay;
    }
    const double net = expected_pay - p.work * profile_.unit_cost;
    if (omega_ == nullptr) return p.work <= profile_.capacity ? net : 0.0;
    return (*omega_)(p.work, profile_.capacity) * net;
  }

  double max_pay_seen() const { return max_pay_seen_; }

 private:
  const WorkerProfile& profile_;
  const BidderContext& context_;
  const OmegaSpec* omega_;
  WorkerOutcome outcome_;
  double max_pay_seen_ = 0.0;
  double cached_bid_ = 0.0, cached_cap_ = 0.0;
  bool cached_ = false;
};

struct Candidate {
  StrategyPoint point;
  double value = -std::numeric_limits<double>::infinity();
};

void consider(Candidate& best, const StrategyPoint& p, double v) {
  if (v > best.value) best = {p, v};
}

double& coord(StrategyPoint& p, int axis) {
  switch (axis) {
    case 0: return p.bid;
    case 1: return p.declared_cap;
    default: return p.work;
  }
}
double coord(const StrategyPoint& p, int axis) {
  switch (axis) {
    case 0: return p.bid;
    case 1: return p.declared_cap;
    default: return p.work;
  }
}

// Golden-section ascent along one axis; tracks the best point actually
// evaluated (endpoints included) rather than trusting unimodality.
void golden_axis(UtilityEvaluator& u, Candidate& best, int axis, double lo,
                 double hi, int iterations) {
  if (!(hi > lo)) return;
  constexpr double kInvPhi = 0.6180339887498949;
  auto eval_at = [&](double t) {
    StrategyPoint p = best.point;
    coord(p, axis) = t;
    const double v = u(p);
    consider(best, p, v);
    return v;
  };
  eval_at(lo);
  eval_at(hi);
  double a = lo, b = hi;
  double c1 = b - kInvPhi * (b - a);
  double c2 = a + kInvPhi * (b - a);
  double f1 = eval_at(c1);
  double f2 = eval_at(c2);
  for (int it = 0; it < iterations; ++it) {
    if (f1 < f2) {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + kInvPhi * (b - a);
      f2 = eval_at(c2);
    } else {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - kInvPhi * (b - a);
      f1 = eval_at(c1);
    }
  }
}

// Nelder-Mead polish clamped to the box.
void simplex_polish(UtilityEvaluator& u, Candidate& best, const SearchBox& box,
                    int budget) {
  std::array<Candidate, 4> simplex;
  simplex[0] = best;
  for (int axis = 0; axis < 3; ++axis) {
    StrategyPoint p = best.point;
    const double width = coord(box.hi, axis) - coord(box.lo, axis);
    if (width <= 0.0) {
      simplex[axis + 1] = {p, u(p)};
      continue;
    }
    double step = 0.02 * width;
    if (coord(p, axis) + step > coord(box.hi, axis)) step = -step;
    coord(p, axis) += step;
    p = box.clamp(p);
    const double v = u(p);
    simplex[axis + 1] = {p, v};
    consider(best, p, v);
  }

  auto centroid_excluding = [&](int worst) {
    StrategyPoint c{0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      if (i == worst) continue;
      c.bid += simplex[i].point.bid / 3.0;
      c.declared_cap += simplex[i].point.declared_cap / 3.0;
      c.work += simplex[i].point.work / 3.0;
    }
    return c;
  };
  auto blend = [&](const StrategyPoint& a, const StrategyPoint& b, double t) {
    StrategyPoint p;
    p.bid = a.bid + t * (b.bid - a.bid);
    p.declared_cap = a.declared_cap + t * (b.declared_cap - a.declared_cap);
    p.work = a.work + t * (b.work - a.work);
    return box.clamp(p);
  };
  auto probe = [&](const StrategyPoint& p) {
    const double v = u(p);
    consider(best, p, v);
    return Candidate{p, v};
  };

  for (int it = 0; it < budget; ++it) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    const StrategyPoint c = centroid_excluding(3);
    const Candidate reflect = probe(blend(simplex[3].point, c, 2.0));
    if (reflect.value > simplex[0].value) {
      const Candidate expand = probe(blend(simplex[3].point, c, 3.0));
      simplex[3] = expand.value > reflect.value ? expand : reflect;
    } else if (reflect.value > simplex[2].value) {
      simplex[3] = reflect;
    } else {
      const Candidate contract = probe(blend(simplex[3].point, c, 0.5));
      if (contract.value > simplex[3].value) {
        simplex[3] = contract;
      } else {
        for (int i = 1; i < 4; ++i)
          simplex[i] = probe(blend(simplex[i].point, simplex[0].point, 0.5));
      }
    }
  }
}

}  // namespace

SearchBox SearchBox::around(const StrategyPoint& nominal, double frac,
                            const BidDistribution& dist) {
  SearchBox box;
  box.lo.bid = std::max((1.0 - frac) * nominal.bid,
                        dist.lower() + 1e-9 * (dist.upper() - dist.lower()));
  box.hi.bid = std::min((1.0 + frac) * nominal.bid, dist.upper());
  box.lo.declared_cap = (1.0 - frac) * nominal.declared_cap;
  box.hi.declared_cap = (1.0 + frac) * nominal.declared_cap;
  box.lo.work = (1.0 - frac) * nominal.work;
  box.hi.work = (1.0 + frac) * nominal.work;
  return box;
}

StrategyPoint SearchBox::clamp(StrategyPoint p) const {
  p.bid = std::clamp(p.bid, lo.bid, hi.bid);
  p.declared_cap = std::clamp(p.declared_cap, lo.declared_cap, hi.declared_cap);
  p.work = std::clamp(p.work, lo.work, hi.work);
  return p;
}

StrategyPoint search_best_response(const WorkerProfile& profile,
                                   const BidderContext& context,
                                   const OmegaSpec* omega, StrategyPoint start,
                                   const SearchBox& box,
                                   const SearchOptions& options) {
  UtilityEvaluator utility(profile, context, omega);
  start = box.clamp(start);
  const double start_value = utility(start);
  Candidate best{start, start_value};

  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    for (int axis = 0; axis < 3; ++axis) {
      golden_axis(utility, best, axis, coord(box.lo, axis), coord(box.hi, axis),
                  options.golden_iterations);
    }
  }
  simplex_polish(utility, best, box, options.polish_iterations);

  // Utilities are quadrature-valued with error up to 1e-6 * max(1, p) per
  // payment evaluation; gains below that floor are ripples on exactly flat
  // regions of the true landscape (e.g. the bid axis while the capacity
  // binds), not improvements.
  const double noise_floor =
      4e-6 * std::max(1.0, profile.accept_rate * utility.max_pay_seen());
  const double required =
      std::max(options.min_gain * std::max(1.0, std::abs(start_value)), noise_floor);
  if (best.value - start_value <= required) return start;
  return best.point;
}

DepartureReport departure_study(const StudyConfig& config, const BidDistribution& dist) {
  if (config.trials < 1) raise(errc::domain, "study needs at least one trial");
  if (config.n_workers < 2) raise(errc::domain, "study needs at least two workers");
  if (!(config.rho > 0.0 && config.rho <= 1.0))
    raise(errc::domain, "rho must lie in (0,1]");

  const int nk = static_cast<int>(config.k_grid.size());
  const int ns = static_cast<int>(config.slopes.size());
  const int per_cell = config.trials;
  const int total = nk * ns * per_cell;

  // rel. difference per coordinate per trial, cell-major then trial.
  std::vector<std::array<double, 3>> rel(total);

  parallel_for(0, total, config.threads, [&](int flat) {
    const int cell = flat / per_cell;
    const int trial = flat % per_cell;
    const int ik = cell / ns;
    const int is = cell % ns;

    Rng rng(derive_seed(config.seed, "departure-trial", ik, is, trial));
    const int n_others = config.n_workers - 1;
    Eigen::ArrayXd other_bids(n_others), other_caps(n_others);
    for (int j = 0; j < n_others; ++j) {
      other_bids[j] = dist.draw(rng);
      other_caps[j] = 100.0 * std::exp(0.3 * detail::norm_quantile(rng.uniform01()));
    }
    // Probe bid conditioned on F(b) < rho so the declared capacity has a
    // realistic chance of being limiting.
    const double b1 = dist.quantile(rng.uniform01() * config.rho);
    const double beta1 = rng.uniform(0.9, 1.0);
    const double cap1 = 100.0 * std::exp(0.3 * detail::norm_quantile(rng.uniform01()));

    BidderContext context;
    context.other_bids = std::move(other_bids);
    context.other_caps = std::move(other_caps);
    context.k = config.k_grid[ik];
    context.work_total = 100.0 * config.n_workers * config.rho;
    context.dist = &dist;

    const WorkerProfile profile{b1 * beta1, cap1, beta1, 0.0};
    const double x1 = solve(context.assemble(b1, cap1)).x[0];
    const StrategyPoint nominal{b1, cap1, x1};
    const SearchBox box = SearchBox::around(nominal, config.box_half_width, dist);
    const OmegaSpec omega{config.slopes[is]};

    const StrategyPoint found =
        search_best_response(profile, context, &omega, nominal, box);

    // The submission answers to the assignment implied by the found bid pair.
    const double assigned_at_found =
        solve(context.assemble(found.bid, found.declared_cap)).x[0];
    const double nom[3] = {nominal.bid, nominal.declared_cap, assigned_at_found};
    const double got[3] = {found.bid, found.declared_cap, found.work};
    for (int a = 0; a < 3; ++a)
      rel[flat][a] = std::abs(got[a] - nom[a]) / std::max(std::abs(nom[a]), 1e-12);
  });

  DepartureReport report;
  report.k_grid = config.k_grid;
  report.slopes = config.slopes;
  report.cells.resize(nk * ns);
  for (int cell = 0; cell < nk * ns; ++cell) {
    DepartureCell& out = report.cells[cell];
    out.trials = per_cell;
    double sum_rel[3] = {0, 0, 0};
    for (int t = 0; t < per_cell; ++t) {
      for (int a = 0; a < 3; ++a) {
        const double r = rel[cell * per_cell + t][a];
        if (r > config.agreement_rel_tol) {
          ++out.departures[a];
          sum_rel[a] += r;
        }
      }
    }
    for (int a = 0; a < 3; ++a) {
      out.agreement[a] = 1.0 - static_cast<double>(out.departures[a]) / per_cell;
      out.mean_rel_diff[a] = out.departures[a] > 0
                                 ? sum_rel[a] / out.departures[a]
                                 : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return report;
}

}  // namespace crowdauction
