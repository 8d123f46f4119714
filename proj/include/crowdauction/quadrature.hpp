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

#include <cmath>
#include <utility>

namespace crowdauction {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // accumulated per-interval Richardson estimates
  long evals = 0;
};

/// Adaptive composite Simpson with interval bisection. Refinement is driven
/// by the per-interval Richardson estimate |S_fine - S_coarse| / 15, so kinks
/// in a piecewise-smooth integrand attract subdivisions automatically. At
/// `max_depth` an interval is accepted as-is and its residual estimate is
/// charged to the reported error instead of being hidden.
template <class F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, double tol,
                                  int max_depth = 20) {
  QuadratureResult out;
  if (!(b > a)) return out;

  struct Frame {
    double a, m, b, fa, fm, fb, whole, tol;
    int depth;
  };
  auto simpson = [](double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
  };

  const double m0 = 0.5 * (a + b);
  const double fa0 = f(a), fm0 = f(m0), fb0 = f(b);
  out.evals = 3;

  // Explicit stack; depth is bounded by max_depth.
  Frame stack[64];
  int top = 0;
  stack[top++] = {a, m0, b, fa0, fm0, fb0, simpson(fa0, fm0, fb0, b - a), tol, 0};

  while (top > 0) {
    const Frame fr = stack[--top];
    const double lm = 0.5 * (fr.a + fr.m);
    const double rm = 0.5 * (fr.m + fr.b);
    const double flm = f(lm), frm = f(rm);
    out.evals += 2;
    const double left = simpson(fr.fa, flm, fr.fm, fr.m - fr.a);
    const double right = simpson(fr.fm, frm, fr.fb, fr.b - fr.m);
    const double delta = (left + right) - fr.whole;
    if (std::abs(delta) <= 15.0 * fr.tol || fr.depth >= max_depth) {
      out.value += left + right + delta / 15.0;
      out.error += std::abs(delta) / 15.0;
    } else {
      stack[top++] = {fr.a, lm, fr.m, fr.fa, flm, fr.fm, left, 0.5 * fr.tol, fr.depth + 1};
      stack[top++] = {fr.m, rm, fr.b, fr.fm, frm, fr.fb, right, 0.5 * fr.tol, fr.depth + 1};
    }
  }
  return out;
}

}  // namespace crowdauction
