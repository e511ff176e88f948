/*
 * Copyright 2026 The dpgwas Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Independent test oracles: exhaustive table enumeration, adjacency sweeps,
// quadrature, and a reference first-order convex solver. These deliberately
// avoid the library's own computation paths wherever they are used to check
// one.

#ifndef DPGWAS_TESTS_ORACLES_HPP
#define DPGWAS_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "dpgwas/contingency.hpp"

namespace dpgwas::oracles {

/// All balanced 3x2 tables with positive margins and N/2 per status column.
inline std::vector<ContingencyTable3x2> balanced_tables(std::int64_t n) {
  std::vector<ContingencyTable3x2> out;
  const std::int64_t half = n / 2;
  for (std::int64_t a0 = 0; a0 <= half; ++a0)
    for (std::int64_t a1 = 0; a1 + a0 <= half; ++a1)
      for (std::int64_t b0 = 0; b0 <= half; ++b0)
        for (std::int64_t b1 = 0; b1 + b0 <= half; ++b1) {
          ContingencyTable3x2 t{};
          t.counts[0] = {a0, b0};
          t.counts[1] = {a1, b1};
          t.counts[2] = {half - a0 - a1, half - b0 - b1};
          if (t.positive_margins()) out.push_back(t);
        }
  return out;
}

/// Visits every ordered adjacent pair (t, t'): one individual's genotype
/// changed within one status column, both tables keeping positive margins.
inline void for_each_adjacent_pair(
    std::int64_t n,
    const std::function<void(const ContingencyTable3x2&, const ContingencyTable3x2&)>& visit) {
  for (const auto& t : balanced_tables(n)) {
    for (int j = 0; j < 2; ++j) {
      for (int from = 0; from < 3; ++from) {
        if (t.counts[from][j] == 0) continue;
        for (int to = 0; to < 3; ++to) {
          if (to == from) continue;
          ContingencyTable3x2 u = t;
          --u.counts[from][j];
          ++u.counts[to][j];
          if (u.positive_margins()) visit(t, u);
        }
      }
    }
  }
}

/// Three-term closed form of the balanced chi-square in the (a, b, m, n)
/// parameterization: a, b are the control counts of genotype rows 0 and 1,
/// m, n their row margins.
inline double balanced_chi2_closed_form(const ContingencyTable3x2& t) {
  const double a = static_cast<double>(t.counts[0][0]);
  const double b = static_cast<double>(t.counts[1][0]);
  const double m = static_cast<double>(t.row_margin(0));
  const double n = static_cast<double>(t.row_margin(1));
  const double total = static_cast<double>(t.total());
  return (2.0 * a - m) * (2.0 * a - m) / m + (2.0 * b - n) * (2.0 * b - n) / n +
         (2.0 * a - m + 2.0 * b - n) * (2.0 * a - m + 2.0 * b - n) / (total - m - n);
}

/// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int depth = 24) {
  const auto simpson = [&](double lo, double hi) {
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
  };
  std::function<double(double, double, double, int)> rec = [&](double lo, double hi, double whole,
                                                               int d) {
    const double mid = 0.5 * (lo + hi);
    const double left = simpson(lo, mid);
    const double right = simpson(mid, hi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
  };
  return rec(a, b, simpson(a, b), depth);
}

/// Reference convex minimizer: fixed-step gradient descent with step 1/L,
/// L an upper bound on the gradient Lipschitz constant. Slow but
/// algorithmically independent of the library's Newton path, and free of
/// line-search rounding stalls near the optimum.
inline Eigen::VectorXd gradient_descent(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad, int dim,
    double lipschitz_bound, double tol = 1e-10, int max_iter = 5000000) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  const double step = 1.0 / lipschitz_bound;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd g = grad(x);
    if (g.norm() <= tol) break;
    x -= step * g;
  }
  return x;
}

/// Chi-square upper-tail p-value for goodness-of-fit tests (regularized
/// incomplete gamma by series / continued fraction).
inline double chi2_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  const double a = df / 2.0;
  const double z = x / 2.0;
  auto gamma_p_series = [&](void) {
    double sum = 1.0 / a, term = sum;
    for (int k = 1; k < 1000; ++k) {
      term *= z / (a + k);
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return sum * std::exp(-z + a * std::log(z) - std::lgamma(a));
  };
  auto gamma_q_contfrac = [&](void) {
    double b = z + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int k = 1; k < 1000; ++k) {
      const double an = -k * (k - a);
      b += 2.0;
      d = an * d + b;
      if (std::abs(d) < 1e-300) d = 1e-300;
      c = b + an / c;
      if (std::abs(c) < 1e-300) c = 1e-300;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-z + a * std::log(z) - std::lgamma(a));
  };
  if (z < a + 1.0) return 1.0 - gamma_p_series();
  return gamma_q_contfrac();
}

}  // namespace dpgwas::oracles

#endif  // DPGWAS_TESTS_ORACLES_HPP
