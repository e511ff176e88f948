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

#ifndef DPGWAS_PERTURBED_CHI2_HPP
#define DPGWAS_PERTURBED_CHI2_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dpgwas {

/// Law of X = T + Y with T chi-square (2 df) and Y Laplace(0, 4/epsilon):
/// the reference null distribution of a statistic-perturbed chi-square.
///
/// The closed form has a removable singularity at epsilon = 2; a relative
/// band |epsilon - 2| < 1e-6 routes to the analytic limit branch.
///
/// The convolution only depends on the Laplace scale, so the variant with
/// the exact finite-N noise scale 4N/((N+2) epsilon) is the same law with
/// effective rate epsilon (N+2)/N.
class PerturbedChiSquared {
 public:
  explicit PerturbedChiSquared(double epsilon) : eps_(epsilon) {
    if (!(epsilon > 0.0))
      throw std::invalid_argument("PerturbedChiSquared: epsilon must be positive");
  }

  /// Same convolution with the exact sensitivity scale 4N/((N+2) epsilon).
  static PerturbedChiSquared with_exact_scale(double epsilon, std::int64_t n) {
    if (n < 2) throw std::invalid_argument("PerturbedChiSquared: N must be at least 2");
    const double nd = static_cast<double>(n);
    return PerturbedChiSquared(epsilon * (nd + 2.0) / nd);
  }

  double epsilon() const { return eps_; }
  double noise_scale() const { return 4.0 / eps_; }

  double pdf(double x) const {
    const double e = eps_;
    if (x < 0.0) return (e / 4.0) / (e + 2.0) * std::exp(e * x / 4.0);
    if (at_singularity()) return (x + 1.0) * std::exp(-x / 2.0) / 8.0;
    return (e / 4.0) * ((1.0 / (e - 2.0) + 1.0 / (e + 2.0)) * std::exp(-x / 2.0) -
                        (1.0 / (e - 2.0)) * std::exp(-e * x / 4.0));
  }

  double cdf(double x) const {
    const double e = eps_;
    if (x < 0.0) return std::exp(e * x / 4.0) / (e + 2.0);
    if (at_singularity()) return 1.0 - (3.0 + x) * std::exp(-x / 2.0) / 4.0;
    return 1.0 -
           (e / 2.0) * (1.0 / (e - 2.0) + 1.0 / (e + 2.0)) * std::exp(-x / 2.0) +
           (1.0 / (e - 2.0)) * std::exp(-e * x / 4.0);
  }

  /// Inverse CDF by bracketing bisection to absolute tolerance 1e-10.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("PerturbedChiSquared::quantile: p must be in (0,1)");
    double lo = -1.0, hi = 1.0;
    while (cdf(lo) > p) lo *= 2.0;
    while (cdf(hi) < p) hi *= 2.0;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (cdf(mid) < p)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  /// Upper-tail probability 1 - F(x): the p-value of a perturbed statistic
  /// under the null convolution law.
  double upper_tail(double x) const { return 1.0 - cdf(x); }

 private:
  bool at_singularity() const { return std::abs(eps_ - 2.0) < 1e-6 * 2.0; }

  double eps_;
};

inline double perturbed_chi2_pdf(double x, double epsilon) {
  return PerturbedChiSquared(epsilon).pdf(x);
}
inline double perturbed_chi2_cdf(double x, double epsilon) {
  return PerturbedChiSquared(epsilon).cdf(x);
}
inline double perturbed_chi2_quantile(double p, double epsilon) {
  return PerturbedChiSquared(epsilon).quantile(p);
}
inline double pvalue_from_perturbed_stat(double x, double epsilon) {
  return PerturbedChiSquared(epsilon).upper_tail(x);
}

}  // namespace dpgwas

#endif  // DPGWAS_PERTURBED_CHI2_HPP
