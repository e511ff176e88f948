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

#ifndef DPGWAS_SENSITIVITY_HPP
#define DPGWAS_SENSITIVITY_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dpgwas {

struct PrivacyBudget {
  double epsilon;

  explicit PrivacyBudget(double eps) : epsilon(eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("PrivacyBudget: epsilon must be positive");
  }
};

/// Projection threshold p* = exp(-N/c) for the restricted p-value release.
struct ProjectionParam {
  double c;
  double p_star;

  ProjectionParam(double c_in, std::int64_t n) : c(c_in) {
    if (!(c >= 3.0)) throw std::invalid_argument("ProjectionParam: c must be at least 3");
    if (n <= 0) throw std::invalid_argument("ProjectionParam: N must be positive");
    p_star = std::exp(-static_cast<double>(n) / c);
  }
};

namespace detail {
inline void require_even_positive(std::int64_t n, const char* who) {
  if (n <= 0 || n % 2 != 0)
    throw std::invalid_argument(std::string(who) + ": N must be a positive even count");
}
}  // namespace detail

/// L1 sensitivity of the averaged case/control MAF table for M SNPs: 2M/N.
inline double sensitivity_maf(std::int64_t m, std::int64_t n) {
  if (m < 1) throw std::invalid_argument("sensitivity_maf: M must be at least 1");
  detail::require_even_positive(n, "sensitivity_maf");
  return 2.0 * static_cast<double>(m) / static_cast<double>(n);
}

/// L1 sensitivity of releasing M genotype-by-status count tables: 2M.
inline double sensitivity_counts(std::int64_t m) {
  if (m < 1) throw std::invalid_argument("sensitivity_counts: M must be at least 1");
  return 2.0 * static_cast<double>(m);
}

/// Sensitivity of the chi-square statistic on a balanced table with positive
/// margins: 4N/(N+2).
inline double sensitivity_chi2(std::int64_t n) {
  detail::require_even_positive(n, "sensitivity_chi2");
  if (n < 6) throw std::invalid_argument("sensitivity_chi2: N must be at least 6");
  return 4.0 * static_cast<double>(n) / (static_cast<double>(n) + 2.0);
}

/// Sensitivity of the df-2 p-value: exp(-2/3).
inline double sensitivity_pvalue() { return std::exp(-2.0 / 3.0); }

/// Sensitivity of the p-value after projecting values above p* = exp(-N/c)
/// onto p*.
inline double sensitivity_pvalue_projected(std::int64_t n, const ProjectionParam& proj) {
  detail::require_even_positive(n, "sensitivity_pvalue_projected");
  const double nd = static_cast<double>(n);
  const double c = proj.c;
  const double denom = nd * c - 2.0 * nd - c;
  if (!(denom > 0.0))
    throw std::invalid_argument("sensitivity_pvalue_projected: Nc - 2N - c must be positive");
  const double second =
      nd * (2.0 * nd * c - 4.0 * nd - 4.0 * c + c * c) / (2.0 * c * denom);
  return std::exp(-nd / c) - std::exp(-second);
}

}  // namespace dpgwas

#endif  // DPGWAS_SENSITIVITY_HPP
