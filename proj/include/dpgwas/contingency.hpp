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

#ifndef DPGWAS_CONTINGENCY_HPP
#define DPGWAS_CONTINGENCY_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dpgwas {

/// Genotype (0/1/2) x disease-status (control/case) counts for one SNP.
/// Rows are genotypes, column 0 is controls, column 1 is cases.
struct ContingencyTable3x2 {
  std::array<std::array<std::int64_t, 2>, 3> counts{};

  static ContingencyTable3x2 from_rows(std::array<std::int64_t, 2> g0,
                                       std::array<std::int64_t, 2> g1,
                                       std::array<std::int64_t, 2> g2) {
    ContingencyTable3x2 t{{g0, g1, g2}};
    for (const auto& row : t.counts)
      for (std::int64_t v : row)
        if (v < 0) throw std::invalid_argument("contingency table: negative count");
    return t;
  }

  std::int64_t row_margin(int i) const { return counts[i][0] + counts[i][1]; }
  std::int64_t col_margin(int j) const { return counts[0][j] + counts[1][j] + counts[2][j]; }
  std::int64_t total() const { return col_margin(0) + col_margin(1); }

  /// Equal numbers of cases and controls (N/2 each).
  bool balanced() const { return col_margin(0) == col_margin(1); }

  /// All three genotype margins and both status margins positive.
  bool positive_margins() const {
    return row_margin(0) > 0 && row_margin(1) > 0 && row_margin(2) > 0 &&
           col_margin(0) > 0 && col_margin(1) > 0;
  }

  friend bool operator==(const ContingencyTable3x2&, const ContingencyTable3x2&) = default;
};

/// Pearson independence chi-square with expected counts from the table's own
/// margins. Requires positive row and column margins.
inline double chi2_statistic(const ContingencyTable3x2& t) {
  if (!t.positive_margins())
    throw std::domain_error("chi2_statistic: table has a zero margin");
  const double n = static_cast<double>(t.total());
  double stat = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double expected =
          static_cast<double>(t.row_margin(i)) * static_cast<double>(t.col_margin(j)) / n;
      const double d = static_cast<double>(t.counts[i][j]) - expected;
      stat += d * d / expected;
    }
  }
  return stat;
}

/// Pearson chi-square that skips all-empty genotype rows (their expected
/// counts are zero and they carry no association information). Used by
/// simulation pipelines where rare genotypes may be absent from a sample.
inline double chi2_statistic_lenient(const ContingencyTable3x2& t) {
  if (t.col_margin(0) <= 0 || t.col_margin(1) <= 0)
    throw std::domain_error("chi2_statistic_lenient: empty status column");
  const double n = static_cast<double>(t.total());
  double stat = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (t.row_margin(i) == 0) continue;
    for (int j = 0; j < 2; ++j) {
      const double expected =
          static_cast<double>(t.row_margin(i)) * static_cast<double>(t.col_margin(j)) / n;
      const double d = static_cast<double>(t.counts[i][j]) - expected;
      stat += d * d / expected;
    }
  }
  return stat;
}

/// Pearson quadratic form for real-valued (e.g. noise-perturbed) cells
/// against externally supplied positive expected counts.
inline double chi2_from_expected(const std::array<std::array<double, 2>, 3>& observed,
                                 const std::array<std::array<double, 2>, 3>& expected) {
  double stat = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!(expected[i][j] > 0.0))
        throw std::domain_error("chi2_from_expected: nonpositive expected count");
      const double d = observed[i][j] - expected[i][j];
      stat += d * d / expected[i][j];
    }
  }
  return stat;
}

/// Pearson chi-square of a real-valued (e.g. noise-perturbed) 3x2 table,
/// with expected counts from the table's own margins. This is the statistic
/// a consumer of noisy released counts would compute. Margins must stay
/// positive after perturbation.
inline double chi2_from_noisy_counts(const std::array<std::array<double, 2>, 3>& cells) {
  const double rows[3] = {cells[0][0] + cells[0][1], cells[1][0] + cells[1][1],
                          cells[2][0] + cells[2][1]};
  const double cols[2] = {cells[0][0] + cells[1][0] + cells[2][0],
                          cells[0][1] + cells[1][1] + cells[2][1]};
  const double total = cols[0] + cols[1];
  for (double r : rows)
    if (!(r > 0.0)) throw std::domain_error("chi2_from_noisy_counts: nonpositive row margin");
  for (double c : cols)
    if (!(c > 0.0)) throw std::domain_error("chi2_from_noisy_counts: nonpositive column margin");
  double stat = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      const double expected = rows[i] * cols[j] / total;
      const double d = cells[i][j] - expected;
      stat += d * d / expected;
    }
  return stat;
}

/// Upper-tail p-value under the chi-square null with 2 degrees of freedom,
/// p = exp(-x/2).
inline double pvalue_df2(double chi2) {
  if (!(chi2 >= 0.0)) throw std::invalid_argument("pvalue_df2: statistic must be nonnegative");
  return std::exp(-chi2 / 2.0);
}

}  // namespace dpgwas

#endif  // DPGWAS_CONTINGENCY_HPP
