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

#ifndef DPGWAS_SIMGEN_HPP
#define DPGWAS_SIMGEN_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpgwas/contingency.hpp"
#include "dpgwas/dataset.hpp"
#include "dpgwas/rng.hpp"

namespace dpgwas {

/// Genotype frequencies per status column; each column sums to one. Sampling
/// a balanced table draws each column as an independent multinomial of size
/// N/2 (product-multinomial model).
struct FrequencyTable3x2 {
  std::array<std::array<double, 2>, 3> probs{};

  void validate() const {
    for (int j = 0; j < 2; ++j) {
      double sum = 0.0;
      for (int i = 0; i < 3; ++i) {
        if (probs[i][j] < 0.0 || probs[i][j] > 1.0)
          throw std::invalid_argument("FrequencyTable3x2: probability outside [0,1]");
        sum += probs[i][j];
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("FrequencyTable3x2: column does not sum to 1");
    }
  }

  std::array<double, 3> column(int j) const { return {probs[0][j], probs[1][j], probs[2][j]}; }
};

/// The four reference frequency tables used throughout the utility studies,
/// ordered strongest to weakest association signal.
inline std::array<FrequencyTable3x2, 4> builtin_frequency_tables() {
  return {FrequencyTable3x2{{{{0.72, 0.20}, {0.18, 0.28}, {0.10, 0.52}}}},
          FrequencyTable3x2{{{{0.60, 0.23}, {0.21, 0.30}, {0.19, 0.47}}}},
          FrequencyTable3x2{{{{0.47, 0.25}, {0.45, 0.51}, {0.08, 0.24}}}},
          FrequencyTable3x2{{{{0.65, 0.46}, {0.29, 0.43}, {0.06, 0.11}}}}};
}

inline FrequencyTable3x2 builtin_frequency_table(char label) {
  const auto all = builtin_frequency_tables();
  switch (label) {
    case 'a': return all[0];
    case 'b': return all[1];
    case 'c': return all[2];
    case 'd': return all[3];
  }
  throw std::invalid_argument("builtin_frequency_table: label must be one of a, b, c, d");
}

/// Chi-square statistic of the expected table (N/2 times each column):
/// the deterministic association strength of a frequency table at size N.
inline double expected_chi2(const FrequencyTable3x2& freq, std::int64_t n) {
  double stat = 0.0;
  const double half = static_cast<double>(n) / 2.0;
  for (int i = 0; i < 3; ++i) {
    const double row_mean = (freq.probs[i][0] + freq.probs[i][1]) / 2.0;
    for (int j = 0; j < 2; ++j) {
      const double d = half * (freq.probs[i][j] - row_mean);
      stat += d * d / (half * row_mean);
    }
  }
  return stat;
}

/// Draws a balanced table: each status column is an independent multinomial
/// of size N/2 over the column's genotype probabilities.
inline ContingencyTable3x2 sample_table(const FrequencyTable3x2& freq, std::int64_t n, Rng& rng) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("sample_table: N must be even");
  const std::int64_t half = n / 2;
  ContingencyTable3x2 t{};
  for (int j = 0; j < 2; ++j) {
    const auto draw = sample_multinomial3(rng, half, freq.column(j));
    for (int i = 0; i < 3; ++i) t.counts[i][j] = draw[i];
  }
  return t;
}

/// Hardy-Weinberg genotype probabilities for a minor-allele frequency.
inline std::array<double, 3> hardy_weinberg(double maf) {
  return {(1.0 - maf) * (1.0 - maf), 2.0 * maf * (1.0 - maf), maf * maf};
}

/// Null SNP column distribution: one shared genotype law for cases and
/// controls, with the MAF drawn uniformly from [0.05, 0.5].
inline FrequencyTable3x2 sample_null_frequency(Rng& rng) {
  const double maf = 0.05 + 0.45 * rng.uniform();
  const auto g = hardy_weinberg(maf);
  return FrequencyTable3x2{{{{g[0], g[0]}, {g[1], g[1]}, {g[2], g[2]}}}};
}

struct SynthGwas {
  GwasDataset data;
  std::vector<std::size_t> causal_indices;
};

/// Individual-level synthetic GWAS: n_null independent null SNPs plus one
/// SNP per causal frequency table, appended after the null block. The first
/// N/2 individuals are controls, the rest cases.
inline SynthGwas synth_gwas(std::size_t n_null, const std::vector<FrequencyTable3x2>& causal,
                            std::int64_t n, const StreamFactory& rng) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("synth_gwas: N must be even");
  for (const auto& f : causal) f.validate();
  const std::size_t n_ind = static_cast<std::size_t>(n);
  const std::size_t n_snps = n_null + causal.size();
  std::vector<std::uint8_t> genotypes(n_ind * n_snps);
  std::vector<std::uint8_t> phenotype(n_ind);
  for (std::size_t i = n_ind / 2; i < n_ind; ++i) phenotype[i] = 1;

  std::vector<std::string> ids;
  ids.reserve(n_snps);
  for (std::size_t s = 0; s < n_snps; ++s) {
    Rng stream = rng.stream(7, s);
    const bool is_causal = s >= n_null;
    const FrequencyTable3x2 freq =
        is_causal ? causal[s - n_null] : sample_null_frequency(stream);
    ids.push_back((is_causal ? "causal" : "snp") + std::to_string(is_causal ? s - n_null : s));
    for (std::size_t i = 0; i < n_ind; ++i) {
      const auto col = freq.column(phenotype[i]);
      const double u = stream.uniform();
      std::uint8_t g = u < col[0] ? 0 : (u < col[0] + col[1] ? 1 : 2);
      genotypes[i * n_snps + s] = g;
    }
  }
  SynthGwas out{GwasDataset(std::move(genotypes), std::move(phenotype), std::move(ids)), {}};
  for (std::size_t k = 0; k < causal.size(); ++k) out.causal_indices.push_back(n_null + k);
  return out;
}

struct LabeledPValues {
  std::vector<double> values;
  std::vector<int> labels;  // 1 = true positive, 0 = true negative
};

/// Mixture for the ROC study: true positives uniform on [0, 0.05], true
/// negatives uniform on [0.05, 1].
inline LabeledPValues sample_pvalue_mixture(std::size_t n_pos, std::size_t n_neg, Rng& rng) {
  LabeledPValues out;
  out.values.reserve(n_pos + n_neg);
  out.labels.reserve(n_pos + n_neg);
  for (std::size_t i = 0; i < n_pos; ++i) {
    out.values.push_back(0.05 * rng.uniform());
    out.labels.push_back(1);
  }
  for (std::size_t i = 0; i < n_neg; ++i) {
    out.values.push_back(0.05 + 0.95 * rng.uniform());
    out.labels.push_back(0);
  }
  return out;
}

}  // namespace dpgwas

#endif  // DPGWAS_SIMGEN_HPP
