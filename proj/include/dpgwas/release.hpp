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

#ifndef DPGWAS_RELEASE_HPP
#define DPGWAS_RELEASE_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpgwas/contingency.hpp"
#include "dpgwas/dataset.hpp"
#include "dpgwas/rng.hpp"
#include "dpgwas/sensitivity.hpp"

namespace dpgwas {

enum class Mechanism {
  maf,
  counts,
  chi2,
  pvalue,
  pvalue_projected,
  top_m_chi2,
  top_m_pvalue,
};

inline const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::maf: return "maf";
    case Mechanism::counts: return "counts";
    case Mechanism::chi2: return "chi2";
    case Mechanism::pvalue: return "pvalue";
    case Mechanism::pvalue_projected: return "pvalue_projected";
    case Mechanism::top_m_chi2: return "top_m_chi2";
    case Mechanism::top_m_pvalue: return "top_m_pvalue";
  }
  return "unknown";
}

struct ReleaseValue {
  std::string id;
  double value;
  friend bool operator==(const ReleaseValue&, const ReleaseValue&) = default;
};

/// Auditable record of one Laplace-mechanism release: which mechanism ran,
/// the budget, the sensitivity and noise scale actually used, the RNG seed,
/// and the released values.
struct ReleaseReport {
  Mechanism mechanism{};
  double epsilon = 0.0;
  double sensitivity = 0.0;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;
  std::vector<ReleaseValue> values;
  std::optional<std::vector<std::string>> selected_ids;   // top-M releases
  std::optional<double> stage1_noise_scale;               // top-M releases
  std::optional<std::vector<ReleaseValue>> raw_values;    // before clamping

  nlohmann::json to_json() const {
    nlohmann::json j{{"mechanism", mechanism_name(mechanism)},
                     {"epsilon", epsilon},
                     {"sensitivity", sensitivity},
                     {"noise_scale", noise_scale},
                     {"seed", seed}};
    auto values_json = [](const std::vector<ReleaseValue>& vs) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& v : vs) arr.push_back({{"id", v.id}, {"value", v.value}});
      return arr;
    };
    j["values"] = values_json(values);
    if (selected_ids) j["selected_ids"] = *selected_ids;
    if (stage1_noise_scale) j["stage1_noise_scale"] = *stage1_noise_scale;
    if (raw_values) j["raw_values"] = values_json(*raw_values);
    return j;
  }
};

/// Noisy averaged MAFs for the cases and the controls of the selected SNPs.
/// Noise scale 2M/(N epsilon) per cell; released values are not clamped.
inline ReleaseReport release_maf(const GwasDataset& data, const std::vector<std::size_t>& snps,
                                 PrivacyBudget budget, const StreamFactory& rng) {
  if (!data.balanced()) throw std::invalid_argument("release_maf: dataset must be balanced");
  if (snps.empty()) throw std::invalid_argument("release_maf: empty SNP subset");
  const auto m = static_cast<std::int64_t>(snps.size());
  const auto n = static_cast<std::int64_t>(data.n_individuals());
  const double sens = sensitivity_maf(m, n);
  const double scale = sens / budget.epsilon;

  const auto maf_cases = maf_vector(data, Group::cases);
  const auto maf_controls = maf_vector(data, Group::controls);

  ReleaseReport report{Mechanism::maf, budget.epsilon, sens, scale, rng.seed(), {}, {}, {}, {}};
  for (std::size_t k = 0; k < snps.size(); ++k) {
    const std::size_t s = snps[k];
    if (s >= data.n_snps()) throw std::out_of_range("release_maf: SNP index out of range");
    Rng stream = rng.stream(1, k);
    const std::string& id = data.snp_ids()[s];
    report.values.push_back({id + ":cases", maf_cases[s] + stream.laplace(scale)});
    report.values.push_back({id + ":controls", maf_controls[s] + stream.laplace(scale)});
  }
  return report;
}

/// Noisy cell counts for M tables; each of the 6M cells gets independent
/// Laplace(0, 2M/epsilon) noise. Values remain real and may be negative.
inline ReleaseReport release_counts(const std::vector<ContingencyTable3x2>& tables,
                                    PrivacyBudget budget, const StreamFactory& rng,
                                    const std::vector<std::string>* ids = nullptr) {
  if (tables.empty()) throw std::invalid_argument("release_counts: empty table list");
  if (ids && ids->size() != tables.size())
    throw std::invalid_argument("release_counts: id list size mismatch");
  const auto m = static_cast<std::int64_t>(tables.size());
  const double sens = sensitivity_counts(m);
  const double scale = sens / budget.epsilon;

  ReleaseReport report{Mechanism::counts, budget.epsilon, sens, scale, rng.seed(), {}, {}, {}, {}};
  static const char* kCol[2] = {"control", "case"};
  for (std::size_t k = 0; k < tables.size(); ++k) {
    Rng stream = rng.stream(2, k);
    const std::string base = ids ? (*ids)[k] : "t" + std::to_string(k);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j)
        report.values.push_back(
            {base + ":g" + std::to_string(i) + ":" + kCol[j],
             static_cast<double>(tables[k].counts[i][j]) + stream.laplace(scale)});
  }
  return report;
}

namespace detail {
inline void require_release_table(const ContingencyTable3x2& t, const char* who) {
  if (!t.balanced()) throw std::invalid_argument(std::string(who) + ": table must be balanced");
  if (!t.positive_margins())
    throw std::invalid_argument(std::string(who) + ": table must have positive margins");
}
}  // namespace detail

/// Noisy chi-square statistic of one balanced table, noise scale
/// 4N/((N+2) epsilon).
inline ReleaseReport release_chi2_single(const ContingencyTable3x2& table, PrivacyBudget budget,
                                         const StreamFactory& rng) {
  detail::require_release_table(table, "release_chi2_single");
  const double sens = sensitivity_chi2(table.total());
  const double scale = sens / budget.epsilon;
  Rng stream = rng.stream(3);
  ReleaseReport report{Mechanism::chi2, budget.epsilon, sens, scale, rng.seed(), {}, {}, {}, {}};
  report.values.push_back({"chi2", chi2_statistic(table) + stream.laplace(scale)});
  return report;
}

/// Noisy df-2 p-value of one balanced table. Without a projection parameter
/// the noise scale is exp(-2/3)/epsilon; with one, the p-value is first
/// projected onto min(p, p*) and the reduced projected sensitivity applies.
/// The released value is clamped to [0,1]; the raw draw is kept in the report.
inline ReleaseReport release_pvalue_single(const ContingencyTable3x2& table, PrivacyBudget budget,
                                           const StreamFactory& rng,
                                           const std::optional<ProjectionParam>& proj = {}) {
  detail::require_release_table(table, "release_pvalue_single");
  double p = pvalue_df2(chi2_statistic(table));
  double sens;
  Mechanism mech;
  if (proj) {
    sens = sensitivity_pvalue_projected(table.total(), *proj);
    p = std::min(p, proj->p_star);
    mech = Mechanism::pvalue_projected;
  } else {
    sens = sensitivity_pvalue();
    mech = Mechanism::pvalue;
  }
  const double scale = sens / budget.epsilon;
  Rng stream = rng.stream(4);
  const double raw = p + stream.laplace(scale);
  ReleaseReport report{mech, budget.epsilon, sens, scale, rng.seed(), {}, {}, {}, {}};
  report.values.push_back({"pvalue", std::clamp(raw, 0.0, 1.0)});
  report.raw_values = std::vector<ReleaseValue>{{"pvalue", raw}};
  return report;
}

enum class TopMStatistic { chi2, pvalue };

/// Two-stage release of the M most relevant SNPs. Stage 1 perturbs every
/// statistic with Laplace(0, (4M/epsilon) S) and selects the top M by
/// perturbed value (largest chi-square, smallest p-value; ties broken by
/// ascending index). Stage 2 adds fresh Laplace(0, (2M/epsilon) S) to the
/// true statistics of the selected SNPs and releases only those. Stage-1
/// perturbed values are never released. S is the single-statistic
/// sensitivity: 4N/(N+2) for chi-square, exp(-2/3) for p-values.
inline ReleaseReport release_top_m(const std::vector<double>& stats, std::int64_t m,
                                   TopMStatistic kind, std::int64_t n, PrivacyBudget budget,
                                   const StreamFactory& rng,
                                   const std::vector<std::string>* ids = nullptr) {
  if (stats.empty()) throw std::invalid_argument("release_top_m: empty statistics vector");
  if (m < 1 || m > static_cast<std::int64_t>(stats.size()))
    throw std::invalid_argument("release_top_m: M must be in [1, M']");
  if (ids && ids->size() != stats.size())
    throw std::invalid_argument("release_top_m: id list size mismatch");

  const double sens = kind == TopMStatistic::chi2 ? sensitivity_chi2(n) : sensitivity_pvalue();
  const double stage1_scale = 4.0 * static_cast<double>(m) / budget.epsilon * sens;
  const double stage2_scale = 2.0 * static_cast<double>(m) / budget.epsilon * sens;

  std::vector<double> perturbed(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    Rng stream = rng.stream(5, i);
    perturbed[i] = stats[i] + stream.laplace(stage1_scale);
  }

  std::vector<std::size_t> order(stats.size());
  std::iota(order.begin(), order.end(), 0);
  const bool larger_is_better = kind == TopMStatistic::chi2;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return larger_is_better ? perturbed[a] > perturbed[b] : perturbed[a] < perturbed[b];
  });
  order.resize(static_cast<std::size_t>(m));
  std::sort(order.begin(), order.end());

  ReleaseReport report{kind == TopMStatistic::chi2 ? Mechanism::top_m_chi2
                                                   : Mechanism::top_m_pvalue,
                       budget.epsilon, sens,          stage2_scale,
                       rng.seed(),     {},            std::vector<std::string>{},
                       stage1_scale,   {}};
  for (std::size_t i : order) {
    Rng stream = rng.stream(6, i);
    const std::string id = ids ? (*ids)[i] : "snp" + std::to_string(i);
    report.selected_ids->push_back(id);
    report.values.push_back({id, stats[i] + stream.laplace(stage2_scale)});
  }
  return report;
}

/// Post-processing clamp of released values into [lo, hi]; the original
/// values move into raw_values. Preserves differential privacy.
inline ReleaseReport clamp_report(ReleaseReport report, double lo, double hi) {
  if (!report.raw_values) report.raw_values = report.values;
  for (auto& v : report.values) v.value = std::clamp(v.value, lo, hi);
  return report;
}

}  // namespace dpgwas

#endif  // DPGWAS_RELEASE_HPP
