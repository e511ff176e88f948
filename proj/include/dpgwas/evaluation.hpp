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

#ifndef DPGWAS_EVALUATION_HPP
#define DPGWAS_EVALUATION_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dpgwas/contingency.hpp"
#include "dpgwas/release.hpp"
#include "dpgwas/rng.hpp"
#include "dpgwas/simgen.hpp"

namespace dpgwas {

/// Histogram KL divergence estimate D(f || g): equal-width bins over the
/// pooled sample range, one pseudo-count of additive smoothing per bin,
/// natural logarithm.
inline double kl_divergence_empirical(std::span<const double> sample_f,
                                      std::span<const double> sample_g, int bins = 200) {
  if (sample_f.empty() || sample_g.empty())
    throw std::invalid_argument("kl_divergence_empirical: empty sample");
  if (bins < 1) throw std::invalid_argument("kl_divergence_empirical: bins must be positive");
  double lo = sample_f[0], hi = sample_f[0];
  for (double v : sample_f) { lo = std::min(lo, v); hi = std::max(hi, v); }
  for (double v : sample_g) { lo = std::min(lo, v); hi = std::max(hi, v); }
  if (!(hi > lo)) hi = lo + 1.0;  // all values identical
  const double width = (hi - lo) / bins;

  std::vector<double> count_f(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> count_g(static_cast<std::size_t>(bins), 0.0);
  auto bin_of = [&](double v) {
    auto b = static_cast<std::int64_t>((v - lo) / width);
    return static_cast<std::size_t>(std::clamp<std::int64_t>(b, 0, bins - 1));
  };
  for (double v : sample_f) count_f[bin_of(v)] += 1.0;
  for (double v : sample_g) count_g[bin_of(v)] += 1.0;

  const double norm_f = static_cast<double>(sample_f.size()) + bins;
  const double norm_g = static_cast<double>(sample_g.size()) + bins;
  double kl = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double pf = (count_f[static_cast<std::size_t>(b)] + 1.0) / norm_f;
    const double pg = (count_g[static_cast<std::size_t>(b)] + 1.0) / norm_g;
    kl += pf * std::log(pf / pg);
  }
  return kl;
}

struct RocPoint {
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1), tie groups collapsed
  double auc;
};

/// ROC sweep for p-value-like scores: predicted positive when score <= t.
/// Thresholds run over the distinct score values (ties grouped); AUC by the
/// trapezoidal rule.
inline RocCurve roc_curve(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size())
    throw std::invalid_argument("roc_curve: label/score size mismatch");
  std::size_t n_pos = 0;
  for (int l : labels) n_pos += l != 0;
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("roc_curve: both classes must be present");

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  RocCurve out;
  out.points.push_back({0.0, 0.0});
  out.auc = 0.0;
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k)
      (labels[order[k]] != 0 ? tp : fp) += 1;
    const RocPoint prev = out.points.back();
    const RocPoint cur{static_cast<double>(fp) / static_cast<double>(n_neg),
                       static_cast<double>(tp) / static_cast<double>(n_pos)};
    out.auc += (cur.fpr - prev.fpr) * (cur.tpr + prev.tpr) / 2.0;
    out.points.push_back(cur);
    i = j;
  }
  return out;
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return ks;
}

/// Spearman rank correlation with average ranks on ties.
inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman_rho: need two equal-length samples");
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0;
      for (std::size_t k = i; k < j; ++k) r[order[k]] = avg;
      i = j;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += rx[i]; my += ry[i]; }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct RecoverySimConfig {
  std::size_t n_null_snps = 2000;
  FrequencyTable3x2 causal;  // signal table for every planted SNP
  int n_causal = 2;
};

struct RecoveryGrid {
  std::vector<double> epsilons;
  std::vector<std::int64_t> ns;
  // Row-major over (epsilon, N): fraction of runs with at least one / both
  // planted SNPs inside the released top-M set.
  std::vector<double> freq_any;
  std::vector<double> freq_both;

  double any(std::size_t ie, std::size_t in) const { return freq_any[ie * ns.size() + in]; }
  double both(std::size_t ie, std::size_t in) const { return freq_both[ie * ns.size() + in]; }
};

/// Frequency with which the planted SNPs survive the two-stage top-M release,
/// over a (epsilon, N) grid. Every grid cell runs `runs` simulations with
/// cell-and-run derived seeds, so results are reproducible and independent
/// of the worker count.
inline RecoveryGrid recovery_frequency(const RecoverySimConfig& config, std::int64_t m,
                                       const std::vector<double>& epsilons,
                                       const std::vector<std::int64_t>& ns, int runs,
                                       const StreamFactory& rng, int jobs = 1) {
  if (config.n_causal < 1)
    throw std::invalid_argument("recovery_frequency: need at least one planted SNP");
  config.causal.validate();
  RecoveryGrid grid{epsilons, ns, {}, {}};
  grid.freq_any.assign(epsilons.size() * ns.size(), 0.0);
  grid.freq_both.assign(epsilons.size() * ns.size(), 0.0);

  const std::size_t m_total = config.n_null_snps + static_cast<std::size_t>(config.n_causal);
  auto run_cell = [&](std::size_t cell) {
    const std::size_t ie = cell / ns.size();
    const std::size_t in = cell % ns.size();
    const std::int64_t n = ns[in];
    int hits_any = 0, hits_both = 0;
    for (int run = 0; run < runs; ++run) {
      Rng data_rng = rng.stream(8 + cell, static_cast<std::uint64_t>(run));
      std::vector<double> stats(m_total);
      for (std::size_t s = 0; s < config.n_null_snps; ++s) {
        const FrequencyTable3x2 freq = sample_null_frequency(data_rng);
        stats[s] = chi2_statistic_lenient(sample_table(freq, n, data_rng));
      }
      for (int k = 0; k < config.n_causal; ++k)
        stats[config.n_null_snps + static_cast<std::size_t>(k)] =
            chi2_statistic_lenient(sample_table(config.causal, n, data_rng));

      const StreamFactory noise(data_rng.next_u64());
      const auto report =
          release_top_m(stats, m, TopMStatistic::chi2, n, PrivacyBudget(epsilons[ie]), noise);
      int found = 0;
      for (const auto& id : *report.selected_ids) {
        // release_top_m default ids are "snp<index>".
        const std::size_t idx = std::stoul(id.substr(3));
        if (idx >= config.n_null_snps) ++found;
      }
      hits_any += found >= 1;
      hits_both += found >= config.n_causal;
    }
    grid.freq_any[cell] = static_cast<double>(hits_any) / runs;
    grid.freq_both[cell] = static_cast<double>(hits_both) / runs;
  };

  const std::size_t n_cells = epsilons.size() * ns.size();
  if (jobs <= 1) {
    for (std::size_t cell = 0; cell < n_cells; ++cell) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < n_cells; c = next.fetch_add(1)) run_cell(c);
      });
    for (auto& t : pool) t.join();
  }
  return grid;
}

}  // namespace dpgwas

#endif  // DPGWAS_EVALUATION_HPP
