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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "dpgwas/rng.hpp"
#include "oracles.hpp"

using namespace dpgwas;
using Catch::Approx;

TEST_CASE("laplace inverse CDF hits the textbook points") {
  // The draw is a pure function of one uniform; check it through a stub by
  // reproducing the transform on known u values.
  auto inv = [](double u, double scale) {
    const double x = u - 0.5;
    return -(x < 0 ? -1.0 : 1.0) * scale * std::log1p(-2.0 * std::abs(x));
  };
  CHECK(inv(0.5, 1.0) == 0.0);
  CHECK(inv(0.75, 1.0) == Approx(-std::log(0.5)));
  CHECK(inv(0.25, 1.0) == Approx(std::log(0.5)));

  Rng rng(123);
  CHECK_THROWS_AS(rng.laplace(0.0), std::invalid_argument);
}

TEST_CASE("laplace draws are symmetric with the right variance") {
  Rng rng(7);
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.laplace(4.0);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == Approx(2.0 * 16.0).epsilon(0.02));
}

TEST_CASE("streams are reproducible and order-independent") {
  StreamFactory f(99);
  Rng a1 = f.stream(3, 17);
  Rng b = f.stream(4, 17);
  Rng a2 = f.stream(3, 17);
  const double va = a1.uniform();
  const double vb = b.uniform();
  CHECK(va == a2.uniform());
  CHECK(va != vb);
}

TEST_CASE("binomial sampler matches exact pmf") {
  // Goodness of fit against the exact binomial pmf at several (n, p).
  for (auto [n, p] : {std::pair<int, double>{12, 0.3}, {200, 0.02}, {4000, 0.47}}) {
    Rng rng(static_cast<std::uint64_t>(n * 1000) + 5);
    const int draws = 200000;
    std::map<std::int64_t, int> counts;
    double mean = 0.0;
    for (int i = 0; i < draws; ++i) {
      const auto k = sample_binomial(rng, n, p);
      REQUIRE(k >= 0);
      REQUIRE(k <= n);
      ++counts[k];
      mean += static_cast<double>(k);
    }
    mean /= draws;
    CHECK(mean == Approx(n * p).epsilon(0.02));

    // Pearson GOF over bins with expected count >= 5.
    double chi2 = 0.0;
    int df = -1;
    double tail_expected = draws;
    std::int64_t lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(n * p - 8 * std::sqrt(n * p * (1 - p)) - 2));
    std::int64_t hi = std::min<std::int64_t>(n, static_cast<std::int64_t>(n * p + 8 * std::sqrt(n * p * (1 - p)) + 2));
    auto log_pmf = [&](std::int64_t k) {
      return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
             k * std::log(p) + (n - k) * std::log(1 - p);
    };
    int tail_observed = draws;
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double expected = draws * std::exp(log_pmf(k));
      if (expected < 5.0) continue;
      const auto it = counts.find(k);
      const double observed = it == counts.end() ? 0.0 : it->second;
      chi2 += (observed - expected) * (observed - expected) / expected;
      ++df;
      tail_expected -= expected;
      tail_observed -= static_cast<int>(observed);
    }
    if (tail_expected > 5.0) {
      chi2 += (tail_observed - tail_expected) * (tail_observed - tail_expected) / tail_expected;
      ++df;
    }
    REQUIRE(df >= 1);
    const double pval = oracles::chi2_sf(chi2, df);
    INFO("n=" << n << " p=" << p << " chi2=" << chi2 << " df=" << df << " pval=" << pval);
    CHECK(pval > 0.001);
  }

  Rng rng(1);
  CHECK(sample_binomial(rng, 10, 0.0) == 0);
  CHECK(sample_binomial(rng, 10, 1.0) == 10);
  CHECK(sample_binomial(rng, 0, 0.4) == 0);
}

TEST_CASE("multinomial splits preserve totals and degenerate columns") {
  Rng rng(5);
  const auto all0 = sample_multinomial3(rng, 50, {1.0, 0.0, 0.0});
  CHECK(all0 == std::array<std::int64_t, 3>{50, 0, 0});
  for (int rep = 0; rep < 100; ++rep) {
    const auto k = sample_multinomial3(rng, 77, {0.2, 0.5, 0.3});
    CHECK(k[0] + k[1] + k[2] == 77);
    CHECK(k[0] >= 0);
    CHECK(k[1] >= 0);
    CHECK(k[2] >= 0);
  }
}
