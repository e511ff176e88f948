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

#ifndef DPGWAS_RNG_HPP
#define DPGWAS_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace dpgwas {

/// Mixes one 64-bit word (splitmix64 finalizer). Used to derive stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// One random stream. All distribution draws are produced from the engine's
/// raw 64-bit output, so sequences are identical across platforms and
/// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw in the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Laplace(0, scale) by inverse CDF from a single uniform variate:
  /// x = -sign(u - 1/2) * scale * ln(1 - 2|u - 1/2|).
  double laplace(double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("laplace: scale must be positive");
    const double u = uniform() - 0.5;
    const double sign = u < 0.0 ? -1.0 : 1.0;
    return -sign * scale * std::log1p(-2.0 * std::abs(u));
  }

  /// Exponential with rate 1.
  double exponential() { return -std::log(uniform()); }

  /// Standard normal (Box-Muller, no caching).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives independent substreams from a root seed, so per-SNP (or per-cell)
/// noise draws are reproducible regardless of evaluation order. Stream (a, b)
/// is an Rng seeded with mix64 applied to the chain root -> a -> b.
class StreamFactory {
 public:
  explicit StreamFactory(std::uint64_t seed) : root_(seed) {}

  std::uint64_t seed() const { return root_; }

  Rng stream(std::uint64_t a, std::uint64_t b = 0) const {
    return Rng(mix64(mix64(root_ ^ mix64(a)) ^ mix64(b)));
  }

 private:
  std::uint64_t root_;
};

/// Binomial(n, p) draw by inversion, scanning outward from the mode.
/// Exact up to floating-point rounding; expected cost O(sqrt(n p (1-p))).
inline std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("sample_binomial: bad arguments");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;

  const bool flipped = p > 0.5;
  const double q = flipped ? 1.0 - p : p;  // q <= 1/2
  const double qc = 1.0 - q;

  const double nd = static_cast<double>(n);
  std::int64_t mode = static_cast<std::int64_t>((nd + 1.0) * q);
  if (mode > n) mode = n;
  const double log_pm = std::lgamma(nd + 1.0) - std::lgamma(static_cast<double>(mode) + 1.0) -
                        std::lgamma(nd - static_cast<double>(mode) + 1.0) +
                        static_cast<double>(mode) * std::log(q) +
                        (nd - static_cast<double>(mode)) * std::log(qc);
  const double pm = std::exp(log_pm);

  const double u = rng.uniform();
  double cum = pm;
  std::int64_t result = mode;
  if (u > cum) {
    std::int64_t lo = mode, hi = mode;
    double plo = pm, phi = pm;
    bool found = false;
    while (lo > 0 || hi < n) {
      if (hi < n) {
        phi *= (nd - static_cast<double>(hi)) * q / ((static_cast<double>(hi) + 1.0) * qc);
        ++hi;
        cum += phi;
        if (u <= cum) { result = hi; found = true; break; }
      }
      if (lo > 0) {
        plo *= static_cast<double>(lo) * qc / ((nd - static_cast<double>(lo) + 1.0) * q);
        --lo;
        cum += plo;
        if (u <= cum) { result = lo; found = true; break; }
      }
    }
    if (!found) result = mode;  // u landed in the ~1e-15 rounding residue
  }
  return flipped ? n - result : result;
}

/// Multinomial draw over three categories as chained binomials.
inline std::array<std::int64_t, 3> sample_multinomial3(Rng& rng, std::int64_t n,
                                                       const std::array<double, 3>& p) {
  const double total = p[0] + p[1] + p[2];
  if (!(total > 0.0)) throw std::invalid_argument("sample_multinomial3: zero probability mass");
  const std::int64_t k0 = sample_binomial(rng, n, p[0] / total);
  const double rest = p[1] + p[2];
  const std::int64_t k1 =
      rest > 0.0 ? sample_binomial(rng, n - k0, p[1] / rest) : (n - k0);
  return {k0, k1, n - k0 - k1};
}

}  // namespace dpgwas

#endif  // DPGWAS_RNG_HPP
