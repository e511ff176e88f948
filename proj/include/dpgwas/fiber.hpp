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

#ifndef DPGWAS_FIBER_HPP
#define DPGWAS_FIBER_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dpgwas/contingency.hpp"
#include "dpgwas/rng.hpp"

namespace dpgwas {

struct Margins {
  std::array<std::int64_t, 3> rows;
  std::array<std::int64_t, 2> cols;

  static Margins of(const ContingencyTable3x2& t) {
    return Margins{{t.row_margin(0), t.row_margin(1), t.row_margin(2)},
                   {t.col_margin(0), t.col_margin(1)}};
  }

  std::int64_t total() const { return cols[0] + cols[1]; }
  friend bool operator==(const Margins&, const Margins&) = default;
};

/// Markov basis move for 3x2 tables with both margins fixed: for a row pair
/// (a, b), sign +1 adds the pattern [+1 -1; -1 +1] to rows a and b.
struct MarkovMove {
  int row_a;
  int row_b;
  int sign;
};

/// The three basis moves and their negations.
inline const std::array<MarkovMove, 6>& markov_basis_3x2() {
  static const std::array<MarkovMove, 6> moves{{{0, 1, +1},
                                                {0, 1, -1},
                                                {0, 2, +1},
                                                {0, 2, -1},
                                                {1, 2, +1},
                                                {1, 2, -1}}};
  return moves;
}

/// Applies a move; returns nothing if any cell would go negative. Margins
/// are preserved exactly by construction.
inline std::optional<ContingencyTable3x2> apply_move(const ContingencyTable3x2& t,
                                                     const MarkovMove& m) {
  ContingencyTable3x2 out = t;
  const int s = m.sign;
  out.counts[m.row_a][0] += s;
  out.counts[m.row_a][1] -= s;
  out.counts[m.row_b][0] -= s;
  out.counts[m.row_b][1] += s;
  for (const auto& row : out.counts)
    for (std::int64_t v : row)
      if (v < 0) return std::nullopt;
  return out;
}

/// All nonnegative 3x2 tables with the given margins, by nested loops over
/// the two free cells. Guarded to small totals; it exists as an exhaustive
/// oracle for the random walk.
inline std::vector<ContingencyTable3x2> enumerate_fiber(const Margins& m) {
  if (m.rows[0] + m.rows[1] + m.rows[2] != m.total())
    throw std::invalid_argument("enumerate_fiber: margins are inconsistent");
  if (m.total() > 60) throw std::invalid_argument("enumerate_fiber: total above the N<=60 guard");
  std::vector<ContingencyTable3x2> out;
  for (std::int64_t a = 0; a <= std::min(m.rows[0], m.cols[0]); ++a) {
    for (std::int64_t b = 0; b <= std::min(m.rows[1], m.cols[0] - a); ++b) {
      const std::int64_t c = m.cols[0] - a - b;
      if (c < 0 || c > m.rows[2]) continue;
      ContingencyTable3x2 t{};
      t.counts[0] = {a, m.rows[0] - a};
      t.counts[1] = {b, m.rows[1] - b};
      t.counts[2] = {c, m.rows[2] - c};
      out.push_back(t);
    }
  }
  return out;
}

enum class FiberTarget { uniform, hypergeometric };
enum class PerturbMode { none, statistic, cells };

struct FiberWalkConfig {
  std::int64_t steps = 100000;   // total chain steps
  std::int64_t burn_in = 10000;  // discarded prefix
  std::int64_t thin = 1;         // keep every thin-th state after burn-in
  FiberTarget target = FiberTarget::hypergeometric;

  void validate() const {
    if (burn_in < 0 || steps <= burn_in)
      throw std::invalid_argument("FiberWalkConfig: need steps > burn_in >= 0");
    if (thin < 1) throw std::invalid_argument("FiberWalkConfig: thin must be at least 1");
  }
};

/// Metropolis chain over the fiber of tables sharing the start table's
/// margins. Proposals are uniform over the six signed basis moves; the
/// uniform target accepts any feasible proposal, the hypergeometric target
/// accepts with the conditional-law weight ratio (infeasible proposals are
/// rejected in place, keeping the proposal symmetric).
class FiberWalk {
 public:
  FiberWalk(const ContingencyTable3x2& start, FiberTarget target, Rng rng)
      : state_(start), target_(target), rng_(rng) {}

  const ContingencyTable3x2& state() const { return state_; }

  void step() {
    const auto& moves = markov_basis_3x2();
    const MarkovMove& m = moves[static_cast<std::size_t>(rng_.next_u64() % 6)];
    auto& c = state_.counts;
    const int s = m.sign;
    // Cells that a positive-sign move decrements: (row_a, 1) and (row_b, 0).
    const std::int64_t dec_a = s > 0 ? c[m.row_a][1] : c[m.row_a][0];
    const std::int64_t dec_b = s > 0 ? c[m.row_b][0] : c[m.row_b][1];
    if (dec_a == 0 || dec_b == 0) return;
    if (target_ == FiberTarget::hypergeometric) {
      const std::int64_t inc_a = s > 0 ? c[m.row_a][0] : c[m.row_a][1];
      const std::int64_t inc_b = s > 0 ? c[m.row_b][1] : c[m.row_b][0];
      const double ratio = static_cast<double>(dec_a) * static_cast<double>(dec_b) /
                           (static_cast<double>(inc_a + 1) * static_cast<double>(inc_b + 1));
      if (ratio < 1.0 && rng_.uniform() >= ratio) return;
    }
    c[m.row_a][0] += s;
    c[m.row_a][1] -= s;
    c[m.row_b][0] -= s;
    c[m.row_b][1] += s;
  }

 private:
  ContingencyTable3x2 state_;
  FiberTarget target_;
  Rng rng_;
};

/// Conditional hypergeometric weight ratio w(t')/w(t) for t' = t + move,
/// with w(t) proportional to 1 / prod(cells!). Used by detailed-balance
/// checks.
inline double hypergeometric_weight_ratio(const ContingencyTable3x2& t, const MarkovMove& m) {
  const auto& c = t.counts;
  const int s = m.sign;
  const std::int64_t dec_a = s > 0 ? c[m.row_a][1] : c[m.row_a][0];
  const std::int64_t dec_b = s > 0 ? c[m.row_b][0] : c[m.row_b][1];
  const std::int64_t inc_a = s > 0 ? c[m.row_a][0] : c[m.row_a][1];
  const std::int64_t inc_b = s > 0 ? c[m.row_b][1] : c[m.row_b][0];
  return static_cast<double>(dec_a) * static_cast<double>(dec_b) /
         (static_cast<double>(inc_a + 1) * static_cast<double>(inc_b + 1));
}

/// Runs the walk and invokes the visitor on every retained state.
template <class Visitor>
void fiber_walk(const ContingencyTable3x2& start, const FiberWalkConfig& config, Rng rng,
                Visitor&& visit) {
  config.validate();
  FiberWalk walk(start, config.target, rng);
  std::int64_t since_keep = 0;
  for (std::int64_t i = 0; i < config.steps; ++i) {
    walk.step();
    if (i < config.burn_in) continue;
    if (++since_keep == config.thin) {
      since_keep = 0;
      visit(walk.state());
    }
  }
}

/// Sample of (optionally perturbed) chi-square statistics along the chain.
/// statistic mode adds Laplace(0, 4/epsilon) to the exact statistic; cells
/// mode adds i.i.d. Laplace(0, 2/epsilon) to every cell and evaluates the
/// Pearson quadratic form against the fiber's fixed-margin expected counts.
inline std::vector<double> empirical_perturbed_distribution(const ContingencyTable3x2& start,
                                                            const FiberWalkConfig& config,
                                                            PerturbMode mode, double epsilon,
                                                            Rng rng) {
  if (mode != PerturbMode::none && !(epsilon > 0.0))
    throw std::invalid_argument("empirical_perturbed_distribution: epsilon must be positive");
  const Margins margins = Margins::of(start);
  std::array<std::array<double, 2>, 3> expected{};
  const double n = static_cast<double>(margins.total());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      expected[i][j] = static_cast<double>(margins.rows[i]) *
                       static_cast<double>(margins.cols[j]) / n;

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>((config.steps - config.burn_in) / config.thin) + 1);
  // One stream drives the chain, a derived independent one the noise.
  Rng noise(rng.next_u64());
  fiber_walk(start, config, rng, [&](const ContingencyTable3x2& t) {
    switch (mode) {
      case PerturbMode::none:
        out.push_back(chi2_statistic(t));
        break;
      case PerturbMode::statistic:
        out.push_back(chi2_statistic(t) + noise.laplace(4.0 / epsilon));
        break;
      case PerturbMode::cells: {
        std::array<std::array<double, 2>, 3> noisy;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 2; ++j)
            noisy[i][j] = static_cast<double>(t.counts[i][j]) + noise.laplace(2.0 / epsilon);
        out.push_back(chi2_from_expected(noisy, expected));
        break;
      }
    }
  });
  return out;
}

}  // namespace dpgwas

#endif  // DPGWAS_FIBER_HPP
