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
#include <set>

#include "dpgwas/epistasis.hpp"
#include "dpgwas/simgen.hpp"
#include "oracles.hpp"

using namespace dpgwas;
using Catch::Approx;

namespace {

// Random small design with labels in {-1, +1}.
LabeledDesign random_design(int n, const FeatureEncoding& encoding, std::uint64_t seed) {
  Rng rng(seed);
  LabeledDesign design;
  design.x.resize(n, encoding.dimension());
  design.y.resize(n);
  std::vector<std::uint8_t> genotypes(16);
  for (int i = 0; i < n; ++i) {
    for (auto& g : genotypes) g = static_cast<std::uint8_t>(rng.next_u64() % 3);
    design.x.row(i) = encoding.encode(genotypes).transpose();
    design.y(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  return design;
}

GwasDataset xor_interaction_dataset(std::size_t n, double strength, std::uint64_t seed,
                                    std::size_t n_snps = 4) {
  Rng rng(seed);
  std::vector<std::uint8_t> genotypes(n * n_snps);
  std::vector<std::uint8_t> phenotype(n);
  std::vector<std::string> ids;
  for (std::size_t s = 0; s < n_snps; ++s) ids.push_back("g" + std::to_string(s));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < n_snps; ++s) {
      const double u = rng.uniform();
      genotypes[i * n_snps + s] = u < 0.25 ? 0 : (u < 0.75 ? 1 : 2);
    }
    // Pure interaction between the first two SNPs: no marginal effects.
    const bool match = genotypes[i * n_snps] == genotypes[i * n_snps + 1];
    const double logit = strength * (match ? 1.0 : -1.0);
    phenotype[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-logit)) ? 1 : 0;
  }
  return GwasDataset(std::move(genotypes), std::move(phenotype), std::move(ids));
}

}  // namespace

TEST_CASE("one-hot encoding matches the worked example") {
  FeatureEncoding enc{{ModelTerm::main(0), ModelTerm::main(1), ModelTerm::pair(0, 1)}};
  CHECK(enc.dimension() == 16);
  CHECK(enc.effect_count_k() == 4);

  const std::vector<std::uint8_t> genotypes{1, 2};
  const Eigen::VectorXd x = enc.encode(genotypes);
  Eigen::VectorXd expected(16);
  expected << 1, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0;
  CHECK(x == expected);

  const std::vector<std::uint8_t> zeros{0, 0};
  const Eigen::VectorXd x0 = enc.encode(zeros);
  CHECK(x0(0) == 1.0);
  CHECK(x0(1) == 1.0);
  CHECK(x0(4) == 1.0);
  CHECK(x0(7) == 1.0);
  CHECK(x0.sum() == 4.0);

  // Squared norm equals K for every genotype combination, and the encoding
  // is injective.
  std::set<std::vector<double>> seen;
  for (std::uint8_t a = 0; a < 3; ++a)
    for (std::uint8_t b = 0; b < 3; ++b) {
      const std::vector<std::uint8_t> g{a, b};
      const Eigen::VectorXd v = enc.encode(g);
      CHECK(v.squaredNorm() == Approx(static_cast<double>(enc.effect_count_k())));
      seen.insert(std::vector<double>(v.data(), v.data() + v.size()));
    }
  CHECK(seen.size() == 9);

  const std::vector<std::uint8_t> bad{3, 0};
  CHECK_THROWS_AS(enc.encode(bad), std::invalid_argument);
}

TEST_CASE("objective value, gradient, and Hessian") {
  FeatureEncoding enc{{ModelTerm::main(0), ModelTerm::main(1), ModelTerm::pair(0, 1)}};
  const auto design = random_design(40, enc, 101);
  const double lambda = 0.3;

  // beta = 0: every term contributes log 2.
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(enc.dimension());
  CHECK(logistic_objective(zero, design, lambda) == Approx(40.0 * std::log(2.0)));

  // Saturation: a single observation with a huge correct margin leaves only
  // the ridge term.
  LabeledDesign one;
  one.x.resize(1, 3);
  one.x << 1.0, 1.0, 0.0;
  one.y.resize(1);
  one.y << 1.0;
  Eigen::VectorXd big(3);
  big << 40.0, 40.0, 0.0;
  CHECK(logistic_objective(big, one, lambda) ==
        Approx(0.5 * lambda * big.tail(2).squaredNorm()).epsilon(1e-9));

  // Finite-difference agreement at random beta.
  Rng rng(55);
  Eigen::VectorXd beta(enc.dimension());
  for (int i = 0; i < beta.size(); ++i) beta(i) = rng.normal() * 0.5;
  Eigen::VectorXd b(enc.dimension());
  for (int i = 0; i < b.size(); ++i) b(i) = rng.normal();
  const double delta = 0.17;

  const Eigen::VectorXd grad = perturbed_gradient(beta, design, lambda, b, delta);
  const Eigen::MatrixXd hess = perturbed_hessian(beta, design, lambda, delta);
  const double h = 1e-5;
  for (int k = 0; k < beta.size(); ++k) {
    Eigen::VectorXd up = beta, down = beta;
    up(k) += h;
    down(k) -= h;
    const double fd = (perturbed_objective(up, design, lambda, b, delta) -
                       perturbed_objective(down, design, lambda, b, delta)) /
                      (2.0 * h);
    CHECK(grad(k) == Approx(fd).epsilon(1e-6).margin(1e-8));
    const Eigen::VectorXd gd = (perturbed_gradient(up, design, lambda, b, delta) -
                                perturbed_gradient(down, design, lambda, b, delta)) /
                               (2.0 * h);
    for (int l = 0; l < beta.size(); ++l)
      CHECK(hess(k, l) == Approx(gd(l)).epsilon(1e-6).margin(1e-7));
  }

  // Perturbation linearity.
  const double base = perturbed_objective(beta, design, lambda, Eigen::VectorXd::Zero(b.size()));
  CHECK(base == Approx(logistic_objective(beta, design, lambda)));
  const Eigen::VectorXd b2 = 2.0 * b;
  CHECK(perturbed_objective(beta, design, lambda, b2) -
            perturbed_objective(beta, design, lambda, b) ==
        Approx(b.dot(beta) / design.n()).epsilon(1e-9));
}

TEST_CASE("privacy accounting branches") {
  // Large N: the log term vanishes.
  const auto big = algorithm2_params(1.0, 0.1, 0.25, 4, 100000000);
  CHECK(big.eps_prime == Approx(1.0).epsilon(1e-4));
  CHECK(big.delta == 0.0);

  // Direct substitution: eps=1, lambda=0.1, c=0.25, K=4, N=1000.
  const auto mid = algorithm2_params(1.0, 0.1, 0.25, 4, 1000);
  const double t = 0.25 * 4.0 / (1000.0 * 0.1);
  CHECK(mid.eps_prime == Approx(1.0 - std::log(1.0 + 2.0 * t + t * t)));
  CHECK(mid.delta == 0.0);

  // Small N forces the delta branch and eps' = eps/(2K).
  const auto forced = algorithm2_params(1.0, 1e-4, 0.25, 4, 10);
  CHECK(forced.delta > 0.0);
  CHECK(forced.eps_prime == Approx(1.0 / 8.0));
  CHECK(forced.delta == Approx(0.25 * 4.0 / (10.0 * (std::exp(0.25) - 1.0)) - 1e-4));

  // Branch boundary: delta > 0 exactly when the first formula is nonpositive.
  for (double lambda : {1e-5, 1e-3, 0.1, 1.0}) {
    const auto p = algorithm2_params(0.5, lambda, 0.25, 6, 50);
    const double tt = 0.25 * 6.0 / (50.0 * lambda);
    const double first = 0.5 - std::log(1.0 + 2.0 * tt + tt * tt);
    CHECK((p.delta > 0.0) == (first <= 0.0));
  }
}

TEST_CASE("perturbation vector has the advertised norm and direction law") {
  Rng rng(7);
  const int dim = 10;
  const double eps = 0.8;
  double norm_sum = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    const Eigen::VectorXd b = sample_perturbation(dim, eps, rng);
    norm_sum += b.norm();
    mean += b;
  }
  CHECK(norm_sum / reps == Approx(dim * 2.0 / eps).epsilon(0.02));
  CHECK(mean.norm() / reps < 0.3);

  // dim = 1 specializes to Laplace(0, 2/eps): check the variance identity.
  double sum2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double v = sample_perturbation(1, eps, rng)(0);
    sum2 += v * v;
  }
  CHECK(sum2 / reps == Approx(2.0 * (2.0 / eps) * (2.0 / eps)).epsilon(0.03));
}

TEST_CASE("noiseless private fit matches an independent first-order solver") {
  FeatureEncoding enc{{ModelTerm::main(0), ModelTerm::main(1)}};
  const auto design = random_design(50, enc, 303);
  const double lambda = 0.2;

  EpistasisConfig config;
  config.epsilon = 1e14;  // drives both b and the log term to zero
  config.lambda = lambda;
  config.tolerance = 1e-11;
  const auto fit = fit_private_logistic(design, enc, config, StreamFactory(1));
  REQUIRE(fit.converged);
  CHECK(fit.delta == 0.0);

  // Loss curvature is at most 1/4 per sample; trace of X diag X' bounds the
  // spectral norm, giving a safe Lipschitz constant for the oracle's step.
  const double lipschitz = 0.25 * design.x.squaredNorm() + lambda;
  const auto oracle = oracles::gradient_descent(
      [&](const Eigen::VectorXd& beta) {
        return perturbed_gradient(beta, design, lambda, Eigen::VectorXd::Zero(beta.size()));
      },
      enc.dimension(), lipschitz, 1e-10);
  CHECK((fit.beta - oracle).lpNorm<Eigen::Infinity>() < 1e-6);

  // Minimizer improves on beta = 0.
  CHECK(fit.objective <= logistic_objective(Eigen::VectorXd::Zero(enc.dimension()), design, lambda));
}

TEST_CASE("private fit recovers a planted interaction at eps = 2") {
  int successes = 0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto data = xor_interaction_dataset(2000, 1.2, 9000 + static_cast<std::uint64_t>(seed));
    FeatureEncoding enc{{ModelTerm::main(0), ModelTerm::main(1), ModelTerm::main(2),
                         ModelTerm::main(3), ModelTerm::pair(0, 1), ModelTerm::pair(2, 3)}};
    const auto design = build_design(data, enc);
    EpistasisConfig config;
    config.epsilon = 2.0;
    config.lambda = 0.1;
    const auto fit = fit_private_logistic(design, enc, config, StreamFactory(500 + seed));
    const int off = 1 + 4 * 3;
    const double planted = fit.beta.segment(off, 9).lpNorm<Eigen::Infinity>();
    const double null_block = fit.beta.segment(off + 9, 9).lpNorm<Eigen::Infinity>();
    successes += planted > null_block;
  }
  CHECK(successes >= 60);
}

TEST_CASE("literal norm penalty mode still solves the delta branch") {
  FeatureEncoding enc{{ModelTerm::main(0)}};
  const auto design = random_design(30, enc, 404);
  EpistasisConfig config;
  config.epsilon = 0.05;  // small budget forces delta > 0
  config.lambda = 1e-4;
  config.literal_norm_penalty = true;
  const auto fit = fit_private_logistic(design, enc, config, StreamFactory(2));
  CHECK(fit.delta > 0.0);
  CHECK(std::isfinite(fit.beta.norm()));
  const auto smooth_config = [&] {
    auto c = config;
    c.literal_norm_penalty = false;
    return c;
  }();
  const auto smooth = fit_private_logistic(design, enc, smooth_config, StreamFactory(2));
  // Same noise draw, different penalty reading: both finite, same ballpark.
  CHECK(std::isfinite(smooth.beta.norm()));
}

TEST_CASE("stepwise selection on null and planted signals") {
  // Single candidate SNP with pure-noise phenotype: BIC keeps the intercept.
  int intercept_only = 0;
  for (int seed = 0; seed < 15; ++seed) {
    Rng rng(7000 + static_cast<std::uint64_t>(seed));
    std::vector<std::uint8_t> genotypes(400), phenotype(400);
    for (int i = 0; i < 400; ++i) {
      genotypes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng.next_u64() % 3);
      phenotype[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng.next_u64() % 2);
    }
    GwasDataset data(genotypes, phenotype, {"s0"});
    EpistasisConfig config;
    config.epsilon = 2.0;
    config.lambda = 0.1;
    config.criterion = SelectionCriterion::bic;
    const auto result = stepwise_select(data, {0}, config, StreamFactory(40 + seed));
    intercept_only += result.terms.empty();
  }
  CHECK(intercept_only > 7);

  // Planted additive pair: AIC picks up both main effects, mains before any
  // interaction.
  int both_mains = 0;
  for (int seed = 0; seed < 15; ++seed) {
    Rng rng(8100 + static_cast<std::uint64_t>(seed));
    const std::size_t n = 2000;
    std::vector<std::uint8_t> genotypes(n * 3), phenotype(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = 0; s < 3; ++s)
        genotypes[i * 3 + s] = static_cast<std::uint8_t>(rng.next_u64() % 3);
      const double logit = 0.8 * (static_cast<double>(genotypes[i * 3]) - 1.0) +
                           0.8 * (static_cast<double>(genotypes[i * 3 + 1]) - 1.0);
      phenotype[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-logit)) ? 1 : 0;
    }
    GwasDataset data(genotypes, phenotype, {"s0", "s1", "s2"});
    EpistasisConfig config;
    config.epsilon = 2.0;
    config.lambda = 0.1;
    config.criterion = SelectionCriterion::aic;
    const auto result = stepwise_select(data, {0, 1, 2}, config, StreamFactory(90 + seed));
    bool has0 = false, has1 = false;
    for (const auto& t : result.terms) {
      if (t.kind == TermKind::main_effect && t.snp_a == 0) has0 = true;
      if (t.kind == TermKind::main_effect && t.snp_a == 1) has1 = true;
    }
    both_mains += has0 && has1;
  }
  CHECK(both_mains > 7);

  // Deterministic replay.
  const auto data = xor_interaction_dataset(300, 1.0, 1234, 2);
  EpistasisConfig config;
  config.epsilon = 2.0;
  config.lambda = 0.1;
  const auto a = stepwise_select(data, {0, 1}, config, StreamFactory(77));
  const auto b = stepwise_select(data, {0, 1}, config, StreamFactory(77));
  CHECK(a.terms == b.terms);
  CHECK(a.score == b.score);

  CHECK_THROWS_AS(stepwise_select(data, {}, config, StreamFactory(1)), std::invalid_argument);
}
