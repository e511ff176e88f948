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

#ifndef DPGWAS_EPISTASIS_HPP
#define DPGWAS_EPISTASIS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpgwas/dataset.hpp"
#include "dpgwas/rng.hpp"

namespace dpgwas {

enum class TermKind { main_effect, interaction };

/// One model term: a single SNP main effect (3-level one-hot block) or a
/// SNP-pair interaction (9-level one-hot block).
struct ModelTerm {
  TermKind kind;
  std::size_t snp_a;
  std::size_t snp_b = 0;  // interaction only

  static ModelTerm main(std::size_t snp) { return {TermKind::main_effect, snp, 0}; }
  static ModelTerm pair(std::size_t a, std::size_t b) {
    if (a == b) throw std::invalid_argument("ModelTerm: interaction needs two distinct SNPs");
    return {TermKind::interaction, std::min(a, b), std::max(a, b)};
  }

  int block_size() const { return kind == TermKind::main_effect ? 3 : 9; }

  std::string label(const std::vector<std::string>& snp_ids) const {
    if (kind == TermKind::main_effect) return snp_ids[snp_a];
    return snp_ids[snp_a] + "x" + snp_ids[snp_b];
  }

  friend bool operator==(const ModelTerm&, const ModelTerm&) = default;
};

/// Ordered one-hot model layout: leading intercept, then one block per term.
/// Every encoded vector has exactly one 1 per block plus the intercept, so
/// its squared norm equals K = (number of terms) + 1.
struct FeatureEncoding {
  std::vector<ModelTerm> terms;

  int dimension() const {
    int d = 1;
    for (const auto& t : terms) d += t.block_size();
    return d;
  }

  /// K as used by the privacy accounting: number of effects plus one.
  int effect_count_k() const { return static_cast<int>(terms.size()) + 1; }

  /// Encodes one individual's genotypes (indexed by SNP) into a feature row.
  /// Interaction state index is 3*g_a + g_b over the ordered pair states.
  Eigen::VectorXd encode(std::span<const std::uint8_t> genotypes) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dimension());
    x(0) = 1.0;
    int offset = 1;
    for (const auto& t : terms) {
      if (t.kind == TermKind::main_effect) {
        const std::uint8_t g = genotypes[t.snp_a];
        if (g > 2) throw std::invalid_argument("encode: genotype outside {0,1,2}");
        x(offset + g) = 1.0;
      } else {
        const std::uint8_t ga = genotypes[t.snp_a];
        const std::uint8_t gb = genotypes[t.snp_b];
        if (ga > 2 || gb > 2) throw std::invalid_argument("encode: genotype outside {0,1,2}");
        x(offset + 3 * ga + gb) = 1.0;
      }
      offset += t.block_size();
    }
    return x;
  }
};

/// Design matrix with labels in {-1, +1} (diseased = +1).
struct LabeledDesign {
  Eigen::MatrixXd x;  // N x (p+1)
  Eigen::VectorXd y;  // entries in {-1, +1}

  std::int64_t n() const { return x.rows(); }
  int dim() const { return static_cast<int>(x.cols()); }
};

inline LabeledDesign build_design(const GwasDataset& data, const FeatureEncoding& encoding) {
  const std::size_t n = data.n_individuals();
  LabeledDesign design;
  design.x.resize(static_cast<Eigen::Index>(n), encoding.dimension());
  design.y.resize(static_cast<Eigen::Index>(n));
  std::vector<std::uint8_t> row(data.n_snps());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < data.n_snps(); ++s) row[s] = data.genotype(i, s);
    design.x.row(static_cast<Eigen::Index>(i)) = encoding.encode(row).transpose();
    design.y(static_cast<Eigen::Index>(i)) = data.phenotype(i) == 1 ? 1.0 : -1.0;
  }
  return design;
}

namespace detail {
inline double softplus(double z) {
  // log(1 + exp(z)) without overflow.
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}
}  // namespace detail

/// Ridge-penalized logistic loss; the intercept is not penalized:
/// L(beta) = sum_i log(1 + exp(-y_i beta.x_i)) + (lambda/2) |beta_1:|^2.
inline double logistic_objective(const Eigen::VectorXd& beta, const LabeledDesign& design,
                                 double lambda) {
  if (beta.size() != design.x.cols())
    throw std::invalid_argument("logistic_objective: dimension mismatch");
  const Eigen::VectorXd margins = design.y.cwiseProduct(design.x * beta);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) loss += detail::softplus(-margins(i));
  const double ridge = beta.tail(beta.size() - 1).squaredNorm();
  return loss + 0.5 * lambda * ridge;
}

/// Perturbed objective: the ridge loss plus the random linear term
/// (1/N) b.beta and the extra quadratic (delta/2) |beta|^2.
inline double perturbed_objective(const Eigen::VectorXd& beta, const LabeledDesign& design,
                                  double lambda, const Eigen::VectorXd& b, double delta = 0.0) {
  if (b.size() != beta.size()) throw std::invalid_argument("perturbed_objective: noise dimension");
  return logistic_objective(beta, design, lambda) +
         b.dot(beta) / static_cast<double>(design.n()) + 0.5 * delta * beta.squaredNorm();
}

inline Eigen::VectorXd perturbed_gradient(const Eigen::VectorXd& beta, const LabeledDesign& design,
                                          double lambda, const Eigen::VectorXd& b,
                                          double delta = 0.0) {
  const Eigen::VectorXd margins = design.y.cwiseProduct(design.x * beta);
  Eigen::VectorXd w(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i)
    w(i) = -design.y(i) / (1.0 + std::exp(margins(i)));  // -y_i sigma(-y_i beta.x_i)
  Eigen::VectorXd grad = design.x.transpose() * w;
  grad.tail(grad.size() - 1) += lambda * beta.tail(beta.size() - 1);
  grad += b / static_cast<double>(design.n());
  grad += delta * beta;
  return grad;
}

inline Eigen::MatrixXd perturbed_hessian(const Eigen::VectorXd& beta, const LabeledDesign& design,
                                         double lambda, double delta = 0.0) {
  const Eigen::VectorXd margins = design.y.cwiseProduct(design.x * beta);
  Eigen::VectorXd w(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double s = 1.0 / (1.0 + std::exp(-margins(i)));
    w(i) = s * (1.0 - s);
  }
  Eigen::MatrixXd h = design.x.transpose() * w.asDiagonal() * design.x;
  for (Eigen::Index k = 1; k < h.rows(); ++k) h(k, k) += lambda;
  h.diagonal().array() += delta;
  return h;
}

/// Privacy accounting for the objective-perturbation fit:
/// eps' = eps - log(1 + 2cK/(N lambda) + c^2 K^2 / (N^2 lambda^2)); when that
/// is nonpositive the regularizer is raised by delta = cK/(N(e^{eps/4}-1)) -
/// lambda and eps' = eps/(2K).
struct Algorithm2Params {
  double eps_prime;
  double delta;
};

inline Algorithm2Params algorithm2_params(double epsilon, double lambda, double c, int k,
                                          std::int64_t n) {
  if (!(epsilon > 0.0) || !(lambda > 0.0) || !(c > 0.0) || k < 1 || n < 1)
    throw std::invalid_argument("algorithm2_params: all inputs must be positive");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double t = c * kd / (nd * lambda);
  const double eps_prime = epsilon - std::log(1.0 + 2.0 * t + t * t);
  if (eps_prime > 0.0) return {eps_prime, 0.0};
  const double delta = c * kd / (nd * (std::exp(epsilon / 4.0) - 1.0)) - lambda;
  return {epsilon / (2.0 * kd), delta};
}

/// Draws the objective-perturbation vector with density proportional to
/// exp(-eps_used |b|_2 / 2): the norm is Gamma(dim, 2/eps_used) (a sum of
/// dim exponentials) and the direction uniform on the sphere.
inline Eigen::VectorXd sample_perturbation(int dim, double eps_used, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("sample_perturbation: dim must be at least 1");
  if (!(eps_used > 0.0)) throw std::invalid_argument("sample_perturbation: epsilon must be positive");
  double norm = 0.0;
  for (int i = 0; i < dim; ++i) norm += rng.exponential();
  norm *= 2.0 / eps_used;
  Eigen::VectorXd dir(dim);
  double len2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) dir(i) = rng.normal();
    len2 = dir.squaredNorm();
  } while (len2 == 0.0);
  return dir * (norm / std::sqrt(len2));
}

enum class PerturbationScale {
  eps_prime_half,  // exponent eps'/2, matching the accounting in step 1
  literal_eps,     // exponent eps/2 at the nominal budget
};

enum class SelectionCriterion { aic, bic };

struct EpistasisConfig {
  double epsilon = 1.0;
  double lambda = 0.1;
  double c = 0.25;  // curvature bound of the logistic loss
  SelectionCriterion criterion = SelectionCriterion::bic;
  double tolerance = 1e-9;  // gradient-norm stopping criterion
  int max_iterations = 200;
  PerturbationScale noise_scale = PerturbationScale::eps_prime_half;
  bool literal_norm_penalty = false;  // use (delta/2)|beta| instead of (delta/2)|beta|^2
};

struct FitReport {
  Eigen::VectorXd beta;
  double eps_prime = 0.0;
  double delta = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  double objective = 0.0;         // perturbed objective at beta
  double nll = 0.0;               // unpenalized negative log-likelihood at beta
  std::uint64_t seed = 0;
  PerturbationScale noise_scale = PerturbationScale::eps_prime_half;
};

namespace detail {

/// Damped Newton minimization of the perturbed objective. The target is
/// strictly convex for lambda > 0, so a small final gradient norm certifies
/// the global minimum.
inline FitReport newton_minimize(const LabeledDesign& design, double lambda,
                                 const Eigen::VectorXd& b, double delta, double tol,
                                 int max_iter) {
  FitReport report;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.dim());
  double f = perturbed_objective(beta, design, lambda, b, delta);
  int it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::VectorXd grad = perturbed_gradient(beta, design, lambda, b, delta);
    report.gradient_norm = grad.norm();
    if (report.gradient_norm <= tol) {
      report.converged = true;
      break;
    }
    const Eigen::MatrixXd hess = perturbed_hessian(beta, design, lambda, delta);
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    double t = 1.0;
    const double slope = grad.dot(step);
    while (t > 1e-10) {
      const Eigen::VectorXd candidate = beta - t * step;
      const double fc = perturbed_objective(candidate, design, lambda, b, delta);
      if (fc <= f - 1e-4 * t * slope) {
        beta = candidate;
        f = fc;
        break;
      }
      t /= 2.0;
    }
    if (t <= 1e-10) break;  // no descent progress; report best iterate
  }
  report.beta = beta;
  report.iterations = it;
  report.objective = f;
  report.nll = logistic_objective(beta, design, 0.0);
  return report;
}

}  // namespace detail

/// Objective-perturbed private ridge-logistic fit. Draws the linear
/// perturbation, raises the regularizer on the small-eps' branch, and
/// minimizes by damped Newton. The literal_norm_penalty flag switches the
/// extra term to the plain-norm reading (delta/2)|beta|, solved by
/// majorize-minimize rounds over the quadratic surrogate; the default smooth
/// (delta/2)|beta|^2 keeps Newton directly applicable (with delta = 0 the
/// two penalties coincide).
inline FitReport fit_private_logistic(const LabeledDesign& design,
                                      const FeatureEncoding& encoding,
                                      const EpistasisConfig& config, const StreamFactory& rng) {
  if (design.n() < 1) throw std::invalid_argument("fit_private_logistic: empty design");
  if (!(config.lambda > 0.0))
    throw std::invalid_argument("fit_private_logistic: lambda must be positive");
  const auto params = algorithm2_params(config.epsilon, config.lambda, config.c,
                                        encoding.effect_count_k(), design.n());

  Rng stream = rng.stream(9);
  const double eps_used =
      config.noise_scale == PerturbationScale::eps_prime_half ? params.eps_prime : config.epsilon;
  const Eigen::VectorXd b = sample_perturbation(design.dim(), eps_used, stream);

  FitReport report;
  if (config.literal_norm_penalty && params.delta > 0.0) {
    double delta_eff = params.delta;
    FitReport inner;
    for (int round = 0; round < 8; ++round) {
      inner = detail::newton_minimize(design, config.lambda, b, delta_eff, config.tolerance,
                                      config.max_iterations);
      const double norm = inner.beta.norm();
      delta_eff = norm > 1e-8 ? params.delta / (2.0 * norm) : params.delta;
    }
    report = inner;
  } else {
    report = detail::newton_minimize(design, config.lambda, b, params.delta, config.tolerance,
                                     config.max_iterations);
  }
  report.eps_prime = params.eps_prime;
  report.delta = params.delta;
  report.seed = rng.seed();
  report.noise_scale = config.noise_scale;
  return report;
}

/// AIC/BIC score from the private fit's deviance: 2k + 2 NLL or k ln N +
/// 2 NLL with k the number of free coefficients. Ridge and perturbation
/// terms are excluded from the scored likelihood.
inline double selection_score(SelectionCriterion criterion, double nll, int n_coefficients,
                              std::int64_t n) {
  const double k = static_cast<double>(n_coefficients);
  const double penalty =
      criterion == SelectionCriterion::aic ? 2.0 * k : k * std::log(static_cast<double>(n));
  return penalty + 2.0 * nll;
}

struct SelectionResult {
  std::vector<ModelTerm> terms;
  FitReport fit;          // fit of the selected model
  double score = 0.0;     // its AIC/BIC value
  int models_evaluated = 0;
  double epsilon_spent = 0.0;  // epsilon consumed across all private fits
};

namespace detail {

inline double score_model(const GwasDataset& data, const std::vector<ModelTerm>& terms,
                          const EpistasisConfig& config, const StreamFactory& rng,
                          std::uint64_t fit_id, FitReport* out_fit) {
  FeatureEncoding encoding{terms};
  const LabeledDesign design = build_design(data, encoding);
  const StreamFactory fit_rng(rng.stream(10, fit_id).next_u64());
  FitReport fit = fit_private_logistic(design, encoding, config, fit_rng);
  const double score = selection_score(config.criterion, fit.nll, encoding.dimension(),
                                       design.n());
  if (out_fit) *out_fit = std::move(fit);
  return score;
}

}  // namespace detail

/// Greedy stepwise model selection over the candidate SNPs: forward
/// additions of main effects, then forward additions of interactions among
/// the selected SNPs, then backward deletions; each candidate model is
/// scored by the chosen criterion on its own private fit. Deterministic
/// given the seed.
inline SelectionResult stepwise_select(const GwasDataset& data,
                                       const std::vector<std::size_t>& candidate_snps,
                                       const EpistasisConfig& config, const StreamFactory& rng) {
  if (candidate_snps.empty()) throw std::invalid_argument("stepwise_select: empty candidate set");

  SelectionResult result;
  std::uint64_t fit_id = 0;
  FitReport best_fit;
  double best = detail::score_model(data, {}, config, rng, fit_id++, &best_fit);
  ++result.models_evaluated;

  auto try_model = [&](std::vector<ModelTerm> terms) {
    FitReport fit;
    const double score = detail::score_model(data, terms, config, rng, fit_id++, &fit);
    ++result.models_evaluated;
    if (score < best) {
      best = score;
      best_fit = std::move(fit);
      result.terms = std::move(terms);
      return true;
    }
    return false;
  };

  // Forward: main effects.
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t snp : candidate_snps) {
      const ModelTerm term = ModelTerm::main(snp);
      if (std::find(result.terms.begin(), result.terms.end(), term) != result.terms.end())
        continue;
      auto terms = result.terms;
      terms.push_back(term);
      improved = try_model(std::move(terms)) || improved;
    }
  }

  // Forward: interactions among the SNPs whose main effects were kept.
  std::vector<std::size_t> present;
  for (const auto& t : result.terms)
    if (t.kind == TermKind::main_effect) present.push_back(t.snp_a);
  improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < present.size(); ++i) {
      for (std::size_t j = i + 1; j < present.size(); ++j) {
        const ModelTerm term = ModelTerm::pair(present[i], present[j]);
        if (std::find(result.terms.begin(), result.terms.end(), term) != result.terms.end())
          continue;
        auto terms = result.terms;
        terms.push_back(term);
        improved = try_model(std::move(terms)) || improved;
      }
    }
  }

  // Backward deletions; a main effect is only removable once no interaction
  // of its SNP remains.
  improved = true;
  while (improved && !result.terms.empty()) {
    improved = false;
    for (std::size_t k = 0; k < result.terms.size(); ++k) {
      const ModelTerm& t = result.terms[k];
      if (t.kind == TermKind::main_effect) {
        bool used = false;
        for (const auto& other : result.terms)
          if (other.kind == TermKind::interaction &&
              (other.snp_a == t.snp_a || other.snp_b == t.snp_a))
            used = true;
        if (used) continue;
      }
      auto terms = result.terms;
      terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(k));
      if (try_model(std::move(terms))) {
        improved = true;
        break;
      }
    }
  }

  result.fit = best_fit;
  result.score = best;
  result.epsilon_spent = config.epsilon * result.models_evaluated;
  return result;
}

}  // namespace dpgwas

#endif  // DPGWAS_EPISTASIS_HPP
