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

// Command-line front end: seed-stamped, manifest-emitting runs of the
// release mechanisms, the perturbed-statistic reference law, the fiber
// random walk, the epistasis pipeline, the data simulator, and the utility
// evaluations. All randomness flows from --seed; re-running a command line
// reproduces its outputs byte for byte.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpgwas/contingency.hpp"
#include "dpgwas/dataset.hpp"
#include "dpgwas/epistasis.hpp"
#include "dpgwas/evaluation.hpp"
#include "dpgwas/fiber.hpp"
#include "dpgwas/manifest.hpp"
#include "dpgwas/perturbed_chi2.hpp"
#include "dpgwas/release.hpp"
#include "dpgwas/rng.hpp"
#include "dpgwas/sensitivity.hpp"
#include "dpgwas/simgen.hpp"

namespace {

using namespace dpgwas;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GwasDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open data file: " + path);
  return read_genotypes(in);
}

ContingencyTable3x2 load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open table file: " + path);
  std::array<std::array<std::int64_t, 2>, 3> counts{};
  std::string line;
  int row = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& ch : line)
      if (ch == ',' || ch == '\t') ch = ' ';
    std::istringstream fields(line);
    std::int64_t a, b;
    if (!(fields >> a)) continue;  // blank line
    if (!(fields >> b) || row >= 3) {
      std::ostringstream os;
      os << "table file: line " << line_no << ": expected two counts per row, three rows";
      throw std::invalid_argument(os.str());
    }
    counts[row][0] = a;
    counts[row][1] = b;
    ++row;
  }
  if (row != 3) throw std::invalid_argument("table file: expected three rows");
  return ContingencyTable3x2::from_rows(counts[0], counts[1], counts[2]);
}

struct OutputSink {
  std::optional<std::string> path;
  std::ostringstream buffer;

  template <class T>
  OutputSink& operator<<(const T& value) {
    buffer << value;
    return *this;
  }

  void finish(const RunManifest& manifest) {
    if (path) {
      std::ofstream out(*path);
      if (!out) throw std::runtime_error("cannot write output file: " + *path);
      out << buffer.str();
      manifest.write(*path + ".manifest.json");
    } else {
      std::cout << buffer.str();
    }
  }
};

RunManifest make_manifest(const std::string& subcommand, int argc, char** argv,
                          std::uint64_t seed,
                          const std::vector<std::string>& inputs) {
  RunManifest m;
  m.subcommand = subcommand;
  for (int i = 0; i < argc; ++i) m.argv.emplace_back(argv[i]);
  m.seed = seed;
  for (const auto& p : inputs) m.input_digests[p] = fnv1a_file_digest(p);
  return m;
}

// Deterministic worker-count-independent parallel map over grid cells.
template <class Fn>
void parallel_cells(std::size_t n_cells, int jobs, Fn&& body) {
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n_cells; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

int run(int argc, char** argv) {
  CLI::App app{"epsilon-differentially private GWAS summary statistics toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "root RNG seed")->capture_default_str();

  // ---- release ----------------------------------------------------------
  auto* release = app.add_subcommand("release", "noisy statistic releases");
  release->require_subcommand(1);
  std::string data_path, table_path, snp_id, out_path;
  double epsilon = 1.0;
  bool clamp = false;
  double projection_c = 0.0;
  std::int64_t top_m = 3;
  std::string statistic = "chi2";

  auto add_common = [&](CLI::App* cmd, bool needs_data) {
    cmd->add_option("--epsilon", epsilon, "privacy budget")->required();
    cmd->add_option("--out", out_path, "output JSON path (default stdout)");
    if (needs_data) cmd->add_option("--data", data_path, "genotype text file");
  };

  auto* rel_maf = release->add_subcommand("maf", "averaged case/control MAFs");
  add_common(rel_maf, true);
  rel_maf->add_flag("--clamp", clamp, "clamp released values into [0,1]");
  auto* rel_counts = release->add_subcommand("counts", "genotype-by-status cell counts");
  add_common(rel_counts, true);
  rel_counts->add_flag("--clamp", clamp, "clamp released counts at zero");
  auto* rel_chi2 = release->add_subcommand("chi2", "chi-square statistic of one SNP or table");
  add_common(rel_chi2, true);
  rel_chi2->add_option("--snp", snp_id, "SNP id within --data");
  rel_chi2->add_option("--table", table_path, "3x2 count table file");
  auto* rel_pvalue = release->add_subcommand("pvalue", "p-value of one SNP or table");
  add_common(rel_pvalue, true);
  rel_pvalue->add_option("--snp", snp_id, "SNP id within --data");
  rel_pvalue->add_option("--table", table_path, "3x2 count table file");
  rel_pvalue->add_option("--projection-c", projection_c,
                         "project p-values above exp(-N/c) onto that threshold");
  auto* rel_top = release->add_subcommand("top-m", "two-stage top-M release");
  add_common(rel_top, true);
  rel_top->add_option("--top-m", top_m, "number of SNPs to release")->capture_default_str();
  rel_top->add_option("--statistic", statistic, "chi2 or pvalue")->capture_default_str();

  // ---- dist --------------------------------------------------------------
  auto* dist = app.add_subcommand("dist", "perturbed chi-square reference law");
  dist->require_subcommand(1);
  double dist_eps = 0.2, dist_at = 0.0;
  std::int64_t dist_exact_n = 0;
  std::string grid_spec;
  for (const char* name : {"pdf", "cdf", "quantile", "pvalue"}) {
    auto* sub = dist->add_subcommand(name);
    sub->add_option("--epsilon", dist_eps, "privacy budget")->required();
    sub->add_option("--at", dist_at, "evaluation point")->required();
    sub->add_option("--exact-n", dist_exact_n, "use the exact finite-N noise scale");
  }
  auto* dist_table = dist->add_subcommand("table", "CSV of pdf/cdf over a grid");
  dist_table->add_option("--epsilon", dist_eps, "privacy budget")->required();
  dist_table->add_option("--grid", grid_spec, "a:b:step")->required();
  dist_table->add_option("--exact-n", dist_exact_n, "use the exact finite-N noise scale");
  dist_table->add_option("--out", out_path, "output CSV path (default stdout)");

  // ---- mcmc --------------------------------------------------------------
  auto* mcmc = app.add_subcommand("mcmc", "fiber random walk statistics");
  std::string mcmc_table_path, mcmc_target = "hyper", mcmc_perturb = "none";
  std::int64_t mcmc_steps = 100000, mcmc_burn = 10000, mcmc_thin = 1;
  double mcmc_eps = 0.2;
  mcmc->add_option("--table", mcmc_table_path, "start table (3x2 counts)")->required();
  mcmc->add_option("--steps", mcmc_steps, "total chain steps")->capture_default_str();
  mcmc->add_option("--burn-in", mcmc_burn, "discarded prefix")->capture_default_str();
  mcmc->add_option("--thin", mcmc_thin, "keep every thin-th state")->capture_default_str();
  mcmc->add_option("--target", mcmc_target, "uniform or hyper")->capture_default_str();
  mcmc->add_option("--perturb", mcmc_perturb, "stat, cells, or none")->capture_default_str();
  mcmc->add_option("--epsilon", mcmc_eps, "noise budget for perturbed modes");
  mcmc->add_option("--out", out_path, "output CSV path (default stdout)");

  // ---- simulate ----------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "synthetic GWAS data");
  auto* sim_gwas = simulate->add_subcommand("gwas", "genotype matrix with planted signals");
  std::size_t sim_snps = 1000;
  int sim_causal = 2;
  std::string sim_model = "c";
  std::int64_t sim_n = 800;
  sim_gwas->add_option("--snps", sim_snps, "number of null SNPs")->capture_default_str();
  sim_gwas->add_option("--causal", sim_causal, "number of planted causal SNPs")
      ->capture_default_str();
  sim_gwas->add_option("--causal-model", sim_model, "frequency table a, b, c, or d")
      ->capture_default_str();
  sim_gwas->add_option("--n", sim_n, "individuals (even)")->capture_default_str();
  sim_gwas->add_option("--out", out_path, "output genotype file")->required();

  // ---- epistasis ---------------------------------------------------------
  auto* epi = app.add_subcommand("epistasis", "private interaction detection pipeline");
  std::string epi_criterion = "bic";
  double epi_eps = 1.0, epi_filter_eps = 0.4, epi_lambda = 0.1, epi_c = 0.25;
  std::int64_t epi_top_m = 3;
  bool epi_literal_noise = false, epi_literal_norm = false;
  epi->add_option("--data", data_path, "genotype text file")->required();
  epi->add_option("--epsilon", epi_eps, "budget per private fit")->capture_default_str();
  epi->add_option("--filter-epsilon", epi_filter_eps, "budget of the top-M filter stage")
      ->capture_default_str();
  epi->add_option("--lambda", epi_lambda, "ridge weight")->capture_default_str();
  epi->add_option("--c", epi_c, "loss curvature constant")->capture_default_str();
  epi->add_option("--criterion", epi_criterion, "aic or bic")->capture_default_str();
  epi->add_option("--top-m", epi_top_m, "SNPs surviving the filter")->capture_default_str();
  epi->add_flag("--nominal-noise", epi_literal_noise,
                "draw the perturbation at the nominal epsilon instead of the accounted eps'");
  epi->add_flag("--norm-penalty", epi_literal_norm,
                "penalize (delta/2)|beta| instead of (delta/2)|beta|^2");
  epi->add_option("--out", out_path, "output JSON path (default stdout)");

  // ---- eval --------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "utility studies (CSV output)");
  eval->require_subcommand(1);
  int jobs = 1;
  std::string eval_models = "a,b,c,d", eval_eps_list = "0.1,0.2,0.3,0.4",
              eval_n_list = "200,500,1000,2000";
  int eval_tables = 10000, eval_bins = 200;
  std::string eval_statistic = "chi2";
  auto* eval_kl = eval->add_subcommand("kl", "KL divergence original vs private");
  eval_kl->add_option("--models", eval_models, "frequency tables")->capture_default_str();
  eval_kl->add_option("--epsilons", eval_eps_list, "comma list")->capture_default_str();
  eval_kl->add_option("--ns", eval_n_list, "comma list")->capture_default_str();
  eval_kl->add_option("--tables", eval_tables, "samples per cell")->capture_default_str();
  eval_kl->add_option("--bins", eval_bins, "histogram bins")->capture_default_str();
  eval_kl->add_option("--statistic", eval_statistic, "chi2 or pvalue")->capture_default_str();
  eval_kl->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  eval_kl->add_option("--out", out_path, "output CSV path (default stdout)");

  auto* eval_roc = eval->add_subcommand("roc", "ROC of perturbed p-values");
  double roc_eps = 0.1;
  std::size_t roc_pos = 500, roc_neg = 500;
  eval_roc->add_option("--epsilon", roc_eps, "privacy budget")->capture_default_str();
  eval_roc->add_option("--pos", roc_pos, "true positives")->capture_default_str();
  eval_roc->add_option("--neg", roc_neg, "true negatives")->capture_default_str();
  eval_roc->add_option("--out", out_path, "output CSV path (default stdout)");

  auto* eval_ks = eval->add_subcommand("ks", "KS distance of Monte Carlo draws to the law");
  double ks_eps = 0.2;
  std::int64_t ks_draws = 1000000;
  eval_ks->add_option("--epsilon", ks_eps, "privacy budget")->capture_default_str();
  eval_ks->add_option("--draws", ks_draws, "Monte Carlo draws")->capture_default_str();

  auto* eval_rec = eval->add_subcommand("recovery", "top-M recovery frequency grid");
  std::size_t rec_snps = 2000;
  std::string rec_model = "c";
  std::int64_t rec_m = 3;
  int rec_runs = 200, rec_causal = 2;
  eval_rec->add_option("--snps", rec_snps, "null SNPs")->capture_default_str();
  eval_rec->add_option("--causal", rec_causal, "planted causal SNPs")->capture_default_str();
  eval_rec->add_option("--causal-model", rec_model, "frequency table a..d")->capture_default_str();
  eval_rec->add_option("--m", rec_m, "released set size")->capture_default_str();
  eval_rec->add_option("--epsilons", eval_eps_list, "comma list")->capture_default_str();
  eval_rec->add_option("--ns", eval_n_list, "comma list")->capture_default_str();
  eval_rec->add_option("--runs", rec_runs, "runs per cell")->capture_default_str();
  eval_rec->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  eval_rec->add_option("--out", out_path, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints usage or help text
    return code == 0 ? 0 : 1;
  }

  auto parse_doubles = [](const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(std::stod(item));
    return out;
  };
  auto parse_ints = [](const std::string& s) {
    std::vector<std::int64_t> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(std::stoll(item));
    return out;
  };

  const StreamFactory rng(seed);
  OutputSink sink;
  if (!out_path.empty()) sink.path = out_path;
  std::vector<std::string> inputs;
  if (!data_path.empty()) inputs.push_back(data_path);
  if (!table_path.empty()) inputs.push_back(table_path);
  if (!mcmc_table_path.empty()) inputs.push_back(mcmc_table_path);

  // ---- dispatch ----------------------------------------------------------
  if (release->parsed()) {
    ReleaseReport report;
    if (rel_maf->parsed()) {
      const auto data = load_dataset(data_path);
      std::vector<std::size_t> subset(data.n_snps());
      std::iota(subset.begin(), subset.end(), 0);
      report = release_maf(data, subset, PrivacyBudget(epsilon), rng);
      if (clamp) report = clamp_report(report, 0.0, 1.0);
    } else if (rel_counts->parsed()) {
      const auto data = load_dataset(data_path);
      std::vector<ContingencyTable3x2> tables;
      for (std::size_t s = 0; s < data.n_snps(); ++s) tables.push_back(table_from_snp(data, s));
      report = release_counts(tables, PrivacyBudget(epsilon), rng, &data.snp_ids());
      if (clamp) report = clamp_report(report, 0.0, 1e300);
    } else if (rel_chi2->parsed() || rel_pvalue->parsed()) {
      ContingencyTable3x2 table;
      if (!table_path.empty()) {
        table = load_table(table_path);
      } else if (!data_path.empty() && !snp_id.empty()) {
        const auto data = load_dataset(data_path);
        table = table_from_snp(data, data.snp_index(snp_id));
      } else {
        throw CLI::ValidationError("release", "need --table, or --data with --snp");
      }
      if (rel_chi2->parsed()) {
        report = release_chi2_single(table, PrivacyBudget(epsilon), rng);
      } else {
        std::optional<ProjectionParam> proj;
        if (projection_c > 0.0) proj.emplace(projection_c, table.total());
        report = release_pvalue_single(table, PrivacyBudget(epsilon), rng, proj);
      }
    } else {  // top-m
      const auto data = load_dataset(data_path);
      const bool use_chi2 = statistic == "chi2";
      if (!use_chi2 && statistic != "pvalue")
        throw CLI::ValidationError("release top-m", "--statistic must be chi2 or pvalue");
      std::vector<double> stats(data.n_snps());
      for (std::size_t s = 0; s < data.n_snps(); ++s) {
        const double chi2 = chi2_statistic_lenient(table_from_snp(data, s));
        stats[s] = use_chi2 ? chi2 : pvalue_df2(chi2);
      }
      report = release_top_m(stats, top_m, use_chi2 ? TopMStatistic::chi2 : TopMStatistic::pvalue,
                             static_cast<std::int64_t>(data.n_individuals()),
                             PrivacyBudget(epsilon), rng, &data.snp_ids());
    }
    sink << report.to_json().dump(2) << "\n";
    sink.finish(make_manifest("release", argc, argv, seed, inputs));
    return 0;
  }

  if (dist->parsed()) {
    const auto law = dist_exact_n > 0 ? PerturbedChiSquared::with_exact_scale(dist_eps, dist_exact_n)
                                      : PerturbedChiSquared(dist_eps);
    auto* sub = dist->get_subcommands().front();
    const std::string which = sub->get_name();
    if (which == "table") {
      const auto parts = parse_doubles([&] {
        std::string g = grid_spec;
        for (char& ch : g)
          if (ch == ':') ch = ',';
        return g;
      }());
      if (parts.size() != 3 || parts[2] <= 0.0)
        throw CLI::ValidationError("dist table", "--grid must be a:b:step with positive step");
      sink << "x,pdf,cdf\n";
      for (double x = parts[0]; x <= parts[1] + 1e-12; x += parts[2])
        sink << fmt(x) << "," << fmt(law.pdf(x)) << "," << fmt(law.cdf(x)) << "\n";
    } else {
      double value = 0.0;
      if (which == "pdf") value = law.pdf(dist_at);
      if (which == "cdf") value = law.cdf(dist_at);
      if (which == "quantile") value = law.quantile(dist_at);
      if (which == "pvalue") value = law.upper_tail(dist_at);
      sink << fmt(value) << "\n";
    }
    sink.finish(make_manifest("dist", argc, argv, seed, inputs));
    return 0;
  }

  if (mcmc->parsed()) {
    const auto table = load_table(mcmc_table_path);
    FiberWalkConfig config;
    config.steps = mcmc_steps;
    config.burn_in = mcmc_burn;
    config.thin = mcmc_thin;
    if (mcmc_target == "uniform")
      config.target = FiberTarget::uniform;
    else if (mcmc_target == "hyper")
      config.target = FiberTarget::hypergeometric;
    else
      throw CLI::ValidationError("mcmc", "--target must be uniform or hyper");
    PerturbMode mode;
    if (mcmc_perturb == "none")
      mode = PerturbMode::none;
    else if (mcmc_perturb == "stat")
      mode = PerturbMode::statistic;
    else if (mcmc_perturb == "cells")
      mode = PerturbMode::cells;
    else
      throw CLI::ValidationError("mcmc", "--perturb must be stat, cells, or none");
    const auto sample =
        empirical_perturbed_distribution(table, config, mode, mcmc_eps, rng.stream(100));
    sink << "statistic\n";
    for (double v : sample) sink << fmt(v) << "\n";
    sink.finish(make_manifest("mcmc", argc, argv, seed, inputs));
    return 0;
  }

  if (simulate->parsed()) {
    const auto freq = builtin_frequency_table(sim_model.empty() ? 'c' : sim_model[0]);
    const std::vector<FrequencyTable3x2> causal(static_cast<std::size_t>(sim_causal), freq);
    const auto sim = synth_gwas(sim_snps, causal, sim_n, rng);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write output file: " + out_path);
    write_genotypes(out, sim.data);
    make_manifest("simulate", argc, argv, seed, inputs).write(out_path + ".manifest.json");
    return 0;
  }

  if (epi->parsed()) {
    const auto data = load_dataset(data_path);
    EpistasisConfig config;
    config.epsilon = epi_eps;
    config.lambda = epi_lambda;
    config.c = epi_c;
    if (epi_criterion == "aic")
      config.criterion = SelectionCriterion::aic;
    else if (epi_criterion == "bic")
      config.criterion = SelectionCriterion::bic;
    else
      throw CLI::ValidationError("epistasis", "--criterion must be aic or bic");
    config.noise_scale = epi_literal_noise ? PerturbationScale::literal_eps
                                           : PerturbationScale::eps_prime_half;
    config.literal_norm_penalty = epi_literal_norm;

    // Filter stage: the selection half of the top-M release (stage-2 values
    // are not needed, only membership).
    std::vector<double> stats(data.n_snps());
    for (std::size_t s = 0; s < data.n_snps(); ++s)
      stats[s] = chi2_statistic_lenient(table_from_snp(data, s));
    const auto filter =
        release_top_m(stats, std::min<std::int64_t>(epi_top_m, stats.size()),
                      TopMStatistic::chi2, static_cast<std::int64_t>(data.n_individuals()),
                      PrivacyBudget(epi_filter_eps), rng);
    std::vector<std::size_t> candidates;
    for (const auto& id : *filter.selected_ids)
      candidates.push_back(std::stoul(id.substr(3)));

    const auto result = stepwise_select(data, candidates, config, rng);

    nlohmann::json j;
    j["filter"] = {{"epsilon", epi_filter_eps},
                   {"top_m", epi_top_m},
                   {"selected_snps", nlohmann::json::array()}};
    for (std::size_t s : candidates) j["filter"]["selected_snps"].push_back(data.snp_ids()[s]);
    j["selection"] = {{"criterion", epi_criterion},
                      {"score", result.score},
                      {"models_evaluated", result.models_evaluated},
                      {"terms", nlohmann::json::array()}};
    for (const auto& t : result.terms)
      j["selection"]["terms"].push_back(t.label(data.snp_ids()));
    j["fit"] = {{"eps_prime", result.fit.eps_prime},
                {"delta", result.fit.delta},
                {"iterations", result.fit.iterations},
                {"gradient_norm", result.fit.gradient_norm},
                {"converged", result.fit.converged},
                {"coefficients", std::vector<double>(result.fit.beta.data(),
                                                     result.fit.beta.data() + result.fit.beta.size())}};
    j["epsilon_accounting"] = {{"filter_stage", epi_filter_eps},
                               {"per_fit", epi_eps},
                               {"fits", result.models_evaluated},
                               {"fit_stage_total", result.epsilon_spent},
                               {"total", epi_filter_eps + result.epsilon_spent}};
    sink << j.dump(2) << "\n";
    sink.finish(make_manifest("epistasis", argc, argv, seed, inputs));
    return 0;
  }

  if (eval->parsed()) {
    if (eval_kl->parsed()) {
      const auto epsilons = parse_doubles(eval_eps_list);
      const auto ns = parse_ints(eval_n_list);
      const bool use_chi2 = eval_statistic == "chi2";
      if (!use_chi2 && eval_statistic != "pvalue")
        throw CLI::ValidationError("eval kl", "--statistic must be chi2 or pvalue");
      struct Cell {
        char model;
        double eps;
        std::int64_t n;
        double kl;
      };
      std::vector<Cell> cells;
      for (char model : eval_models)
        if (model != ',')
          for (double eps : epsilons)
            for (std::int64_t n : ns) cells.push_back({model, eps, n, 0.0});
      parallel_cells(cells.size(), jobs, [&](std::size_t idx) {
        auto& cell = cells[idx];
        const auto freq = builtin_frequency_table(cell.model);
        Rng gen = rng.stream(200, idx);
        std::vector<double> original, privatized;
        original.reserve(static_cast<std::size_t>(eval_tables));
        privatized.reserve(static_cast<std::size_t>(eval_tables));
        const double scale = use_chi2
                                 ? sensitivity_chi2(cell.n) / cell.eps
                                 : sensitivity_pvalue() / cell.eps;
        for (int t = 0; t < eval_tables; ++t) {
          const double chi2 = chi2_statistic_lenient(sample_table(freq, cell.n, gen));
          const double stat = use_chi2 ? chi2 : pvalue_df2(chi2);
          original.push_back(stat);
          const double noisy = stat + gen.laplace(scale);
          privatized.push_back(use_chi2 ? noisy : std::clamp(noisy, 0.0, 1.0));
        }
        cell.kl = kl_divergence_empirical(original, privatized, eval_bins);
      });
      sink << "model,epsilon,n,bins,kl\n";
      for (const auto& cell : cells)
        sink << cell.model << "," << fmt(cell.eps) << "," << cell.n << "," << eval_bins << ","
             << fmt(cell.kl) << "\n";
    } else if (eval_roc->parsed()) {
      Rng gen = rng.stream(300);
      auto mix = sample_pvalue_mixture(roc_pos, roc_neg, gen);
      const double scale = sensitivity_pvalue() / roc_eps;
      for (double& v : mix.values) v = std::clamp(v + gen.laplace(scale), 0.0, 1.0);
      const auto curve = roc_curve(mix.labels, mix.values);
      sink << "fpr,tpr\n";
      for (const auto& p : curve.points) sink << fmt(p.fpr) << "," << fmt(p.tpr) << "\n";
      sink << "# auc," << fmt(curve.auc) << "\n";
    } else if (eval_ks->parsed()) {
      Rng gen = rng.stream(400);
      std::vector<double> draws;
      draws.reserve(static_cast<std::size_t>(ks_draws));
      for (std::int64_t i = 0; i < ks_draws; ++i)
        draws.push_back(-2.0 * std::log(gen.uniform()) + gen.laplace(4.0 / ks_eps));
      const PerturbedChiSquared law(ks_eps);
      sink << fmt(ks_statistic(std::move(draws), [&](double x) { return law.cdf(x); })) << "\n";
    } else if (eval_rec->parsed()) {
      RecoverySimConfig config;
      config.n_null_snps = rec_snps;
      config.causal = builtin_frequency_table(rec_model.empty() ? 'c' : rec_model[0]);
      config.n_causal = rec_causal;
      const auto epsilons = parse_doubles(eval_eps_list);
      const auto ns = parse_ints(eval_n_list);
      const auto grid = recovery_frequency(config, rec_m, epsilons, ns, rec_runs, rng, jobs);
      sink << "epsilon,n,freq_any,freq_both\n";
      for (std::size_t ie = 0; ie < epsilons.size(); ++ie)
        for (std::size_t in = 0; in < ns.size(); ++in)
          sink << fmt(epsilons[ie]) << "," << ns[in] << "," << fmt(grid.any(ie, in)) << ","
               << fmt(grid.both(ie, in)) << "\n";
    }
    sink.finish(make_manifest("eval", argc, argv, seed, inputs));
    return 0;
  }

  return 0;
}

}  // namespace

// Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.
int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
