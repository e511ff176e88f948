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

#ifndef DPGWAS_DATASET_HPP
#define DPGWAS_DATASET_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpgwas/contingency.hpp"

namespace dpgwas {

enum class Group { controls, cases };

/// Case/control genotype matrix: N individuals by M' SNPs, entries are
/// minor-allele counts in {0,1,2}; phenotype entries are in {0,1} where 1 is
/// a case.
class GwasDataset {
 public:
  GwasDataset() = default;
  GwasDataset(std::vector<std::uint8_t> genotypes, std::vector<std::uint8_t> phenotype,
              std::vector<std::string> snp_ids)
      : genotypes_(std::move(genotypes)),
        phenotype_(std::move(phenotype)),
        snp_ids_(std::move(snp_ids)) {
    const std::size_t n = phenotype_.size();
    const std::size_t m = snp_ids_.size();
    if (genotypes_.size() != n * m)
      throw std::invalid_argument("GwasDataset: genotype matrix shape mismatch");
    for (std::uint8_t g : genotypes_)
      if (g > 2) throw std::invalid_argument("GwasDataset: genotype outside {0,1,2}");
    for (std::uint8_t y : phenotype_)
      if (y > 1) throw std::invalid_argument("GwasDataset: phenotype outside {0,1}");
  }

  std::size_t n_individuals() const { return phenotype_.size(); }
  std::size_t n_snps() const { return snp_ids_.size(); }
  std::uint8_t genotype(std::size_t individual, std::size_t snp) const {
    return genotypes_[individual * n_snps() + snp];
  }
  std::uint8_t phenotype(std::size_t individual) const { return phenotype_[individual]; }
  const std::vector<std::string>& snp_ids() const { return snp_ids_; }

  std::size_t group_size(Group g) const {
    std::size_t cases = 0;
    for (std::uint8_t y : phenotype_) cases += y;
    return g == Group::cases ? cases : phenotype_.size() - cases;
  }

  bool balanced() const { return group_size(Group::cases) == group_size(Group::controls); }

  std::size_t snp_index(const std::string& id) const {
    for (std::size_t s = 0; s < snp_ids_.size(); ++s)
      if (snp_ids_[s] == id) return s;
    throw std::invalid_argument("GwasDataset: unknown SNP id '" + id + "'");
  }

 private:
  std::vector<std::uint8_t> genotypes_;  // row-major, N x M'
  std::vector<std::uint8_t> phenotype_;
  std::vector<std::string> snp_ids_;
};

/// Tallies one SNP into its genotype-by-status table.
inline ContingencyTable3x2 table_from_snp(const GwasDataset& data, std::size_t snp) {
  if (snp >= data.n_snps()) throw std::out_of_range("table_from_snp: SNP index out of range");
  ContingencyTable3x2 t{};
  for (std::size_t i = 0; i < data.n_individuals(); ++i)
    ++t.counts[data.genotype(i, snp)][data.phenotype(i)];
  return t;
}

/// Averaged minor-allele frequency per SNP over one status group:
/// mean of (minor-allele count)/2.
inline std::vector<double> maf_vector(const GwasDataset& data, Group group) {
  const std::size_t size = data.group_size(group);
  if (size == 0) throw std::invalid_argument("maf_vector: empty group");
  const std::uint8_t want = group == Group::cases ? 1 : 0;
  std::vector<double> maf(data.n_snps(), 0.0);
  for (std::size_t i = 0; i < data.n_individuals(); ++i) {
    if (data.phenotype(i) != want) continue;
    for (std::size_t s = 0; s < data.n_snps(); ++s)
      maf[s] += static_cast<double>(data.genotype(i, s)) / 2.0;
  }
  for (double& v : maf) v /= static_cast<double>(size);
  return maf;
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == '\t') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

[[noreturn]] inline void parse_fail(std::size_t line, std::size_t column, const std::string& what) {
  std::ostringstream os;
  os << "genotype file: line " << line << ", column " << column << ": " << what;
  throw std::invalid_argument(os.str());
}

}  // namespace detail

/// Reads the delimited genotype text format: one row per individual, first
/// column phenotype in {0,1}, remaining columns genotypes in {0,1,2}.
/// Comma or tab delimited; an optional header row carries SNP ids.
inline GwasDataset read_genotypes(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> snp_ids;
  std::vector<std::uint8_t> genotypes;
  std::vector<std::uint8_t> phenotype;
  std::size_t n_cols = 0;
  bool saw_data = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_fields(line);
    if (!saw_data && snp_ids.empty()) {
      // A non-numeric first field marks a header row.
      const std::string& f0 = fields[0];
      const bool numeric =
          !f0.empty() && std::all_of(f0.begin(), f0.end(), [](char c) { return c >= '0' && c <= '9'; });
      if (!numeric) {
        if (fields.size() < 2) detail::parse_fail(line_no, 1, "header needs at least one SNP id");
        snp_ids.assign(fields.begin() + 1, fields.end());
        n_cols = fields.size();
        continue;
      }
    }
    if (n_cols == 0) n_cols = fields.size();
    if (fields.size() != n_cols)
      detail::parse_fail(line_no, fields.size(), "expected " + std::to_string(n_cols) + " fields");
    if (n_cols < 2) detail::parse_fail(line_no, 1, "need a phenotype and at least one genotype");
    if (fields[0] != "0" && fields[0] != "1")
      detail::parse_fail(line_no, 1, "phenotype must be 0 or 1, got '" + fields[0] + "'");
    phenotype.push_back(fields[0] == "1" ? 1 : 0);
    for (std::size_t c = 1; c < n_cols; ++c) {
      const std::string& f = fields[c];
      if (f != "0" && f != "1" && f != "2")
        detail::parse_fail(line_no, c + 1, "genotype must be 0, 1 or 2, got '" + f + "'");
      genotypes.push_back(static_cast<std::uint8_t>(f[0] - '0'));
    }
    saw_data = true;
  }
  if (!saw_data) throw std::invalid_argument("genotype file: no data rows");
  if (snp_ids.empty())
    for (std::size_t s = 0; s + 1 < n_cols; ++s) snp_ids.push_back("snp" + std::to_string(s));
  return GwasDataset(std::move(genotypes), std::move(phenotype), std::move(snp_ids));
}

inline void write_genotypes(std::ostream& out, const GwasDataset& data) {
  out << "phenotype";
  for (const auto& id : data.snp_ids()) out << '\t' << id;
  out << '\n';
  for (std::size_t i = 0; i < data.n_individuals(); ++i) {
    out << static_cast<int>(data.phenotype(i));
    for (std::size_t s = 0; s < data.n_snps(); ++s)
      out << '\t' << static_cast<int>(data.genotype(i, s));
    out << '\n';
  }
}

}  // namespace dpgwas

#endif  // DPGWAS_DATASET_HPP
