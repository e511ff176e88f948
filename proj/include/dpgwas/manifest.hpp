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

#ifndef DPGWAS_MANIFEST_HPP
#define DPGWAS_MANIFEST_HPP

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace dpgwas {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a content digest, recorded so a manifest pins its inputs.
inline std::string fnv1a_file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "unreadable";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

/// Record of one CLI run: subcommand, full flag set, seed, and input
/// digests. Re-running the same command line reproduces the output files
/// byte for byte; the manifest's timestamp is the only varying field.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;

  nlohmann::json to_json() const {
    const auto now = std::chrono::system_clock::now();
    return nlohmann::json{
        {"subcommand", subcommand},
        {"argv", argv},
        {"seed", seed},
        {"input_digests", input_digests},
        {"tool_version", kToolVersion},
        {"timestamp_unix", std::chrono::duration_cast<std::chrono::seconds>(
                               now.time_since_epoch())
                               .count()}};
  }

  void write(const std::string& out_path) const {
    std::ofstream out(out_path);
    out << to_json().dump(2) << '\n';
  }
};

}  // namespace dpgwas

#endif  // DPGWAS_MANIFEST_HPP
