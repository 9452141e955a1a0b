// Copyright 2026 The Multi-DPP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDPP_TOOLS_MANIFEST_HPP_
#define MDPP_TOOLS_MANIFEST_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mdpp::cli {

// Reproducibility record written for every run.
class RunManifest {
 public:
  explicit RunManifest(std::string subcommand);

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_config(const std::string& key, const std::string& value) { config_[key] = value; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path) { outputs_.push_back(path.string()); }

  std::string ToJson() const;
  void Write(const std::filesystem::path& path) const;

 private:
  std::string subcommand_;
  std::uint64_t seed_ = 0;
  std::map<std::string, std::string> config_;
  std::map<std::string, std::string> inputs_;  // path -> sha256
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

// Hex SHA-256 of a file's bytes.
std::string Sha256File(const std::filesystem::path& path);

}  // namespace mdpp::cli

#endif  // MDPP_TOOLS_MANIFEST_HPP_
