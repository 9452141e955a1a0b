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

#include "manifest.hpp"

#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "mdpp/data_model.hpp"
#include "mdpp/error.hpp"

namespace mdpp::cli {

RunManifest::RunManifest(std::string subcommand)
    : subcommand_(std::move(subcommand)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs_[path.string()] = Sha256File(path);
}

std::string RunManifest::ToJson() const {
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
  nlohmann::json doc = {{"format", "mdpp-run-manifest"},
                        {"version", 1},
                        {"subcommand", subcommand_},
                        {"seed", seed_},
                        {"config", config_},
                        {"inputs", inputs_},
                        {"outputs", outputs_},
                        {"wall_time_seconds", elapsed.count()}};
  return doc.dump(2) + "\n";
}

void RunManifest::Write(const std::filesystem::path& path) const {
  WriteFileAtomic(path, ToJson());
}

std::string Sha256File(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    Throw(ErrorKind::kIo, "sha256 failed for " + path.string());
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

}  // namespace mdpp::cli
