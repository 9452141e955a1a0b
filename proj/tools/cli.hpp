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

#ifndef MDPP_TOOLS_CLI_HPP_
#define MDPP_TOOLS_CLI_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "mdpp/encoder.hpp"
#include "mdpp/training.hpp"

namespace mdpp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // validation, config or usage errors
inline constexpr int kExitNumeric = 2;

// Runs one `mdpp` invocation. argv[0] is the program name. Errors go to `err`
// as "mdpp: error[<kind>]: <message>".
int Dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

struct TrainSetup {
  ModelConfig model;
  TrainConfig train;
};

// Training config file: a JSON object with any of D, H, D_prime (or "D'"),
// lambda, bce_full_form, normalize_by_n, learning_rate, batch_size,
// iterations and seed. An empty path gives the defaults.
TrainSetup ParseTrainConfig(const std::filesystem::path& path, std::size_t input_dim);

struct SplitFile {
  std::map<std::string, std::vector<std::string>> collections;
  SplitPlan plan;
};

// Split file: {"collections": {name: [sequence ids]}} plus either explicit
// "train"/"validation"/"test" names or nothing, in which case the
// round-robin plan with the given index is used.
SplitFile ParseSplit(const std::filesystem::path& path, std::size_t round_robin_index);

}  // namespace mdpp::cli

#endif  // MDPP_TOOLS_CLI_HPP_
