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

#ifndef MDPP_CHECKS_HPP_
#define MDPP_CHECKS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "mdpp/dpp.hpp"
#include "mdpp/encoder.hpp"
#include "mdpp/multi_dpp.hpp"

namespace mdpp {

// Self-checks behind `mdpp check`: the library's fast paths compared with
// exhaustive enumeration or finite differences.

struct CheckReport {
  std::string name;
  std::size_t trials = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

DppKernel RandomKernel(std::size_t n, std::size_t dim, std::mt19937_64& rng);
ViewStreams RandomStreams(std::size_t views, std::size_t steps, std::size_t dim,
                          std::mt19937_64& rng);

// log of sum over all 2^N subsets of det(L_y), determinants by LU.
double EnumeratedLogNormalizer(const Eigen::MatrixXd& L);

// Subset maximizing det(L_y) by enumeration (|y| <= max_size). Ties go to the
// subset found first in increasing bitmask order.
Subset EnumeratedMap(const Eigen::MatrixXd& L, std::optional<std::size_t> max_size = std::nullopt);

// Sum of exp(log_prob) over all subsets must be 1, and exp(normalizer) must
// equal the enumerated sum.
CheckReport CheckDppNormalization(std::size_t max_n, std::size_t trials, std::uint64_t seed);

// Incremental and recomputed greedy must agree.
CheckReport CheckGreedyModes(std::size_t n, std::size_t trials, std::uint64_t seed);

// M = 1 reduction plus view-permutation invariance of the Multi-DPP.
CheckReport CheckMultiDppInvariance(std::size_t trials, std::uint64_t seed);

// Analytic loss gradient vs central differences on a small model. The error
// is |a - f| / max(|a|, |f|, 1e-3) maximized over weights.
CheckReport CheckLossGradient(const LossOptions& options, std::uint64_t seed, double step = 1e-5);

}  // namespace mdpp

#endif  // MDPP_CHECKS_HPP_
