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

#ifndef MDPP_KTS_HPP_
#define MDPP_KTS_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mdpp/data_model.hpp"

namespace mdpp {

// Kernel temporal segmentation with a linear kernel. Features are D x N with
// one column per time-step.

struct KtsOptions {
  std::size_t max_segments = 32;
  double penalty = 1.0;
  // Forces exactly this many segments (capped at N) instead of penalized
  // model selection.
  std::optional<std::size_t> num_segments;
};

struct SegmentationResult {
  std::vector<std::size_t> change_points;  // strictly increasing, in (0, N)
  std::size_t num_steps = 0;
  double objective = 0.0;  // total within-segment scatter
  double penalized = 0.0;  // objective + penalty term used for selection

  std::size_t num_segments() const { return change_points.size() + 1; }
  ShotList to_shots() const;
};

// Within-segment scatter of [begin, end):
// sum K_ii - (1 / len) sum K_ij with K = X^T X.
double SegmentCost(const Eigen::MatrixXd& features, std::size_t begin, std::size_t end);

// Precomputed prefix sums answering SegmentCost queries in O(D).
class ScatterTable {
 public:
  explicit ScatterTable(const Eigen::MatrixXd& features);
  double cost(std::size_t begin, std::size_t end) const;
  std::size_t num_steps() const { return static_cast<std::size_t>(square_norms_.size()) - 1; }

 private:
  Eigen::VectorXd square_norms_;  // prefix sums of |x_t|^2, length N + 1
  Eigen::MatrixXd sums_;          // prefix sums of x_t, D x (N + 1)
};

// Minimum total scatter for each number of change points 0..max_changes,
// with the optimal boundaries for each.
struct SegmentationTable {
  std::vector<double> objective;
  std::vector<std::vector<std::size_t>> change_points;
};
SegmentationTable OptimalSegmentations(const Eigen::MatrixXd& features, std::size_t max_changes);

// Penalty for m change points over N steps: m * (log(N / m) + 1), 0 for m = 0.
double KtsPenalty(std::size_t changes, std::size_t num_steps);

SegmentationResult Kts(const Eigen::MatrixXd& features, const KtsOptions& options = {});

}  // namespace mdpp

#endif  // MDPP_KTS_HPP_
