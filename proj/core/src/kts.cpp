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

#include "mdpp/kts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdpp/error.hpp"

namespace mdpp {

ShotList SegmentationResult::to_shots() const {
  std::vector<std::size_t> ends = change_points;
  ends.push_back(num_steps);
  return ShotList::FromEnds(std::move(ends), num_steps);
}

double SegmentCost(const Eigen::MatrixXd& features, std::size_t begin, std::size_t end) {
  if (begin >= end || end > static_cast<std::size_t>(features.cols())) {
    Throw(ErrorKind::kIndex, "segment [" + std::to_string(begin) + ", " + std::to_string(end) +
                                 ") is empty or out of range");
  }
  const auto block = features.middleCols(static_cast<Eigen::Index>(begin),
                                         static_cast<Eigen::Index>(end - begin));
  const Eigen::MatrixXd gram = block.transpose() * block;
  const double cost = gram.trace() - gram.sum() / static_cast<double>(end - begin);
  return std::max(cost, 0.0);
}

ScatterTable::ScatterTable(const Eigen::MatrixXd& features)
    : square_norms_(features.cols() + 1), sums_(features.rows(), features.cols() + 1) {
  square_norms_[0] = 0.0;
  sums_.col(0).setZero();
  for (Eigen::Index t = 0; t < features.cols(); ++t) {
    square_norms_[t + 1] = square_norms_[t] + features.col(t).squaredNorm();
    sums_.col(t + 1) = sums_.col(t) + features.col(t);
  }
}

double ScatterTable::cost(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > num_steps()) Throw(ErrorKind::kIndex, "segment is empty or out of range");
  const auto b = static_cast<Eigen::Index>(begin);
  const auto e = static_cast<Eigen::Index>(end);
  const double cost = (square_norms_[e] - square_norms_[b]) -
                      (sums_.col(e) - sums_.col(b)).squaredNorm() / static_cast<double>(end - begin);
  return std::max(cost, 0.0);
}

SegmentationTable OptimalSegmentations(const Eigen::MatrixXd& features, std::size_t max_changes) {
  const auto n = static_cast<std::size_t>(features.cols());
  if (n == 0) Throw(ErrorKind::kShape, "cannot segment an empty sequence");
  max_changes = std::min(max_changes, n - 1);
  const ScatterTable table(features);
  std::vector<double> cost((n + 1) * (n + 1), 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b <= n; ++b) cost[a * (n + 1) + b] = table.cost(a, b);
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best[k][b]: minimum scatter of [0, b) with k change points;
  // from[k][b]: start of the last segment in that optimum.
  std::vector<std::vector<double>> best(max_changes + 1, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<std::size_t>> from(max_changes + 1, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t b = 1; b <= n; ++b) best[0][b] = cost[b];
  for (std::size_t k = 1; k <= max_changes; ++k) {
    for (std::size_t b = k + 1; b <= n; ++b) {
      for (std::size_t a = k; a < b; ++a) {
        const double value = best[k - 1][a] + cost[a * (n + 1) + b];
        if (value < best[k][b]) {
          best[k][b] = value;
          from[k][b] = a;
        }
      }
    }
  }
  SegmentationTable out;
  for (std::size_t k = 0; k <= max_changes; ++k) {
    out.objective.push_back(best[k][n]);
    std::vector<std::size_t> points(k);
    std::size_t end = n;
    for (std::size_t j = k; j > 0; --j) {
      end = from[j][end];
      points[j - 1] = end;
    }
    out.change_points.push_back(std::move(points));
  }
  return out;
}

double KtsPenalty(std::size_t changes, std::size_t num_steps) {
  if (changes == 0) return 0.0;
  const double m = static_cast<double>(changes);
  return m * (std::log(static_cast<double>(num_steps) / m) + 1.0);
}

SegmentationResult Kts(const Eigen::MatrixXd& features, const KtsOptions& options) {
  if (options.max_segments == 0) Throw(ErrorKind::kConfig, "max_segments must be positive");
  if (options.penalty < 0.0) Throw(ErrorKind::kConfig, "penalty must be non-negative");
  const auto n = static_cast<std::size_t>(features.cols());
  SegmentationResult result;
  result.num_steps = n;
  if (options.num_segments) {
    if (*options.num_segments == 0) Throw(ErrorKind::kConfig, "num_segments must be positive");
    const std::size_t changes = std::min(*options.num_segments, n) - 1;
    const auto table = OptimalSegmentations(features, changes);
    result.change_points = table.change_points.back();
    result.objective = table.objective.back();
    result.penalized = result.objective;
    return result;
  }
  const auto table = OptimalSegmentations(features, options.max_segments - 1);
  std::size_t chosen = 0;
  double chosen_value = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < table.objective.size(); ++m) {
    const double value = table.objective[m] + options.penalty * KtsPenalty(m, n);
    if (value < chosen_value) {
      chosen_value = value;
      chosen = m;
    }
  }
  result.change_points = table.change_points[chosen];
  result.objective = table.objective[chosen];
  result.penalized = chosen_value;
  return result;
}

}  // namespace mdpp
