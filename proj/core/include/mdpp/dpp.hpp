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

#ifndef MDPP_DPP_HPP_
#define MDPP_DPP_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mdpp {

// Lower bound applied to every quality score. A zero quality inside the
// target subset would make the log-likelihood -inf.
inline constexpr double kQualityFloor = 1e-6;

using Subset = std::vector<std::size_t>;

// L = diag(q) * phi^T phi * diag(q) over a ground set of N items.
//
// Columns of `phi` are renormalized to unit length on construction (a zero
// column is rejected as degenerate). Qualities above 1, negative or
// non-finite are rejected; values in [0, kQualityFloor) are raised to the
// floor.
class DppKernel {
 public:
  DppKernel(Eigen::MatrixXd phi, Eigen::VectorXd quality);

  const Eigen::MatrixXd& phi() const { return phi_; }
  const Eigen::VectorXd& quality() const { return quality_; }
  std::size_t ground_size() const { return static_cast<std::size_t>(phi_.cols()); }

  Eigen::MatrixXd similarity() const { return phi_.transpose() * phi_; }
  Eigen::MatrixXd L() const;

 private:
  Eigen::MatrixXd phi_;
  Eigen::VectorXd quality_;
};

// logdet of the principal submatrix, via Cholesky. Returns -inf when the
// submatrix is not numerically positive definite. The empty subset gives 0.
double LogDetSubset(const Eigen::MatrixXd& L, std::span<const std::size_t> subset);

// logdet(L + I). Throws kNumeric if the factorization fails.
double NormalizerLogDet(const Eigen::MatrixXd& L);
double NormalizerLogDet(const DppKernel& kernel);

// log P(Y = subset) = logdet(L_subset) - logdet(L + I). A singular subset
// yields -inf rather than an exception.
double LogProb(const Eigen::MatrixXd& L, std::span<const std::size_t> subset);
double LogProb(const DppKernel& kernel, std::span<const std::size_t> subset);

// d log P / dL, treating every entry of L as independent:
// scatter((L_y)^{-1}) - (L + I)^{-1}. Throws kNumeric if L_y is singular.
Eigen::MatrixXd LogProbGradL(const Eigen::MatrixXd& L, std::span<const std::size_t> subset);

// Gradient of log P with respect to the kernel's unit-norm columns and its
// qualities, computed without forming (L_y)^{-1}.
struct KernelGradient {
  Eigen::MatrixXd d_phi;
  Eigen::VectorXd d_quality;
};
KernelGradient LogProbGradDecomposed(const DppKernel& kernel,
                                     std::span<const std::size_t> subset);

enum class GreedyStop {
  // Stop once the best available log-det gain is negative (zero gains are
  // accepted) or max_size is reached.
  kNonNegativeGain,
  // Keep adding the best item until max_size or the determinant collapses.
  kFixedSize,
};

enum class GreedyUpdate { kIncrementalCholesky, kRecompute };

struct GreedyOptions {
  std::optional<std::size_t> max_size;
  GreedyStop stop = GreedyStop::kNonNegativeGain;
  GreedyUpdate update = GreedyUpdate::kIncrementalCholesky;
};

// Greedy MAP inference. Items are returned in the order they were picked;
// ties go to the smallest index.
Subset GreedyMap(const Eigen::MatrixXd& L, const GreedyOptions& options = {});
Subset GreedyMap(const DppKernel& kernel, const GreedyOptions& options = {});

}  // namespace mdpp

#endif  // MDPP_DPP_HPP_
