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

#ifndef MDPP_MULTI_DPP_HPP_
#define MDPP_MULTI_DPP_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mdpp/dpp.hpp"

namespace mdpp {

// Per-view feature columns and qualities for M aligned streams of N steps.
struct ViewStreams {
  std::vector<Eigen::MatrixXd> features;  // M entries, each D' x N
  Eigen::MatrixXd quality;                // M x N, entries in [kQualityFloor, 1]

  std::size_t num_views() const { return features.size(); }
  std::size_t num_steps() const {
    return features.empty() ? 0 : static_cast<std::size_t>(features.front().cols());
  }
  std::size_t feature_dim() const {
    return features.empty() ? 0 : static_cast<std::size_t>(features.front().rows());
  }

  void validate() const;
  ViewStreams permuted(std::span<const std::size_t> order) const;
};

// Element-wise max over views, then each column rescaled to unit length.
// `argmax(d, n)` records the view that supplied entry d of column n (lowest
// view index on ties).
struct PooledFeatures {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd pooled;
  Eigen::MatrixXi argmax;
};

PooledFeatures PoolFeatures(const ViewStreams& streams);
Eigen::MatrixXd JointFeatures(const ViewStreams& streams);

// Product of per-view qualities at each step, clamped to [kQualityFloor, 1].
Eigen::VectorXd JointQuality(const ViewStreams& streams);

struct JointKernelBundle {
  DppKernel kernel;
  Eigen::MatrixXi argmax;
};

JointKernelBundle BuildJointKernel(const ViewStreams& streams);

// log P(Y = steps) under the joint kernel over time-steps.
double MultiDppLogProb(const ViewStreams& streams, std::span<const std::size_t> steps);

struct StreamGradient {
  double log_prob = 0.0;
  std::vector<Eigen::MatrixXd> d_features;  // M x (D' x N)
  Eigen::MatrixXd d_quality;                // M x N
};

// log P(Y = steps) and its gradient with respect to every per-view feature and
// quality. Entries where a clamp is active receive zero gradient.
StreamGradient MultiDppLogProbGrad(const ViewStreams& streams,
                                   std::span<const std::size_t> steps);

}  // namespace mdpp

#endif  // MDPP_MULTI_DPP_HPP_
