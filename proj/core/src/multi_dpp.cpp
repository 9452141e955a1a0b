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

#include "mdpp/multi_dpp.hpp"

#include <cmath>
#include <string>

#include "mdpp/error.hpp"

namespace mdpp {

void ViewStreams::validate() const {
  if (features.empty()) Throw(ErrorKind::kShape, "at least one view is required");
  const auto rows = features.front().rows();
  const auto cols = features.front().cols();
  if (rows == 0 || cols == 0) Throw(ErrorKind::kShape, "empty feature stream");
  for (const auto& f : features) {
    if (f.rows() != rows || f.cols() != cols) {
      Throw(ErrorKind::kShape, "views disagree on feature shape");
    }
    if (!f.allFinite()) Throw(ErrorKind::kData, "non-finite stream feature");
  }
  if (quality.rows() != static_cast<Eigen::Index>(features.size()) || quality.cols() != cols) {
    Throw(ErrorKind::kShape, "quality matrix must be M x N");
  }
  for (Eigen::Index m = 0; m < quality.rows(); ++m) {
    for (Eigen::Index n = 0; n < quality.cols(); ++n) {
      const double q = quality(m, n);
      if (!std::isfinite(q) || q < kQualityFloor || q > 1.0) {
        Throw(ErrorKind::kValidation, "view quality " + std::to_string(q) + " outside clamp bounds");
      }
    }
  }
}

ViewStreams ViewStreams::permuted(std::span<const std::size_t> order) const {
  ViewStreams out;
  out.quality.resize(static_cast<Eigen::Index>(order.size()), quality.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.features.push_back(features.at(order[i]));
    out.quality.row(static_cast<Eigen::Index>(i)) = quality.row(static_cast<Eigen::Index>(order[i]));
  }
  return out;
}

PooledFeatures PoolFeatures(const ViewStreams& streams) {
  streams.validate();
  PooledFeatures out;
  out.pooled = streams.features.front();
  out.argmax = Eigen::MatrixXi::Zero(out.pooled.rows(), out.pooled.cols());
  for (std::size_t m = 1; m < streams.num_views(); ++m) {
    const auto& f = streams.features[m];
    for (Eigen::Index n = 0; n < f.cols(); ++n) {
      for (Eigen::Index d = 0; d < f.rows(); ++d) {
        if (f(d, n) > out.pooled(d, n)) {
          out.pooled(d, n) = f(d, n);
          out.argmax(d, n) = static_cast<int>(m);
        }
      }
    }
  }
  out.phi = out.pooled;
  for (Eigen::Index n = 0; n < out.phi.cols(); ++n) {
    const double norm = out.phi.col(n).norm();
    if (!(norm > 0.0)) {
      Throw(ErrorKind::kDegenerate, "max-pooled feature at step " + std::to_string(n) + " is zero");
    }
    out.phi.col(n) /= norm;
  }
  return out;
}

Eigen::MatrixXd JointFeatures(const ViewStreams& streams) { return PoolFeatures(streams).phi; }

Eigen::VectorXd JointQuality(const ViewStreams& streams) {
  streams.validate();
  Eigen::VectorXd q = streams.quality.colwise().prod().transpose();
  return q.cwiseMax(kQualityFloor).cwiseMin(1.0);
}

JointKernelBundle BuildJointKernel(const ViewStreams& streams) {
  auto pooled = PoolFeatures(streams);
  // The kernel does its own unit rescaling; handing it the raw pooled columns
  // keeps M = 1 bit-identical to a single-view DPP.
  return {DppKernel(std::move(pooled.pooled), JointQuality(streams)), std::move(pooled.argmax)};
}

double MultiDppLogProb(const ViewStreams& streams, std::span<const std::size_t> steps) {
  return LogProb(BuildJointKernel(streams).kernel, steps);
}

StreamGradient MultiDppLogProbGrad(const ViewStreams& streams,
                                   std::span<const std::size_t> steps) {
  const auto pooled = PoolFeatures(streams);
  const Eigen::VectorXd raw_quality = streams.quality.colwise().prod().transpose();
  const DppKernel kernel(pooled.pooled, raw_quality.cwiseMax(kQualityFloor).cwiseMin(1.0));

  StreamGradient out;
  out.log_prob = LogProb(kernel, steps);
  if (!std::isfinite(out.log_prob)) {
    Throw(ErrorKind::kNumeric, "target steps are singular under the joint kernel");
  }
  const KernelGradient g = LogProbGradDecomposed(kernel, steps);

  const auto views = static_cast<Eigen::Index>(streams.num_views());
  const auto dim = pooled.phi.rows();
  const auto steps_n = pooled.phi.cols();
  out.d_features.assign(streams.num_views(), Eigen::MatrixXd::Zero(dim, steps_n));
  out.d_quality = Eigen::MatrixXd::Zero(views, steps_n);

  for (Eigen::Index n = 0; n < steps_n; ++n) {
    // Back through the unit-length rescaling, then route to the max view.
    const double norm = pooled.pooled.col(n).norm();
    const Eigen::VectorXd phi = kernel.phi().col(n);
    const Eigen::VectorXd gphi = g.d_phi.col(n);
    const Eigen::VectorXd dz = (gphi - phi * phi.dot(gphi)) / norm;
    for (Eigen::Index d = 0; d < dim; ++d) {
      out.d_features[static_cast<std::size_t>(pooled.argmax(d, n))](d, n) += dz[d];
    }

    if (raw_quality[n] < kQualityFloor || raw_quality[n] > 1.0) continue;
    for (Eigen::Index m = 0; m < views; ++m) {
      double others = 1.0;
      for (Eigen::Index k = 0; k < views; ++k) {
        if (k != m) others *= streams.quality(k, n);
      }
      out.d_quality(m, n) = g.d_quality[n] * others;
    }
  }
  return out;
}

}  // namespace mdpp
