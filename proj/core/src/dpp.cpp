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

#include "mdpp/dpp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mdpp/error.hpp"

namespace mdpp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Slack on the "non-negative gain" rule so orthogonal items are not lost to
// rounding in the incremental updates.
constexpr double kGainTolerance = 1e-12;
// Residual variance below which an item is treated as linearly dependent.
constexpr double kResidualFloor = 1e-14;

Eigen::MatrixXd Principal(const Eigen::MatrixXd& m, std::span<const std::size_t> subset) {
  const auto k = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = m(subset[a], subset[b]);
  }
  return out;
}

void CheckSubset(std::size_t n, std::span<const std::size_t> subset) {
  std::vector<bool> seen(n, false);
  for (std::size_t i : subset) {
    if (i >= n) Throw(ErrorKind::kIndex, "subset index " + std::to_string(i) + " out of range");
    if (seen[i]) Throw(ErrorKind::kValidation, "subset index repeated");
    seen[i] = true;
  }
}

// logdet of an SPD matrix, or -inf if Cholesky breaks down.
double LogDetSpd(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return kNegInf;
  const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag[i] > 0.0)) return kNegInf;
    sum += std::log(diag[i]);
  }
  return 2.0 * sum;
}

Eigen::MatrixXd SpdInverse(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) Throw(ErrorKind::kNumeric, std::string(what) + " is singular");
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

Subset GreedyIncremental(const Eigen::MatrixXd& L, std::size_t limit, GreedyStop stop) {
  const Eigen::Index n = L.rows();
  Subset picked;
  Eigen::VectorXd residual = L.diagonal();
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(limit), n);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  while (picked.size() < limit) {
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!used[i] && (best < 0 || residual[i] > residual[best])) best = i;
    }
    if (best < 0 || !(residual[best] > kResidualFloor)) break;
    if (stop == GreedyStop::kNonNegativeGain && std::log(residual[best]) < -kGainTolerance) break;

    const auto row = static_cast<Eigen::Index>(picked.size());
    const double pivot = std::sqrt(residual[best]);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (used[i] || i == best) continue;
      double dot = 0.0;
      for (Eigen::Index r = 0; r < row; ++r) dot += basis(r, best) * basis(r, i);
      const double e = (L(best, i) - dot) / pivot;
      basis(row, i) = e;
      residual[i] -= e * e;
    }
    basis(row, best) = pivot;
    used[best] = true;
    picked.push_back(static_cast<std::size_t>(best));
  }
  return picked;
}

Subset GreedyRecompute(const Eigen::MatrixXd& L, std::size_t limit, GreedyStop stop) {
  const auto n = static_cast<std::size_t>(L.rows());
  Subset picked;
  std::vector<bool> used(n, false);
  double current = 0.0;
  while (picked.size() < limit) {
    std::size_t best = n;
    double best_value = kNegInf;
    Subset trial = picked;
    trial.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      trial.back() = i;
      const double value = LogDetSubset(L, trial);
      if (best == n || value > best_value) {
        best = i;
        best_value = value;
      }
    }
    if (best == n || best_value == kNegInf) break;
    const double gain = best_value - current;
    if (gain < std::log(kResidualFloor)) break;
    if (stop == GreedyStop::kNonNegativeGain && gain < -kGainTolerance) break;
    used[best] = true;
    picked.push_back(best);
    current = best_value;
  }
  return picked;
}

}  // namespace

DppKernel::DppKernel(Eigen::MatrixXd phi, Eigen::VectorXd quality)
    : phi_(std::move(phi)), quality_(std::move(quality)) {
  if (phi_.cols() != quality_.size()) {
    Throw(ErrorKind::kShape, "phi has " + std::to_string(phi_.cols()) + " columns but " +
                                 std::to_string(quality_.size()) + " qualities given");
  }
  if (!phi_.allFinite()) Throw(ErrorKind::kData, "non-finite feature in kernel");
  for (Eigen::Index i = 0; i < phi_.cols(); ++i) {
    const double norm = phi_.col(i).norm();
    if (!(norm > 0.0)) {
      Throw(ErrorKind::kDegenerate, "feature column " + std::to_string(i) + " has zero norm");
    }
    phi_.col(i) /= norm;
  }
  for (Eigen::Index i = 0; i < quality_.size(); ++i) {
    const double q = quality_[i];
    if (!std::isfinite(q) || q < 0.0 || q > 1.0) {
      Throw(ErrorKind::kValidation, "quality " + std::to_string(q) + " outside [0, 1]");
    }
    if (q < kQualityFloor) quality_[i] = kQualityFloor;
  }
}

Eigen::MatrixXd DppKernel::L() const {
  return quality_.asDiagonal() * similarity() * quality_.asDiagonal();
}

double LogDetSubset(const Eigen::MatrixXd& L, std::span<const std::size_t> subset) {
  CheckSubset(static_cast<std::size_t>(L.rows()), subset);
  return LogDetSpd(Principal(L, subset));
}

double NormalizerLogDet(const Eigen::MatrixXd& L) {
  const double value =
      LogDetSpd(L + Eigen::MatrixXd::Identity(L.rows(), L.cols()));
  if (!std::isfinite(value)) Throw(ErrorKind::kNumeric, "L + I is not positive definite");
  return value;
}

double NormalizerLogDet(const DppKernel& kernel) { return NormalizerLogDet(kernel.L()); }

double LogProb(const Eigen::MatrixXd& L, std::span<const std::size_t> subset) {
  return LogDetSubset(L, subset) - NormalizerLogDet(L);
}

double LogProb(const DppKernel& kernel, std::span<const std::size_t> subset) {
  CheckSubset(kernel.ground_size(), subset);
  // logdet(L_y) = logdet(S_y) + 2 * sum log q_i, which stays accurate when
  // qualities sit at the floor.
  Eigen::MatrixXd phi_y(kernel.phi().rows(), static_cast<Eigen::Index>(subset.size()));
  double log_quality = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    phi_y.col(static_cast<Eigen::Index>(a)) = kernel.phi().col(subset[a]);
    log_quality += std::log(kernel.quality()[subset[a]]);
  }
  const double logdet_s = LogDetSpd(phi_y.transpose() * phi_y);
  if (logdet_s == kNegInf) return kNegInf;
  return logdet_s + 2.0 * log_quality - NormalizerLogDet(kernel);
}

Eigen::MatrixXd LogProbGradL(const Eigen::MatrixXd& L, std::span<const std::size_t> subset) {
  CheckSubset(static_cast<std::size_t>(L.rows()), subset);
  const auto n = L.rows();
  Eigen::MatrixXd grad = -SpdInverse(L + Eigen::MatrixXd::Identity(n, n), "L + I");
  if (!subset.empty()) {
    const Eigen::MatrixXd inv_y = SpdInverse(Principal(L, subset), "L_y");
    for (std::size_t a = 0; a < subset.size(); ++a) {
      for (std::size_t b = 0; b < subset.size(); ++b) {
        grad(subset[a], subset[b]) += inv_y(a, b);
      }
    }
  }
  return grad;
}

KernelGradient LogProbGradDecomposed(const DppKernel& kernel,
                                     std::span<const std::size_t> subset) {
  CheckSubset(kernel.ground_size(), subset);
  const Eigen::MatrixXd& phi = kernel.phi();
  const Eigen::VectorXd& q = kernel.quality();
  const Eigen::MatrixXd sim = kernel.similarity();
  const auto n = phi.cols();

  KernelGradient grad;
  const Eigen::MatrixXd A =
      SpdInverse(q.asDiagonal() * sim * q.asDiagonal() + Eigen::MatrixXd::Identity(n, n), "L + I");
  // Normalizer term: d/dS = Q A Q, d/dq_k = 2 sum_j A_kj S_kj q_j.
  const Eigen::MatrixXd qaq = q.asDiagonal() * A * q.asDiagonal();
  grad.d_phi = -2.0 * phi * qaq;
  grad.d_quality = -2.0 * (A.cwiseProduct(sim) * q);

  if (!subset.empty()) {
    const auto k = static_cast<Eigen::Index>(subset.size());
    Eigen::MatrixXd phi_y(phi.rows(), k);
    for (Eigen::Index a = 0; a < k; ++a) phi_y.col(a) = phi.col(subset[a]);
    const Eigen::MatrixXd inv_s = SpdInverse(phi_y.transpose() * phi_y, "Phi_y^T Phi_y");
    const Eigen::MatrixXd d_phi_y = 2.0 * phi_y * inv_s;
    for (Eigen::Index a = 0; a < k; ++a) {
      grad.d_phi.col(subset[a]) += d_phi_y.col(a);
      grad.d_quality[subset[a]] += 2.0 / q[subset[a]];
    }
  }
  return grad;
}

Subset GreedyMap(const Eigen::MatrixXd& L, const GreedyOptions& options) {
  const auto n = static_cast<std::size_t>(L.rows());
  if (L.rows() != L.cols()) Throw(ErrorKind::kShape, "kernel must be square");
  const std::size_t limit = options.max_size.value_or(n);
  if (limit > n) Throw(ErrorKind::kConfig, "max_size exceeds ground set size");
  return options.update == GreedyUpdate::kIncrementalCholesky
             ? GreedyIncremental(L, limit, options.stop)
             : GreedyRecompute(L, limit, options.stop);
}

Subset GreedyMap(const DppKernel& kernel, const GreedyOptions& options) {
  return GreedyMap(kernel.L(), options);
}

}  // namespace mdpp
