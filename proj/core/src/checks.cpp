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

#include "mdpp/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdpp/error.hpp"

namespace mdpp {
namespace {

Subset FromMask(std::uint64_t mask, std::size_t n) {
  Subset s;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask & (std::uint64_t{1} << i)) s.push_back(i);
  }
  return s;
}

double DetLu(const Eigen::MatrixXd& L, const Subset& s) {
  if (s.empty()) return 1.0;
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(s.size()));
  for (std::size_t a = 0; a < s.size(); ++a) {
    for (std::size_t b = 0; b < s.size(); ++b) sub(a, b) = L(s[a], s[b]);
  }
  return sub.partialPivLu().determinant();
}

}  // namespace

DppKernel RandomKernel(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> quality(0.05, 1.0);
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = normal(rng);
  Eigen::VectorXd q(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = quality(rng);
  return {std::move(phi), std::move(q)};
}

ViewStreams RandomStreams(std::size_t views, std::size_t steps, std::size_t dim,
                          std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> quality(0.2, 1.0);
  ViewStreams s;
  for (std::size_t m = 0; m < views; ++m) {
    Eigen::MatrixXd f(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(steps));
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = normal(rng);
    f.colwise().normalize();
    s.features.push_back(std::move(f));
  }
  s.quality.resize(static_cast<Eigen::Index>(views), static_cast<Eigen::Index>(steps));
  for (Eigen::Index i = 0; i < s.quality.size(); ++i) s.quality.data()[i] = quality(rng);
  return s;
}

double EnumeratedLogNormalizer(const Eigen::MatrixXd& L) {
  const auto n = static_cast<std::size_t>(L.rows());
  if (n > 20) Throw(ErrorKind::kConfig, "enumeration limited to N <= 20");
  double sum = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) sum += DetLu(L, FromMask(mask, n));
  return std::log(sum);
}

Subset EnumeratedMap(const Eigen::MatrixXd& L, std::optional<std::size_t> max_size) {
  const auto n = static_cast<std::size_t>(L.rows());
  if (n > 20) Throw(ErrorKind::kConfig, "enumeration limited to N <= 20");
  Subset best;
  double best_det = 1.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    Subset s = FromMask(mask, n);
    if (max_size && s.size() > *max_size) continue;
    const double det = DetLu(L, s);
    if (det > best_det) {
      best_det = det;
      best = std::move(s);
    }
  }
  return best;
}

CheckReport CheckDppNormalization(std::size_t max_n, std::size_t trials, std::uint64_t seed) {
  CheckReport report{"dpp-normalization", trials, 0.0, 1e-9, true};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(1, std::max<std::size_t>(1, max_n));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = size(rng);
    const DppKernel kernel = RandomKernel(n, n + 2, rng);
    const Eigen::MatrixXd L = kernel.L();
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      total += std::exp(LogProb(kernel, FromMask(mask, n)));
    }
    const double enumerated = EnumeratedLogNormalizer(L);
    report.max_error = std::max({report.max_error, std::abs(total - 1.0),
                                 std::abs(std::expm1(NormalizerLogDet(kernel) - enumerated))});
  }
  report.passed = report.max_error <= report.tolerance;
  return report;
}

CheckReport CheckGreedyModes(std::size_t n, std::size_t trials, std::uint64_t seed) {
  CheckReport report{"greedy-modes", trials, 0.0, 0.0, true};
  std::mt19937_64 rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const DppKernel kernel = RandomKernel(n, n, rng);
    for (GreedyStop stop : {GreedyStop::kNonNegativeGain, GreedyStop::kFixedSize}) {
      GreedyOptions fast{std::nullopt, stop, GreedyUpdate::kIncrementalCholesky};
      GreedyOptions slow{std::nullopt, stop, GreedyUpdate::kRecompute};
      if (GreedyMap(kernel, fast) != GreedyMap(kernel, slow)) report.max_error += 1.0;
    }
  }
  report.passed = report.max_error == 0.0;
  return report;
}

CheckReport CheckMultiDppInvariance(std::size_t trials, std::uint64_t seed) {
  CheckReport report{"multi-dpp-invariance", trials, 0.0, 1e-9, true};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> views(1, 4);
  std::uniform_int_distribution<std::size_t> steps(1, 8);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t m = views(rng);
    const std::size_t n = steps(rng);
    const ViewStreams streams = RandomStreams(m, n, 5, rng);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const ViewStreams permuted = streams.permuted(order);
    const Subset subset = FromMask(rng() & ((std::uint64_t{1} << n) - 1), n);
    const double a = MultiDppLogProb(streams, subset);
    const double b = MultiDppLogProb(permuted, subset);
    report.max_error = std::max(report.max_error, std::abs(a - b));
    // One view reduces to the plain DPP.
    ViewStreams single;
    single.features = {streams.features[0]};
    single.quality = streams.quality.topRows(1);
    const DppKernel direct(streams.features[0], streams.quality.row(0).transpose());
    const double s = MultiDppLogProb(single, subset);
    const double t = LogProb(direct, subset);
    if (s != t && (std::isfinite(s) || std::isfinite(t))) report.max_error = 1.0;
  }
  report.passed = report.max_error < report.tolerance;
  return report;
}

CheckReport CheckLossGradient(const LossOptions& options, std::uint64_t seed, double step) {
  CheckReport report{"loss-gradient", 0, 0.0, 1e-4, true};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t m = 2, n = 6, d = 3;
  std::vector<double> values(m * n * d);
  for (double& v : values) v = normal(rng);
  const MultiViewSequence sequence("grad-check", m, n, d, values);
  TrainingTarget target;
  target.views = Eigen::MatrixXd::Zero(2, 6);
  target.views(0, 1) = target.views(1, 3) = target.views(0, 4) = 1.0;
  target.steps = {1, 3, 4};
  ModelParams params = ModelParams::Init({d, 4, 3}, seed);
  const LossResult analytic = LossAndGrad(params, sequence, target, options);
  auto w = params.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double saved = w[i];
    w[i] = saved + step;
    const double up = Loss(params, sequence, target, options);
    w[i] = saved - step;
    const double down = Loss(params, sequence, target, options);
    w[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic.grad.weights()[i];
    const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-3});
    report.max_error = std::max(report.max_error, err);
    ++report.trials;
  }
  report.passed = report.max_error < report.tolerance;
  return report;
}

}  // namespace mdpp
