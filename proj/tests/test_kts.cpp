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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mdpp/kts.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mdpp {
namespace {

using testing::KindOf;

Eigen::MatrixXd Row(std::initializer_list<double> values) {
  Eigen::MatrixXd out(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) out(0, i++) = v;
  return out;
}

TEST(SegmentCost, ConstantSegmentIsZero) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(3, 6, 0.7);
  EXPECT_NEAR(SegmentCost(x, 1, 5), 0.0, 1e-12);
  EXPECT_NEAR(ScatterTable(x).cost(1, 5), 0.0, 1e-12);
}

TEST(SegmentCost, TwoHalvesArePositive) {
  const Eigen::MatrixXd x = Row({0, 0, 0, 5, 5, 5});
  EXPECT_GT(SegmentCost(x, 0, 6), 0.0);
  EXPECT_NEAR(SegmentCost(x, 0, 6), 6 * 2.5 * 2.5, 1e-12);
}

TEST(SegmentCost, MatchesScatterAboutMean) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(4, 20);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  const ScatterTable table(x);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t a = rng() % 19;
    const std::size_t b = a + 1 + rng() % (20 - a);
    const double expected = testing::Scatter(x, a, b);
    EXPECT_NEAR(SegmentCost(x, a, b), expected, 1e-9);
    EXPECT_NEAR(table.cost(a, b), expected, 1e-9);
  }
}

TEST(SegmentCost, EmptySegmentIsIndexError) {
  const Eigen::MatrixXd x = Row({1, 2, 3});
  EXPECT_EQ(KindOf([&] { SegmentCost(x, 2, 2); }), ErrorKind::kIndex);
  EXPECT_EQ(KindOf([&] { SegmentCost(x, 0, 4); }), ErrorKind::kIndex);
}

TEST(Kts, StepFunctionSplitsOnce) {
  KtsOptions options;
  options.max_segments = 4;
  options.penalty = 0.01;
  const SegmentationResult r = Kts(Row({0, 0, 0, 5, 5, 5}), options);
  EXPECT_EQ(r.change_points, (std::vector<std::size_t>{3}));
  EXPECT_NEAR(r.objective, 0.0, 1e-12);
  EXPECT_EQ(r.to_shots().ends, (std::vector<std::size_t>{3, 6}));
}

TEST(Kts, ConstantSequenceHasNoChangePoints) {
  for (double penalty : {1e-6, 0.5, 10.0}) {
    KtsOptions options;
    options.penalty = penalty;
    EXPECT_TRUE(Kts(Eigen::MatrixXd::Constant(2, 30, 1.5), options).change_points.empty());
  }
}

TEST(Kts, DynamicProgramMatchesExhaustiveSearch) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    const std::size_t max_changes = std::min<std::size_t>(3, n - 1);
    Eigen::MatrixXd x(1 + rng() % 3, static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    const SegmentationTable table = OptimalSegmentations(x, max_changes);
    ASSERT_EQ(table.objective.size(), max_changes + 1);
    for (std::size_t m = 0; m <= max_changes; ++m) {
      const double brute = testing::BestSegmentationByEnumeration(x, m);
      EXPECT_NEAR(table.objective[m], brute, 1e-9 * std::max(1.0, brute)) << "n=" << n << " m=" << m;
      // The reported boundaries realize the reported objective.
      double realized = 0.0;
      std::size_t begin = 0;
      for (std::size_t c : table.change_points[m]) {
        realized += testing::Scatter(x, begin, c);
        begin = c;
      }
      realized += testing::Scatter(x, begin, n);
      EXPECT_NEAR(realized, table.objective[m], 1e-9 * std::max(1.0, brute));
    }
  }
}

TEST(Kts, ForcedSegmentCount) {
  KtsOptions options;
  options.num_segments = 3;
  const SegmentationResult r = Kts(Row({0, 0, 4, 4, 9, 9, 9}), options);
  EXPECT_EQ(r.change_points, (std::vector<std::size_t>{2, 4}));
}

TEST(Kts, PenaltyFormula) {
  EXPECT_EQ(KtsPenalty(0, 10), 0.0);
  EXPECT_NEAR(KtsPenalty(2, 10), 2.0 * (std::log(5.0) + 1.0), 1e-15);
}

TEST(Kts, RejectsBadOptions) {
  KtsOptions options;
  options.max_segments = 0;
  EXPECT_EQ(KindOf([&] { Kts(Row({1, 2}), options); }), ErrorKind::kConfig);
}

}  // namespace
}  // namespace mdpp
