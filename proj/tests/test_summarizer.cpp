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
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "mdpp/evaluation.hpp"
#include "mdpp/summarizer.hpp"
#include "mdpp/synthgen.hpp"
#include "oracles.hpp"

namespace mdpp {
namespace {

// Features that are constant on blocks of `block` steps, a different unit
// direction per block and per view.
MultiViewSequence Blocky(std::size_t m, std::size_t n, std::size_t block) {
  const std::size_t d = 8;
  std::vector<double> values;
  for (std::size_t v = 0; v < m; ++v) {
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k < d; ++k) values.push_back(k == (t / block + v) % d ? 1.0 : 0.0);
    }
  }
  return MultiViewSequence("blocky", m, n, d, std::move(values));
}

TEST(Knapsack, TopScoresThatFit) {
  const std::vector<std::size_t> lengths = {3, 3, 3};
  const std::vector<double> scores = {0.9, 0.1, 0.5};
  EXPECT_EQ(KnapsackItems(lengths, scores, 6), (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(KnapsackItems(lengths, scores, 0).empty());
  ShotList shots = ShotList::FromEnds({3, 6, 9}, 9);
  shots.scores = scores;
  EXPECT_EQ(KnapsackShots(shots, 6), (std::vector<std::size_t>{0, 2}));
}

TEST(Knapsack, TiesPreferEarlierItems) {
  const std::vector<std::size_t> lengths = {2, 2, 2};
  const std::vector<double> scores = {0.5, 0.5, 0.5};
  EXPECT_EQ(KnapsackItems(lengths, scores, 4), (std::vector<std::size_t>{0, 1}));
}

TEST(Knapsack, MatchesBruteForce) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 15;
    std::vector<std::size_t> lengths(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
      lengths[i] = 1 + rng() % 8;
      scores[i] = score(rng);
    }
    const std::size_t budget = rng() % 30;
    const auto chosen = KnapsackItems(lengths, scores, budget);
    std::size_t used = 0;
    double value = 0.0;
    for (std::size_t i : chosen) {
      used += lengths[i];
      value += scores[i];
    }
    const auto brute = testing::KnapsackByEnumeration(lengths, scores, budget);
    EXPECT_LE(used, budget);
    EXPECT_NEAR(value, brute.value, 1e-12) << "trial " << trial;
  }
}

TEST(Supervised, PlantedScoresPickTheirWindow) {
  const MultiViewSequence seq = Blocky(2, 60, 6);
  Eigen::MatrixXd scores = Eigen::MatrixXd::Constant(2, 60, 0.05);
  scores.block(1, 12, 1, 6).setConstant(0.95);
  SummaryBudget budget;
  budget.fraction = 0.1;  // 6 frames
  const SummaryResult r = SummarizeFromScores(seq, scores, budget);
  ASSERT_EQ(r.summary.num_frames(), 6U);
  for (std::size_t t = 12; t < 18; ++t) EXPECT_TRUE(r.summary.contains({1, t}));
}

TEST(Supervised, FullBudgetSingleViewTakesEverything) {
  const MultiViewSequence seq = Blocky(1, 40, 5);
  const ModelParams params = ModelParams::Init({8, 4, 4}, 3);
  SummaryBudget budget;
  budget.fraction = 1.0;
  EXPECT_EQ(SummarizeSupervised(params, seq, budget).summary.num_frames(), 40U);
}

TEST(Supervised, DuplicatedViewsPreferLowerView) {
  const MultiViewSequence one = Blocky(1, 30, 5);
  std::vector<double> values = one.values();
  values.insert(values.end(), one.values().begin(), one.values().end());
  const MultiViewSequence two("dup", 2, 30, 8, std::move(values));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  Eigen::MatrixXd scores(2, 30);
  for (Eigen::Index t = 0; t < 30; ++t) scores(0, t) = scores(1, t) = u(rng);
  SummaryBudget budget;
  budget.fraction = 0.15;  // 5 frames: room for one shot
  const SummaryResult r = SummarizeFromScores(two, scores, budget);
  ASSERT_EQ(r.shots.size(), 1U);
  // Equal-valued copies tie; the earlier (view 0) item wins every tie.
  for (const auto& s : r.summary.selections) EXPECT_EQ(s.view, 0U);
}

TEST(Unsupervised, OrthogonalFramesInIndexOrder) {
  std::vector<double> values;
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t k = 0; k < 6; ++k) values.push_back(k == t ? 1.0 : 0.0);
  }
  const MultiViewSequence seq("orth", 1, 6, 6, std::move(values));
  const UnsupervisedResult r = SummarizeUnsupervised(seq, {}, 3);
  EXPECT_EQ(r.steps, (Subset{0, 1, 2}));
}

TEST(Unsupervised, OnePickPerCluster) {
  // Two tight clusters of 5 steps each; the size-2 greedy pick must take one
  // from each, as does the exhaustive best pair.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> values;
  for (std::size_t t = 0; t < 10; ++t) {
    values.push_back((t < 5 ? 1.0 : 0.0) + noise(rng));
    values.push_back((t < 5 ? 0.0 : 1.0) + noise(rng));
    values.push_back(0.1 + noise(rng));
  }
  const MultiViewSequence seq("two", 1, 10, 3, values);
  const UnsupervisedResult r = SummarizeUnsupervised(seq, {}, 2);
  ASSERT_EQ(r.steps.size(), 2U);
  EXPECT_NE(r.steps[0] < 5, r.steps[1] < 5);

  Eigen::MatrixXd unit = seq.view_matrix(0);
  unit.colwise().normalize();
  const Eigen::MatrixXd L = unit.transpose() * unit;
  double best = -1.0;
  std::pair<std::size_t, std::size_t> pair;
  for (std::size_t a = 0; a < 10; ++a) {
    for (std::size_t b = a + 1; b < 10; ++b) {
      const double det = L(a, a) * L(b, b) - L(a, b) * L(b, a);
      if (det > best) best = det, pair = {a, b};
    }
  }
  EXPECT_NE(pair.first < 5, pair.second < 5);
}

TEST(Unsupervised, ViewPermutationKeepsTimeSteps) {
  SynthConfig c;
  c.num_views = 3;
  c.num_steps = 80;
  c.num_events = 2;
  c.min_event_length = 4;
  c.max_event_length = 5;
  c.seed = 6;
  const MultiViewSequence seq = Generate(c).sequence;
  const std::vector<std::size_t> order = {2, 0, 1};
  Subset a = SummarizeUnsupervised(seq).steps;
  Subset b = SummarizeUnsupervised(seq.select_views(order)).steps;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(Baselines, RandomIsReproducibleAndSized) {
  const MultiViewSequence seq = Blocky(3, 100, 10);
  const Summary a = BaselineRandom(seq, 0.15, 42);
  EXPECT_EQ(a, BaselineRandom(seq, 0.15, 42));
  EXPECT_EQ(a.num_frames(), 15U);
  EXPECT_NE(a, BaselineRandom(seq, 0.15, 43));
}

TEST(Baselines, MergeViewsOnOneViewIsThePlainPipeline) {
  const MultiViewSequence seq = Blocky(1, 50, 5);
  const Summary merged = BaselineMergeViews(UnsupervisedStreamSummarizer(), seq, 0.15);
  EXPECT_EQ(merged, SummarizeUnsupervised(seq).result.summary);
}

TEST(Baselines, MergeViewsMapsBackToViews) {
  const MultiViewSequence seq = Blocky(3, 40, 4);
  const Summary merged = BaselineMergeViews(UnsupervisedStreamSummarizer(), seq, 0.25);
  EXPECT_LE(merged.num_frames(), 10U);
  for (const auto& s : merged.selections) {
    EXPECT_LT(s.view, 3U);
    EXPECT_LT(s.t, 40U);
  }
}

TEST(Baselines, MergeSummariesRecoversEventsOnBothViews) {
  SynthConfig c;
  c.num_views = 2;
  c.num_steps = 120;
  c.num_events = 2;
  c.min_event_length = 4;
  c.max_event_length = 6;
  c.seed = 3;
  SynthSequence s = Generate(c);
  // Make sure the two events sit on different views.
  for (std::uint64_t seed = 4; s.events[0].views == s.events[1].views; ++seed) {
    c.seed = seed;
    s = Generate(c);
  }
  // Scores: distance from the stream's dominant (background) direction.
  // A light penalty so KTS isolates the short events.
  SummaryBudget light;
  light.segmentation.penalty = 0.1;
  StreamSummarizer novelty = [light](const MultiViewSequence& stream, std::size_t frames) {
    Eigen::MatrixXd x = stream.view_matrix(0);
    x.colwise().normalize();
    const Eigen::VectorXd mean = x.rowwise().mean().normalized();
    Eigen::MatrixXd scores(1, x.cols());
    for (Eigen::Index t = 0; t < x.cols(); ++t) scores(0, t) = 1.0 - x.col(t).dot(mean);
    return SummarizeFromScores(stream, scores, light, frames).shots;
  };
  const Summary merged = BaselineMergeSummaries(novelty, s.sequence, 0.15);
  for (const auto& e : s.events) {
    for (std::size_t t = e.begin; t < e.end; ++t) EXPECT_TRUE(merged.contains({e.views[0], t}));
  }
}

}  // namespace
}  // namespace mdpp
