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

#include <random>

#include <gtest/gtest.h>

#include "mdpp/evaluation.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mdpp {
namespace {

using testing::KindOf;

Summary Range(std::size_t view, std::size_t begin, std::size_t end) {
  std::vector<Selection> s;
  for (std::size_t t = begin; t < end; ++t) s.push_back({view, t});
  return Summary::FromSelections("f", std::move(s), 0.15);
}

MultiViewSequence RandomSequence(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(m * n * 4);
  for (double& v : values) v = normal(rng);
  return MultiViewSequence("r", m, n, 4, std::move(values));
}

TEST(FrameF1, IdenticalOverlapDisjoint) {
  const PrfScore same = FrameF1(Range(0, 1, 11), Range(0, 1, 11));
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.f1, 1.0);
  const PrfScore half = FrameF1(Range(0, 6, 16), Range(0, 1, 11));
  EXPECT_EQ(half.precision, 0.5);
  EXPECT_EQ(half.recall, 0.5);
  EXPECT_EQ(half.f1, 0.5);
  const PrfScore none = FrameF1(Range(0, 0, 3), Range(1, 0, 3));
  EXPECT_EQ(none.f1, 0.0);
}

TEST(FrameF1, EmptySidesAreFlagged) {
  const Summary empty = Summary::FromSelections("f", {}, 0.15);
  EXPECT_FALSE(FrameF1(empty, Range(0, 0, 2)).precision_defined);
  EXPECT_FALSE(FrameF1(Range(0, 0, 2), empty).recall_defined);
  EXPECT_EQ(FrameF1(empty, Range(0, 0, 2)).f1, 0.0);
}

TEST(TolerantF1, ZeroIsExact) {
  const MultiViewSequence seq = RandomSequence(2, 20, 1);
  const Summary a = Range(0, 2, 9), b = Range(1, 5, 12);
  EXPECT_EQ(TolerantF1(a, b, seq, 0.0).f1, FrameF1(a, b).f1);
}

TEST(TolerantF1, DuplicatedViewsGiveFullCredit) {
  const MultiViewSequence one = RandomSequence(1, 10, 2);
  std::vector<double> values = one.values();
  values.insert(values.end(), one.values().begin(), one.values().end());
  const MultiViewSequence dup("d", 2, 10, 4, std::move(values));
  const Summary pred = Range(1, 0, 5), truth = Range(0, 0, 5);
  EXPECT_EQ(TolerantF1(pred, truth, dup, 0.0).f1, 0.0);
  EXPECT_EQ(TolerantF1(pred, truth, dup, 0.1).f1, 1.0);
}

TEST(TolerantF1, MonotoneInTau) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + rng() % 3, n = 10 + rng() % 10;
    const MultiViewSequence seq = RandomSequence(m, n, rng());
    std::vector<Selection> p, t;
    for (std::size_t v = 0; v < m; ++v) {
      for (std::size_t s = 0; s < n; ++s) {
        if (rng() % 4 == 0) p.push_back({v, s});
        if (rng() % 4 == 0) t.push_back({v, s});
      }
    }
    const Summary pred = Summary::FromSelections("r", p, 0.15);
    const Summary truth = Summary::FromSelections("r", t, 0.15);
    double last = -1.0;
    for (double tau : kDefaultThresholds) {
      const double f1 = TolerantF1(pred, truth, seq, tau).f1;
      EXPECT_GE(f1, last);
      last = f1;
    }
  }
}

AnnotationSet Users(std::vector<std::vector<Selection>> selections) {
  AnnotationSet a;
  a.sequence_id = "f";
  a.stage = 2;
  for (std::size_t u = 0; u < selections.size(); ++u) a.users.push_back({"u" + std::to_string(u), selections[u]});
  return a;
}

TEST(Consensus, Fixtures) {
  const auto a = Range(0, 0, 10).selections;
  const auto b = Range(0, 5, 15).selections;
  EXPECT_EQ(PairwiseConsensus(Users({a, a, a})), 1.0);
  EXPECT_EQ(PairwiseConsensus(Users({a, Range(1, 0, 10).selections})), 0.0);
  // Pairwise F1s: (a, a) = 1, (a, b) = 0.5, (a, b) = 0.5.
  EXPECT_NEAR(PairwiseConsensus(Users({a, a, b})), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(PairwiseConsensus(Users({{}, {}})), 1.0);
  EXPECT_EQ(KindOf([&] { PairwiseConsensus(Users({a})); }), ErrorKind::kValidation);
}

TEST(Oracle, SharedShotWinsWithOneShotBudget) {
  // Shots A = [0,2), B = [2,4), C = [4,6) on one view.
  const ShotList shots = ShotList::Uniform(6, 2);
  const auto users = Users({{{0, 0}, {0, 1}, {0, 2}, {0, 3}}, {{0, 0}, {0, 1}, {0, 4}, {0, 5}}});
  const OracleResult r = OracleSummary(users, {1, 6}, std::span(&shots, 1), {2});
  EXPECT_EQ(r.summary.selections, Range(0, 0, 2).selections);
  ASSERT_EQ(r.steps.size(), 1U);
  EXPECT_EQ(r.steps[0].shot, 0U);
}

TEST(Oracle, SingleUserIsRecoveredWithEnoughBudget) {
  const ShotList shots = ShotList::Uniform(12, 3);
  std::vector<Selection> user;
  for (std::size_t t : {3, 4, 5, 9, 10, 11}) user.push_back({1, t});
  const auto users = Users({user});
  const OracleResult r = OracleSummary(users, {2, 12}, std::span(&shots, 1), {6});
  EXPECT_EQ(MeanF1AgainstUsers(r.summary, users), 1.0);
  const OracleResult small = OracleSummary(users, {2, 12}, std::span(&shots, 1), {3});
  EXPECT_EQ(small.summary.num_frames(), 3U);
}

TEST(Oracle, OneShotBudgetMatchesExhaustiveBestShot) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng() % 3, n = 12, len = 3;
    const ShotList shots = ShotList::Uniform(n, len);
    std::vector<std::vector<Selection>> picks(1 + rng() % 3);
    for (auto& p : picks) {
      for (std::size_t v = 0; v < m; ++v) {
        for (std::size_t t = 0; t < n; ++t) {
          if (rng() % 3 == 0) p.push_back({v, t});
        }
      }
    }
    const AnnotationSet users = Users(picks);
    double best = 0.0;
    for (std::size_t s = 0; s < shots.num_shots(); ++s) {
      for (std::size_t v = 0; v < m; ++v) {
        const auto cand = Range(v, shots.begin(s), shots.end(s)).selections;
        double mean = 0.0;
        for (const auto& p : picks) mean += testing::SetF1(cand, p);
        best = std::max(best, mean / static_cast<double>(picks.size()));
      }
    }
    const OracleResult r = OracleSummary(users, {m, n}, std::span(&shots, 1), {len});
    if (best == 0.0) {
      EXPECT_TRUE(r.summary.selections.empty());
      continue;
    }
    ASSERT_EQ(r.summary.num_frames(), len);
    EXPECT_NEAR(MeanF1AgainstUsers(r.summary, users), best, 1e-12) << "trial " << trial;
  }
}

TEST(Oracle, PerViewShotLists) {
  const std::vector<ShotList> shots = {ShotList::Uniform(8, 4), ShotList::FromEnds({2, 8}, 8)};
  const auto users = Users({{{1, 0}, {1, 1}}});
  const OracleResult r = OracleSummary(users, {2, 8}, shots, {2});
  EXPECT_EQ(r.summary.selections, Range(1, 0, 2).selections);
  const std::vector<ShotList> wrong = {ShotList::Uniform(8, 4), ShotList::Uniform(8, 4), ShotList::Uniform(8, 4)};
  EXPECT_EQ(KindOf([&] { OracleSummary(users, {2, 8}, wrong, {2}); }), ErrorKind::kShape);
}

TEST(Report, AggregatesWithEqualWeight) {
  const MultiViewSequence seq = RandomSequence(1, 20, 5);
  std::vector<SequenceEval> evals = {EvaluateSequence(Range(0, 0, 4), Range(0, 0, 4), seq),
                                     EvaluateSequence(Range(0, 0, 4), Range(0, 10, 14), seq)};
  const EvalReport report = Aggregate(evals);
  EXPECT_EQ(report.f1, 0.5);
  EXPECT_EQ(report.tolerant_f1.size(), 4U);
  const std::string text = ReportToText(report);
  EXPECT_NE(text.find("MEAN\t"), std::string::npos);
  EXPECT_NE(text.find("f1@0.1"), std::string::npos);
  EXPECT_NE(ThresholdCurveToText(report).find("tau\tf1"), std::string::npos);
}

}  // namespace
}  // namespace mdpp
