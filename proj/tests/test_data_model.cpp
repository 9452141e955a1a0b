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

#include <cstring>
#include <functional>
#include <limits>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "mdpp/data_model.hpp"
#include "mdpp/error.hpp"
#include "test_util.hpp"

namespace mdpp {
namespace {

using testing::KindOf;

std::vector<std::uint8_t> Header(std::uint32_t m, std::uint32_t n, std::uint32_t d) {
  std::vector<std::uint8_t> out = {'M', 'D', 'V', '1'};
  for (std::uint32_t v : {m, n, d}) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  return out;
}

void AppendFloat(std::vector<std::uint8_t>& bytes, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

MultiViewSequence RandomSequence(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  const std::size_t m = dim(rng), n = dim(rng) * 3, d = dim(rng);
  std::normal_distribution<float> normal(0.0F, 2.0F);
  std::vector<double> values(m * n * d);
  for (double& v : values) v = normal(rng);
  return MultiViewSequence("s" + std::to_string(seed), m, n, d, std::move(values));
}

TEST(FeatureFile, DecodesHeaderDimensions) {
  auto bytes = Header(2, 3, 4);
  for (int i = 0; i < 24; ++i) AppendFloat(bytes, static_cast<float>(i) * 0.5F);
  const MultiViewSequence s = DecodeFeatures(bytes, "x");
  EXPECT_EQ(s.num_views(), 2U);
  EXPECT_EQ(s.num_steps(), 3U);
  EXPECT_EQ(s.feature_dim(), 4U);
  // view 1, t 2, dim 3 is the last value.
  EXPECT_DOUBLE_EQ(s.feature(1, 2)[3], 11.5);
  EXPECT_DOUBLE_EQ(s.view_matrix(0)(1, 2), 4.5);
}

TEST(FeatureFile, TruncatedPayloadIsLengthError) {
  auto bytes = Header(2, 3, 4);
  for (int i = 0; i < 20; ++i) AppendFloat(bytes, 1.0F);
  EXPECT_EQ(KindOf([&] { DecodeFeatures(bytes); }), ErrorKind::kLength);
}

TEST(FeatureFile, RejectsBadMagicNonFiniteAndTrailingBytes) {
  auto bad = Header(1, 1, 1);
  bad[0] = 'X';
  AppendFloat(bad, 1.0F);
  EXPECT_EQ(KindOf([&] { DecodeFeatures(bad); }), ErrorKind::kFormat);

  auto nan = Header(1, 1, 1);
  AppendFloat(nan, std::numeric_limits<float>::quiet_NaN());
  EXPECT_EQ(KindOf([&] { DecodeFeatures(nan); }), ErrorKind::kData);

  auto trailing = Header(1, 1, 1);
  AppendFloat(trailing, 1.0F);
  trailing.push_back(0);
  EXPECT_EQ(KindOf([&] { DecodeFeatures(trailing); }), ErrorKind::kFormat);
  AppendFloat(trailing, 1.0F);
  EXPECT_EQ(KindOf([&] { DecodeFeatures(trailing); }), ErrorKind::kFormat);
}

TEST(FeatureFile, RoundTripOverRandomSeeds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MultiViewSequence s = RandomSequence(seed);
    EXPECT_EQ(DecodeFeatures(EncodeFeatures(s), s.sequence_id()), s) << "seed " << seed;
  }
}

TEST(FeatureFile, WriteThenReadUsesStemAsId) {
  const auto dir = std::filesystem::temp_directory_path() / "mdpp_dm_test";
  std::filesystem::create_directories(dir);
  const MultiViewSequence s = RandomSequence(7);
  WriteFeatureFile(s, dir / "clip.mdv");
  const MultiViewSequence back = ReadFeatureFile(dir / "clip.mdv");
  EXPECT_EQ(back.sequence_id(), "clip");
  EXPECT_EQ(back.values(), s.values());
  std::filesystem::remove_all(dir);
}

TEST(Sequence, ConstructorValidatesSizes) {
  EXPECT_EQ(KindOf([] { MultiViewSequence("a", 2, 2, 2, std::vector<double>(7)); }),
            ErrorKind::kLength);
  EXPECT_EQ(KindOf([] { MultiViewSequence("a", 0, 2, 2, {}); }), ErrorKind::kShape);
}

TEST(Sequence, SelectViewsReorders) {
  const MultiViewSequence s = RandomSequence(3);
  if (s.num_views() < 2) GTEST_SKIP();
  const std::vector<std::size_t> order = {1, 0};
  const MultiViewSequence p = s.select_views(order);
  EXPECT_EQ(p.view_matrix(0), s.view_matrix(1));
  EXPECT_EQ(p.view_matrix(1), s.view_matrix(0));
}

AnnotationSet TwoUsers() {
  AnnotationSet a;
  a.sequence_id = "seq";
  a.stage = 2;
  a.users = {{"u1", {{0, 1}, {1, 2}}}, {"u2", {{2, 5}}}};
  return a;
}

TEST(Annotations, ParsesTwoUsers) {
  const AnnotationSet a = AnnotationsFromText(AnnotationsToText(TwoUsers()), SequenceShape{3, 10});
  ASSERT_EQ(a.users.size(), 2U);
  EXPECT_EQ(a.stage, 2);
  EXPECT_EQ(a.users[1].selections.front(), (Selection{2, 5}));
}

TEST(Annotations, ViewOutOfRangeIsIndexError) {
  AnnotationSet a = TwoUsers();
  a.users[0].selections.push_back({3, 0});
  EXPECT_EQ(KindOf([&] { a.validate(SequenceShape{3, 10}); }), ErrorKind::kIndex);
}

TEST(Annotations, DuplicatesAndStageOneViewsAreRejected) {
  AnnotationSet dup = TwoUsers();
  dup.users[0].selections.push_back({0, 1});
  EXPECT_EQ(KindOf([&] { dup.validate(); }), ErrorKind::kValidation);
  AnnotationSet stage1 = TwoUsers();
  stage1.stage = 1;
  EXPECT_EQ(KindOf([&] { stage1.validate(); }), ErrorKind::kValidation);
}

TEST(Annotations, RandomRoundTrip) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    AnnotationSet a;
    a.sequence_id = "r" + std::to_string(trial);
    a.stage = 2 + trial % 2;
    const std::size_t users = 1 + rng() % 4;
    for (std::size_t u = 0; u < users; ++u) {
      UserAnnotation user{"user" + std::to_string(u), {}};
      for (std::size_t t = 0; t < 30; ++t) {
        for (std::size_t v = 0; v < 3; ++v) {
          if (rng() % 5 == 0) user.selections.push_back({v, t});
        }
      }
      a.users.push_back(std::move(user));
    }
    EXPECT_EQ(AnnotationsFromText(AnnotationsToText(a), SequenceShape{3, 30}), a);
  }
}

TEST(Annotations, MalformedTextIsFormatError) {
  EXPECT_EQ(KindOf([] { AnnotationsFromText("{not json"); }), ErrorKind::kFormat);
  EXPECT_EQ(KindOf([] { AnnotationsFromText(R"({"format":"mdpp-summary"})"); }), ErrorKind::kFormat);
}

TEST(SummaryText, RoundTripSortsAndDeduplicates) {
  const Summary s = Summary::FromSelections("q", {{1, 4}, {0, 4}, {2, 1}, {0, 4}}, 0.2);
  ASSERT_EQ(s.num_frames(), 3U);
  EXPECT_EQ(s.selections[0], (Selection{2, 1}));
  EXPECT_EQ(s.selections[1], (Selection{0, 4}));
  EXPECT_TRUE(s.contains({1, 4}));
  EXPECT_FALSE(s.contains({1, 1}));
  EXPECT_EQ(SummaryFromText(SummaryToText(s)), s);
}

TEST(Shots, UniformAndLookup) {
  const ShotList shots = ShotList::Uniform(10, 4);
  EXPECT_EQ(shots.ends, (std::vector<std::size_t>{4, 8, 10}));
  EXPECT_EQ(shots.shot_of(0), 0U);
  EXPECT_EQ(shots.shot_of(8), 2U);
  EXPECT_EQ(shots.length(2), 2U);
  EXPECT_EQ(KindOf([] { ShotList::FromEnds({3, 3, 5}, 5); }), ErrorKind::kValidation);
}

TEST(Budget, CeilingWithoutFloatingNoise) {
  EXPECT_EQ(FrameBudget(0.15, 300), 45U);
  EXPECT_EQ(FrameBudget(0.15, 10), 2U);
  EXPECT_EQ(FrameBudget(1.0, 7), 7U);
  EXPECT_EQ(KindOf([] { FrameBudget(0.0, 7); }), ErrorKind::kConfig);
}

}  // namespace
}  // namespace mdpp
