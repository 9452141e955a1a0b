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

#ifndef MDPP_SUMMARIZER_HPP_
#define MDPP_SUMMARIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mdpp/data_model.hpp"
#include "mdpp/encoder.hpp"
#include "mdpp/kts.hpp"

namespace mdpp {

struct SummaryBudget {
  double fraction = 0.15;
  KtsOptions segmentation;

  // ceil(fraction * N), N being one view's length.
  std::size_t frame_budget(std::size_t num_steps) const { return FrameBudget(fraction, num_steps); }
};

// A scored shot [begin, end) on one view.
struct KeyShot {
  std::size_t view = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  double score = 0.0;

  std::size_t length() const { return end - begin; }
  friend bool operator==(const KeyShot&, const KeyShot&) = default;
};

struct SummaryResult {
  Summary summary;
  std::vector<KeyShot> shots;  // chosen shots
};

// Exact 0/1 knapsack: maximize the total score with total length <= budget.
// Among optimal sets the one that includes earlier items is preferred
// (scores within 1e-12 relative count as equal). Returns sorted indices.
std::vector<std::size_t> KnapsackItems(std::span<const std::size_t> lengths,
                                       std::span<const double> scores, std::size_t budget);
std::vector<std::size_t> KnapsackShots(const ShotList& shots, std::size_t budget);

// Segments every view, scores each shot by its mean quality, and runs one
// knapsack over the pooled shots of all views.
SummaryResult SummarizeFromScores(const MultiViewSequence& sequence, const Eigen::MatrixXd& scores,
                                  const SummaryBudget& budget,
                                  std::optional<std::size_t> frame_budget = std::nullopt);

SummaryResult SummarizeSupervised(const ModelParams& params, const MultiViewSequence& sequence,
                                  const SummaryBudget& budget = {},
                                  std::optional<std::size_t> frame_budget = std::nullopt);

// Greedy MAP of the unit-quality joint kernel over time-steps, picking at each
// step the view closest to the pooled feature and expanding picks to shots.
struct UnsupervisedResult {
  SummaryResult result;
  Subset steps;  // greedy picks, in pick order
};
UnsupervisedResult SummarizeUnsupervised(const MultiViewSequence& sequence,
                                         const SummaryBudget& budget = {},
                                         std::optional<std::size_t> frame_budget = std::nullopt);

// Summarizes a single-view stream under an explicit frame budget.
using StreamSummarizer =
    std::function<std::vector<KeyShot>(const MultiViewSequence& stream, std::size_t frame_budget)>;

StreamSummarizer SupervisedStreamSummarizer(const ModelParams& params, SummaryBudget budget = {});
StreamSummarizer UnsupervisedStreamSummarizer(SummaryBudget budget = {});

// Concatenates views along time, summarizes the single long stream, and maps
// frames back to (view, t).
Summary BaselineMergeViews(const StreamSummarizer& summarizer, const MultiViewSequence& sequence,
                           double fraction);

// Summarizes each view at the full budget, then keeps the highest scoring
// shots of the union that fit the budget.
Summary BaselineMergeSummaries(const StreamSummarizer& summarizer,
                               const MultiViewSequence& sequence, double fraction);

// frame_budget distinct (view, t) pairs drawn uniformly.
Summary BaselineRandom(const MultiViewSequence& sequence, double fraction, std::uint64_t seed);

Summary SummaryFromShots(const std::string& sequence_id, std::span<const KeyShot> shots,
                         double fraction);

}  // namespace mdpp

#endif  // MDPP_SUMMARIZER_HPP_
