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

#include "mdpp/summarizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "mdpp/dpp.hpp"
#include "mdpp/error.hpp"

namespace mdpp {
namespace {

bool NearlyEqualOrAbove(double candidate, double target) {
  return candidate >= target - 1e-12 * std::max(1.0, std::abs(target));
}

std::vector<KeyShot> PooledShots(const MultiViewSequence& sequence, const Eigen::MatrixXd& scores,
                                 const KtsOptions& segmentation) {
  std::vector<KeyShot> pool;
  for (std::size_t v = 0; v < sequence.num_views(); ++v) {
    const ShotList shots = Kts(sequence.view_matrix(v), segmentation).to_shots();
    for (std::size_t s = 0; s < shots.num_shots(); ++s) {
      KeyShot shot{v, shots.begin(s), shots.end(s), 0.0};
      double sum = 0.0;
      for (std::size_t t = shot.begin; t < shot.end; ++t) {
        sum += scores(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(t));
      }
      shot.score = sum / static_cast<double>(shot.length());
      pool.push_back(shot);
    }
  }
  return pool;
}

std::vector<KeyShot> SelectByKnapsack(const std::vector<KeyShot>& pool, std::size_t budget) {
  std::vector<std::size_t> lengths;
  std::vector<double> values;
  for (const auto& s : pool) {
    lengths.push_back(s.length());
    values.push_back(s.score);
  }
  std::vector<KeyShot> chosen;
  for (std::size_t i : KnapsackItems(lengths, values, budget)) chosen.push_back(pool[i]);
  return chosen;
}

// Keeps shots in the given order while they fit in the budget.
std::vector<KeyShot> FitInOrder(std::span<const KeyShot> ordered, std::size_t budget) {
  std::vector<KeyShot> kept;
  std::set<std::pair<std::size_t, std::size_t>> frames;
  for (const auto& shot : ordered) {
    std::size_t added = 0;
    for (std::size_t t = shot.begin; t < shot.end; ++t) added += frames.count({shot.view, t}) ? 0 : 1;
    if (frames.size() + added > budget) continue;
    for (std::size_t t = shot.begin; t < shot.end; ++t) frames.insert({shot.view, t});
    kept.push_back(shot);
  }
  return kept;
}

void CheckScores(const MultiViewSequence& sequence, const Eigen::MatrixXd& scores) {
  if (scores.rows() != static_cast<Eigen::Index>(sequence.num_views()) ||
      scores.cols() != static_cast<Eigen::Index>(sequence.num_steps())) {
    Throw(ErrorKind::kShape, "score matrix must be M x N");
  }
}

}  // namespace

std::vector<std::size_t> KnapsackItems(std::span<const std::size_t> lengths,
                                       std::span<const double> scores, std::size_t budget) {
  if (lengths.size() != scores.size()) Throw(ErrorKind::kShape, "one score per item required");
  const std::size_t n = lengths.size();
  // best[i][c]: optimum over items i.. with capacity c.
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(budget + 1, 0.0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t c = 0; c <= budget; ++c) {
      double value = best[i + 1][c];
      if (lengths[i] <= c) value = std::max(value, scores[i] + best[i + 1][c - lengths[i]]);
      best[i][c] = value;
    }
  }
  std::vector<std::size_t> chosen;
  std::size_t capacity = budget;
  for (std::size_t i = 0; i < n; ++i) {
    if (lengths[i] > capacity) continue;
    const double with = scores[i] + best[i + 1][capacity - lengths[i]];
    if (NearlyEqualOrAbove(with, best[i][capacity]) &&
        NearlyEqualOrAbove(with, best[i + 1][capacity])) {
      chosen.push_back(i);
      capacity -= lengths[i];
    }
  }
  return chosen;
}

std::vector<std::size_t> KnapsackShots(const ShotList& shots, std::size_t budget) {
  shots.validate();
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < shots.num_shots(); ++i) lengths.push_back(shots.length(i));
  return KnapsackItems(lengths, shots.scores, budget);
}

Summary SummaryFromShots(const std::string& sequence_id, std::span<const KeyShot> shots,
                         double fraction) {
  std::vector<Selection> frames;
  for (const auto& shot : shots) {
    for (std::size_t t = shot.begin; t < shot.end; ++t) frames.push_back({shot.view, t});
  }
  return Summary::FromSelections(sequence_id, std::move(frames), fraction);
}

SummaryResult SummarizeFromScores(const MultiViewSequence& sequence, const Eigen::MatrixXd& scores,
                                  const SummaryBudget& budget,
                                  std::optional<std::size_t> frame_budget) {
  CheckScores(sequence, scores);
  const std::size_t frames = frame_budget.value_or(budget.frame_budget(sequence.num_steps()));
  SummaryResult out;
  out.shots = SelectByKnapsack(PooledShots(sequence, scores, budget.segmentation), frames);
  out.summary = SummaryFromShots(sequence.sequence_id(), out.shots, budget.fraction);
  return out;
}

SummaryResult SummarizeSupervised(const ModelParams& params, const MultiViewSequence& sequence,
                                  const SummaryBudget& budget,
                                  std::optional<std::size_t> frame_budget) {
  const ForwardTrace trace = Forward(params, sequence);
  return SummarizeFromScores(sequence, trace.streams.quality, budget, frame_budget);
}

UnsupervisedResult SummarizeUnsupervised(const MultiViewSequence& sequence,
                                         const SummaryBudget& budget,
                                         std::optional<std::size_t> frame_budget) {
  const std::size_t frames = frame_budget.value_or(budget.frame_budget(sequence.num_steps()));
  const auto n = static_cast<Eigen::Index>(sequence.num_steps());
  ViewStreams streams;
  for (std::size_t v = 0; v < sequence.num_views(); ++v) {
    Eigen::MatrixXd unit = sequence.view_matrix(v);
    for (Eigen::Index t = 0; t < n; ++t) {
      const double norm = unit.col(t).norm();
      if (!(norm > 0.0)) Throw(ErrorKind::kDegenerate, "zero input feature");
      unit.col(t) /= norm;
    }
    streams.features.push_back(std::move(unit));
  }
  streams.quality = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(sequence.num_views()), n);
  const JointKernelBundle joint = BuildJointKernel(streams);

  UnsupervisedResult out;
  GreedyOptions options;
  options.max_size = std::min(frames, sequence.num_steps());
  options.stop = GreedyStop::kFixedSize;
  out.steps = GreedyMap(joint.kernel, options);

  std::vector<ShotList> shots;
  for (std::size_t v = 0; v < sequence.num_views(); ++v) {
    shots.push_back(Kts(sequence.view_matrix(v), budget.segmentation).to_shots());
  }
  std::vector<KeyShot> candidates;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t rank = 0; rank < out.steps.size(); ++rank) {
    const auto t = static_cast<Eigen::Index>(out.steps[rank]);
    std::size_t view = 0;
    double best = -2.0;
    for (std::size_t v = 0; v < sequence.num_views(); ++v) {
      const double cosine = streams.features[v].col(t).dot(joint.kernel.phi().col(t));
      if (cosine > best) {
        best = cosine;
        view = v;
      }
    }
    const std::size_t s = shots[view].shot_of(static_cast<std::size_t>(t));
    if (!seen.insert({view, s}).second) continue;
    // Earlier greedy picks rank higher.
    candidates.push_back({view, shots[view].begin(s), shots[view].end(s),
                          static_cast<double>(out.steps.size() - rank)});
  }
  out.result.shots = FitInOrder(candidates, frames);
  out.result.summary = SummaryFromShots(sequence.sequence_id(), out.result.shots, budget.fraction);
  return out;
}

StreamSummarizer SupervisedStreamSummarizer(const ModelParams& params, SummaryBudget budget) {
  return [params, budget](const MultiViewSequence& stream, std::size_t frame_budget) {
    return SummarizeSupervised(params, stream, budget, frame_budget).shots;
  };
}

StreamSummarizer UnsupervisedStreamSummarizer(SummaryBudget budget) {
  return [budget](const MultiViewSequence& stream, std::size_t frame_budget) {
    return SummarizeUnsupervised(stream, budget, frame_budget).result.shots;
  };
}

Summary BaselineMergeViews(const StreamSummarizer& summarizer, const MultiViewSequence& sequence,
                           double fraction) {
  const std::size_t n = sequence.num_steps();
  const std::size_t frames = FrameBudget(fraction, n);
  const MultiViewSequence merged(sequence.sequence_id(), 1, sequence.num_views() * n,
                                 sequence.feature_dim(), sequence.values(), sequence.fps_note());
  std::vector<Selection> picks;
  for (const auto& shot : summarizer(merged, frames)) {
    for (std::size_t t = shot.begin; t < shot.end; ++t) picks.push_back({t / n, t % n});
  }
  return Summary::FromSelections(sequence.sequence_id(), std::move(picks), fraction);
}

Summary BaselineMergeSummaries(const StreamSummarizer& summarizer,
                               const MultiViewSequence& sequence, double fraction) {
  const std::size_t frames = FrameBudget(fraction, sequence.num_steps());
  std::vector<KeyShot> pool;
  for (std::size_t v = 0; v < sequence.num_views(); ++v) {
    const std::size_t only[] = {v};
    for (auto shot : summarizer(sequence.select_views(only), frames)) {
      shot.view = v;
      pool.push_back(shot);
    }
  }
  std::stable_sort(pool.begin(), pool.end(), [](const KeyShot& a, const KeyShot& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.view != b.view ? a.view < b.view : a.begin < b.begin;
  });
  const auto kept = FitInOrder(pool, frames);
  return SummaryFromShots(sequence.sequence_id(), kept, fraction);
}

Summary BaselineRandom(const MultiViewSequence& sequence, double fraction, std::uint64_t seed) {
  const std::size_t total = sequence.num_views() * sequence.num_steps();
  const std::size_t frames = std::min(FrameBudget(fraction, sequence.num_steps()), total);
  std::vector<std::size_t> cells(total);
  std::iota(cells.begin(), cells.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < frames; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(cells[i], cells[pick(rng)]);
  }
  std::vector<Selection> picks;
  for (std::size_t i = 0; i < frames; ++i) {
    picks.push_back({cells[i] / sequence.num_steps(), cells[i] % sequence.num_steps()});
  }
  return Summary::FromSelections(sequence.sequence_id(), std::move(picks), fraction);
}

}  // namespace mdpp
