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

#include "mdpp/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mdpp/error.hpp"

namespace mdpp {
namespace {

constexpr double kMaxClusterCosine = 0.3;
constexpr int kMaxRejections = 100000;

}  // namespace

std::string_view ToString(OverlapMode mode) {
  switch (mode) {
    case OverlapMode::kIndependent: return "independent";
    case OverlapMode::kPairwise: return "pairwise";
    case OverlapMode::kFull: return "full";
  }
  return "independent";
}

OverlapMode ParseOverlapMode(std::string_view text) {
  if (text == "independent") return OverlapMode::kIndependent;
  if (text == "pairwise") return OverlapMode::kPairwise;
  if (text == "full") return OverlapMode::kFull;
  Throw(ErrorKind::kConfig, "overlap mode must be independent, pairwise or full");
}

std::size_t SynthConfig::views_per_event() const {
  switch (overlap) {
    case OverlapMode::kIndependent: return 1;
    case OverlapMode::kPairwise: return std::min<std::size_t>(2, num_views);
    case OverlapMode::kFull: return num_views;
  }
  return 1;
}

void SynthConfig::validate() const {
  if (num_views == 0 || num_steps == 0 || feature_dim == 0) {
    Throw(ErrorKind::kConfig, "M, N and D must be positive");
  }
  if (num_events > 0 && (min_event_length == 0 || min_event_length > max_event_length)) {
    Throw(ErrorKind::kConfig, "event lengths must satisfy 0 < min <= max");
  }
  if (num_events * max_event_length + (num_events > 0 ? num_events - 1 : 0) > num_steps) {
    Throw(ErrorKind::kConfig, "events cannot be packed into N steps");
  }
  if (num_events + 1 > palette_size + 1 || palette_size == 0) {
    Throw(ErrorKind::kConfig, "palette must hold at least one cluster per event");
  }
  if (!(noise_sigma >= 0.0)) Throw(ErrorKind::kConfig, "noise_sigma must be non-negative");
  // Unit centres with cosine < 0.3 are at least sqrt(1.4) apart.
  if (3.0 * noise_sigma >= std::sqrt(2.0 - 2.0 * kMaxClusterCosine)) {
    Throw(ErrorKind::kConfig, "noise_sigma too large for cluster separation");
  }
  if (max_truth_fraction > 0.0) {
    const double cap = std::floor(max_truth_fraction * static_cast<double>(num_steps) + 1e-9);
    if (static_cast<double>(num_events * max_event_length * views_per_event()) > cap) {
      Throw(ErrorKind::kConfig, "ground truth could exceed the summary budget");
    }
  }
  if (num_users == 0) Throw(ErrorKind::kConfig, "need at least one user");
}

Eigen::MatrixXd ClusterPalette(std::size_t feature_dim, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd palette(static_cast<Eigen::Index>(feature_dim), static_cast<Eigen::Index>(count));
  int rejections = 0;
  for (Eigen::Index c = 0; c < palette.cols();) {
    Eigen::VectorXd v(palette.rows());
    for (Eigen::Index d = 0; d < v.size(); ++d) v[d] = normal(rng);
    if (!(v.norm() > 0.0)) continue;
    v.normalize();
    bool ok = true;
    for (Eigen::Index k = 0; k < c && ok; ++k) ok = palette.col(k).dot(v) < kMaxClusterCosine;
    if (!ok) {
      if (++rejections > kMaxRejections) {
        Throw(ErrorKind::kConfig, "cannot place " + std::to_string(count) +
                                      " separated clusters in D=" + std::to_string(feature_dim));
      }
      continue;
    }
    palette.col(c++) = v;
  }
  return palette;
}

SynthSequence Generate(const SynthConfig& config) {
  config.validate();
  const Eigen::MatrixXd palette =
      ClusterPalette(config.feature_dim, config.palette_size + 1, config.palette_seed);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, config.noise_sigma > 0.0 ? config.noise_sigma : 1.0);
  const double noise_scale = config.noise_sigma > 0.0 ? 1.0 : 0.0;

  // Event lengths, then non-overlapping placement with at least one
  // background step between consecutive events.
  SynthSequence out;
  std::vector<std::size_t> lengths(config.num_events);
  std::uniform_int_distribution<std::size_t> length_dist(config.min_event_length,
                                                         std::max(config.min_event_length, config.max_event_length));
  for (auto& len : lengths) len = length_dist(rng);
  const std::size_t used = std::accumulate(lengths.begin(), lengths.end(), std::size_t{0});
  const std::size_t slack = config.num_steps - used - (config.num_events > 0 ? config.num_events - 1 : 0);
  std::uniform_int_distribution<std::size_t> offset_dist(0, slack);
  std::vector<std::size_t> offsets(config.num_events);
  for (auto& o : offsets) o = offset_dist(rng);
  std::sort(offsets.begin(), offsets.end());

  std::vector<std::size_t> clusters(config.palette_size);
  std::iota(clusters.begin(), clusters.end(), 1);
  std::shuffle(clusters.begin(), clusters.end(), rng);

  std::size_t cursor = 0;
  for (std::size_t k = 0; k < config.num_events; ++k) {
    PlantedEvent event;
    event.begin = offsets[k] + cursor;
    event.end = event.begin + lengths[k];
    cursor += lengths[k] + 1;
    event.cluster = clusters[k];
    std::vector<std::size_t> views(config.num_views);
    std::iota(views.begin(), views.end(), 0);
    std::shuffle(views.begin(), views.end(), rng);
    views.resize(config.views_per_event());
    std::sort(views.begin(), views.end());
    event.views = std::move(views);
    out.events.push_back(std::move(event));
  }

  // Cluster assignment per (view, t): 0 is background.
  std::vector<std::size_t> assignment(config.num_views * config.num_steps, 0);
  for (const auto& e : out.events) {
    for (std::size_t v : e.views) {
      for (std::size_t t = e.begin; t < e.end; ++t) assignment[v * config.num_steps + t] = e.cluster;
    }
  }
  std::vector<double> values;
  values.reserve(config.num_views * config.num_steps * config.feature_dim);
  for (std::size_t cell = 0; cell < assignment.size(); ++cell) {
    const auto centre = palette.col(static_cast<Eigen::Index>(assignment[cell]));
    for (Eigen::Index d = 0; d < centre.size(); ++d) {
      // Stored through float so in-memory values equal the on-disk ones.
      values.push_back(static_cast<float>(centre[d] + noise_scale * noise(rng)));
    }
  }
  out.sequence = MultiViewSequence(config.sequence_id, config.num_views, config.num_steps,
                                   config.feature_dim, std::move(values), "synthetic");

  out.annotations.sequence_id = config.sequence_id;
  out.annotations.stage = config.num_views == 1 ? 1 : 2;
  std::uniform_int_distribution<std::size_t> jitter_dist(0, config.boundary_jitter);
  for (std::size_t u = 0; u < config.num_users; ++u) {
    UserAnnotation user;
    user.user_id = "user" + std::to_string(u);
    for (const auto& e : out.events) {
      std::size_t begin = e.begin + jitter_dist(rng);
      std::size_t end = e.end - std::min(e.end - begin, jitter_dist(rng));
      if (end <= begin) {
        begin = e.begin;
        end = e.begin + 1;
      }
      for (std::size_t v : e.views) {
        for (std::size_t t = begin; t < end; ++t) user.selections.push_back({v, t});
      }
    }
    std::sort(user.selections.begin(), user.selections.end(), ByTimeThenView{});
    out.annotations.users.push_back(std::move(user));
  }
  out.annotations.validate(out.sequence.shape());
  return out;
}

}  // namespace mdpp
