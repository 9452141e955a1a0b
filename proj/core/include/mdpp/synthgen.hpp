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

#ifndef MDPP_SYNTHGEN_HPP_
#define MDPP_SYNTHGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mdpp/data_model.hpp"

namespace mdpp {

// How planted events spread over views.
enum class OverlapMode {
  kIndependent,  // each event on exactly one view
  kPairwise,     // each event on two views
  kFull,         // each event on every view
};

std::string_view ToString(OverlapMode mode);
OverlapMode ParseOverlapMode(std::string_view text);

struct SynthConfig {
  std::string sequence_id = "synth";
  std::size_t num_views = 3;
  std::size_t num_steps = 300;
  std::size_t feature_dim = 16;
  std::size_t num_events = 5;
  std::size_t min_event_length = 6;
  std::size_t max_event_length = 9;
  OverlapMode overlap = OverlapMode::kIndependent;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
  // Seeds the background and event cluster centres. Sequences that share it
  // share the same visual vocabulary, which is what makes supervised
  // training transferable across a corpus.
  std::uint64_t palette_seed = 0;
  std::size_t palette_size = 16;
  // Ground truth may cover at most this fraction of N frames; 0 disables.
  double max_truth_fraction = 0.15;
  std::size_t num_users = 1;
  // Each user may trim up to this many steps from either end of an event.
  std::size_t boundary_jitter = 0;

  std::size_t views_per_event() const;
  void validate() const;
};

struct PlantedEvent {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<std::size_t> views;
  std::size_t cluster = 0;  // palette index
};

struct SynthSequence {
  MultiViewSequence sequence;
  AnnotationSet annotations;
  std::vector<PlantedEvent> events;
};

// Unit cluster centres: column 0 is the background, columns 1.. the events.
// Every pair has cosine similarity below 0.3.
Eigen::MatrixXd ClusterPalette(std::size_t feature_dim, std::size_t count, std::uint64_t seed);

SynthSequence Generate(const SynthConfig& config);

}  // namespace mdpp

#endif  // MDPP_SYNTHGEN_HPP_
