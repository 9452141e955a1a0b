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

#ifndef MDPP_DATA_MODEL_HPP_
#define MDPP_DATA_MODEL_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mdpp {

// One chosen frame: camera `view` at time-step `t`.
struct Selection {
  std::size_t view = 0;
  std::size_t t = 0;

  friend bool operator==(const Selection&, const Selection&) = default;
};

// Summaries are ordered by time first, then view.
struct ByTimeThenView {
  bool operator()(const Selection& a, const Selection& b) const {
    return a.t != b.t ? a.t < b.t : a.view < b.view;
  }
};

struct SequenceShape {
  std::size_t num_views = 0;
  std::size_t num_steps = 0;
};

// M temporally aligned views x N time-steps x D features. Values are stored
// view-major, then time-major, then by dimension, matching the on-disk layout.
class MultiViewSequence {
 public:
  MultiViewSequence() = default;
  MultiViewSequence(std::string sequence_id, std::size_t num_views,
                    std::size_t num_steps, std::size_t feature_dim,
                    std::vector<double> values, std::string fps_note = {});

  const std::string& sequence_id() const { return sequence_id_; }
  const std::string& fps_note() const { return fps_note_; }
  std::size_t num_views() const { return num_views_; }
  std::size_t num_steps() const { return num_steps_; }
  std::size_t feature_dim() const { return feature_dim_; }
  SequenceShape shape() const { return {num_views_, num_steps_}; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> feature(std::size_t view, std::size_t t) const;

  // D x N matrix whose column t is the feature of `view` at time-step t.
  Eigen::Map<const Eigen::MatrixXd> view_matrix(std::size_t view) const;

  // New sequence containing the given views in the given order.
  MultiViewSequence select_views(std::span<const std::size_t> views) const;

  friend bool operator==(const MultiViewSequence&,
                         const MultiViewSequence&) = default;

 private:
  std::string sequence_id_;
  std::string fps_note_;
  std::size_t num_views_ = 0;
  std::size_t num_steps_ = 0;
  std::size_t feature_dim_ = 0;
  std::vector<double> values_;
};

struct UserAnnotation {
  std::string user_id;
  std::vector<Selection> selections;

  friend bool operator==(const UserAnnotation&,
                         const UserAnnotation&) = default;
};

// Per-user selections for one annotation stage (1, 2 or 3).
struct AnnotationSet {
  std::string sequence_id;
  int stage = 1;
  std::vector<UserAnnotation> users;

  // Throws kValidation on duplicates, bad stage, or multi-view stage-1 users;
  // throws kIndex when `shape` is given and an index falls outside it.
  void validate(std::optional<SequenceShape> shape = std::nullopt) const;

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

// A set of (view, t) frames, deduplicated and sorted by (t, view).
struct Summary {
  std::string sequence_id;
  std::vector<Selection> selections;
  double budget_fraction = 0.15;

  static Summary FromSelections(std::string sequence_id,
                                std::vector<Selection> selections,
                                double budget_fraction);

  std::size_t num_frames() const { return selections.size(); }
  bool contains(const Selection& s) const;

  friend bool operator==(const Summary&, const Summary&) = default;
};

// Partition of [0, N) into non-empty shots. `ends` holds the exclusive end of
// every shot, so ends.back() == N and shot i spans [begin(i), ends[i]).
struct ShotList {
  std::vector<std::size_t> ends;
  std::vector<double> scores;

  static ShotList FromEnds(std::vector<std::size_t> ends, std::size_t num_steps);
  static ShotList Uniform(std::size_t num_steps, std::size_t shot_length);

  std::size_t num_shots() const { return ends.size(); }
  std::size_t num_steps() const { return ends.empty() ? 0 : ends.back(); }
  std::size_t begin(std::size_t i) const { return i == 0 ? 0 : ends[i - 1]; }
  std::size_t end(std::size_t i) const { return ends[i]; }
  std::size_t length(std::size_t i) const { return end(i) - begin(i); }
  std::size_t shot_of(std::size_t t) const;
  void validate() const;
};

std::size_t FrameBudget(double fraction, std::size_t num_steps);

// Binary feature files: "MDV1", then M, N, D as uint32 little-endian, then
// M*N*D float32 little-endian values in view, time, dim order.
std::vector<std::uint8_t> EncodeFeatures(const MultiViewSequence& sequence);
MultiViewSequence DecodeFeatures(std::span<const std::uint8_t> bytes,
                                 std::string sequence_id = {});
MultiViewSequence ReadFeatureFile(const std::filesystem::path& path);
void WriteFeatureFile(const MultiViewSequence& sequence,
                      const std::filesystem::path& path);

std::string AnnotationsToText(const AnnotationSet& annotations);
AnnotationSet AnnotationsFromText(
    std::string_view text, std::optional<SequenceShape> shape = std::nullopt);
AnnotationSet ReadAnnotations(const std::filesystem::path& path,
                              std::optional<SequenceShape> shape = std::nullopt);
void WriteAnnotations(const AnnotationSet& annotations,
                      const std::filesystem::path& path);

std::string SummaryToText(const Summary& summary);
Summary SummaryFromText(std::string_view text,
                        std::optional<SequenceShape> shape = std::nullopt);
Summary ReadSummary(const std::filesystem::path& path,
                    std::optional<SequenceShape> shape = std::nullopt);
void WriteSummary(const Summary& summary, const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes);
void WriteFileAtomic(const std::filesystem::path& path, std::string_view text);
std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);

}  // namespace mdpp

#endif  // MDPP_DATA_MODEL_HPP_
