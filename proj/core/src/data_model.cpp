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

#include "mdpp/data_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "mdpp/error.hpp"

namespace mdpp {
namespace {

using nlohmann::json;

constexpr char kFeatureMagic[4] = {'M', 'D', 'V', '1'};
constexpr std::string_view kAnnotationFormat = "mdpp-annotations";
constexpr std::string_view kSummaryFormat = "mdpp-summary";
constexpr int kTextVersion = 1;

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t GetU32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return v;
}

// Indented JSON with every [view, t] pair kept on one line.
std::string DumpDocument(const json& doc) {
  static const std::regex pair(R"(\[\s*(\d+),\s*(\d+)\s*\])");
  return std::regex_replace(doc.dump(2), pair, "[$1, $2]") + "\n";
}

json SelectionsToJson(const std::vector<Selection>& selections) {
  json arr = json::array();
  for (const auto& s : selections) arr.push_back({s.view, s.t});
  return arr;
}

std::vector<Selection> SelectionsFromJson(const json& arr) {
  if (!arr.is_array()) Throw(ErrorKind::kFormat, "selections must be an array");
  std::vector<Selection> out;
  out.reserve(arr.size());
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
        !pair[1].is_number_unsigned()) {
      Throw(ErrorKind::kFormat, "selection must be a [view, t] pair of non-negative integers");
    }
    out.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
  }
  return out;
}

json ParseDocument(std::string_view text, std::string_view format) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    Throw(ErrorKind::kFormat, std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != format) {
    Throw(ErrorKind::kFormat, "expected format '" + std::string(format) + "'");
  }
  if (doc.value("version", 0) != kTextVersion) {
    Throw(ErrorKind::kFormat, "unsupported " + std::string(format) + " version");
  }
  return doc;
}

std::string ReadText(const std::filesystem::path& path) {
  auto bytes = ReadFileBytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void CheckIndex(const Selection& s, const SequenceShape& shape) {
  if (s.view >= shape.num_views || s.t >= shape.num_steps) {
    Throw(ErrorKind::kIndex, "selection (view=" + std::to_string(s.view) +
                                 ", t=" + std::to_string(s.t) +
                                 ") outside sequence of " +
                                 std::to_string(shape.num_views) + " views x " +
                                 std::to_string(shape.num_steps) + " steps");
  }
}

}  // namespace

MultiViewSequence::MultiViewSequence(std::string sequence_id, std::size_t num_views,
                                     std::size_t num_steps, std::size_t feature_dim,
                                     std::vector<double> values, std::string fps_note)
    : sequence_id_(std::move(sequence_id)),
      fps_note_(std::move(fps_note)),
      num_views_(num_views),
      num_steps_(num_steps),
      feature_dim_(feature_dim),
      values_(std::move(values)) {
  if (num_views_ == 0 || num_steps_ == 0 || feature_dim_ == 0) {
    Throw(ErrorKind::kShape, "sequence dimensions must be positive");
  }
  if (values_.size() != num_views_ * num_steps_ * feature_dim_) {
    Throw(ErrorKind::kLength, "expected " + std::to_string(num_views_ * num_steps_ * feature_dim_) +
                                  " feature values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) Throw(ErrorKind::kData, "non-finite feature value");
  }
}

std::span<const double> MultiViewSequence::feature(std::size_t view, std::size_t t) const {
  return {values_.data() + (view * num_steps_ + t) * feature_dim_, feature_dim_};
}

Eigen::Map<const Eigen::MatrixXd> MultiViewSequence::view_matrix(std::size_t view) const {
  return {values_.data() + view * num_steps_ * feature_dim_,
          static_cast<Eigen::Index>(feature_dim_), static_cast<Eigen::Index>(num_steps_)};
}

MultiViewSequence MultiViewSequence::select_views(std::span<const std::size_t> views) const {
  std::vector<double> values;
  values.reserve(views.size() * num_steps_ * feature_dim_);
  const std::size_t block = num_steps_ * feature_dim_;
  for (std::size_t v : views) {
    if (v >= num_views_) Throw(ErrorKind::kIndex, "view index out of range");
    auto first = values_.begin() + static_cast<std::ptrdiff_t>(v * block);
    values.insert(values.end(), first, first + static_cast<std::ptrdiff_t>(block));
  }
  return {sequence_id_, views.size(), num_steps_, feature_dim_, std::move(values), fps_note_};
}

void AnnotationSet::validate(std::optional<SequenceShape> shape) const {
  if (stage < 1 || stage > 3) Throw(ErrorKind::kValidation, "stage must be 1, 2 or 3");
  std::set<std::string> ids;
  for (const auto& user : users) {
    if (!ids.insert(user.user_id).second) {
      Throw(ErrorKind::kValidation, "duplicate user '" + user.user_id + "'");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& s : user.selections) {
      if (shape) CheckIndex(s, *shape);
      if (!seen.insert({s.view, s.t}).second) {
        Throw(ErrorKind::kValidation, "duplicate selection (view=" + std::to_string(s.view) +
                                          ", t=" + std::to_string(s.t) + ") for user '" +
                                          user.user_id + "'");
      }
    }
    if (stage == 1 && !user.selections.empty()) {
      const std::size_t view = user.selections.front().view;
      for (const auto& s : user.selections) {
        if (s.view != view) {
          Throw(ErrorKind::kValidation, "stage-1 user '" + user.user_id + "' spans several views");
        }
      }
    }
  }
}

Summary Summary::FromSelections(std::string sequence_id, std::vector<Selection> selections,
                                 double budget_fraction) {
  std::sort(selections.begin(), selections.end(), ByTimeThenView{});
  selections.erase(std::unique(selections.begin(), selections.end()), selections.end());
  return {std::move(sequence_id), std::move(selections), budget_fraction};
}

bool Summary::contains(const Selection& s) const {
  return std::binary_search(selections.begin(), selections.end(), s, ByTimeThenView{});
}

ShotList ShotList::FromEnds(std::vector<std::size_t> ends, std::size_t num_steps) {
  ShotList shots;
  shots.ends = std::move(ends);
  shots.scores.assign(shots.ends.size(), 0.0);
  shots.validate();
  if (shots.num_steps() != num_steps) {
    Throw(ErrorKind::kValidation, "shot boundaries must end at N");
  }
  return shots;
}

ShotList ShotList::Uniform(std::size_t num_steps, std::size_t shot_length) {
  if (num_steps == 0 || shot_length == 0) Throw(ErrorKind::kConfig, "shot length must be positive");
  std::vector<std::size_t> ends;
  for (std::size_t e = shot_length; e < num_steps; e += shot_length) ends.push_back(e);
  ends.push_back(num_steps);
  return FromEnds(std::move(ends), num_steps);
}

std::size_t ShotList::shot_of(std::size_t t) const {
  auto it = std::upper_bound(ends.begin(), ends.end(), t);
  if (it == ends.end()) Throw(ErrorKind::kIndex, "time-step outside shot list");
  return static_cast<std::size_t>(it - ends.begin());
}

void ShotList::validate() const {
  if (ends.empty()) Throw(ErrorKind::kValidation, "shot list is empty");
  if (scores.size() != ends.size()) Throw(ErrorKind::kValidation, "one score per shot required");
  std::size_t prev = 0;
  for (std::size_t e : ends) {
    if (e <= prev) Throw(ErrorKind::kValidation, "shot boundaries must be strictly increasing");
    prev = e;
  }
}

std::size_t FrameBudget(double fraction, std::size_t num_steps) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    Throw(ErrorKind::kConfig, "budget fraction must lie in (0, 1]");
  }
  // Guard against 0.15 * 300 landing a hair above an integer.
  const double raw = fraction * static_cast<double>(num_steps);
  const double nearest = std::round(raw);
  const double frames = std::abs(raw - nearest) < 1e-9 ? nearest : std::ceil(raw);
  return static_cast<std::size_t>(frames);
}

std::vector<std::uint8_t> EncodeFeatures(const MultiViewSequence& sequence) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + 4 * sequence.values().size());
  out.insert(out.end(), std::begin(kFeatureMagic), std::end(kFeatureMagic));
  PutU32(out, static_cast<std::uint32_t>(sequence.num_views()));
  PutU32(out, static_cast<std::uint32_t>(sequence.num_steps()));
  PutU32(out, static_cast<std::uint32_t>(sequence.feature_dim()));
  for (double v : sequence.values()) {
    PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

MultiViewSequence DecodeFeatures(std::span<const std::uint8_t> bytes, std::string sequence_id) {
  if (bytes.size() < 16 || !std::equal(std::begin(kFeatureMagic), std::end(kFeatureMagic),
                                       bytes.begin())) {
    Throw(ErrorKind::kFormat, "missing MDV1 feature header");
  }
  const std::size_t m = GetU32(bytes, 4);
  const std::size_t n = GetU32(bytes, 8);
  const std::size_t d = GetU32(bytes, 12);
  if (m == 0 || n == 0 || d == 0) Throw(ErrorKind::kFormat, "feature header has a zero dimension");
  const std::size_t count = m * n * d;
  const std::size_t payload = bytes.size() - 16;
  if (payload < 4 * count) {
    Throw(ErrorKind::kLength, "feature payload declares " + std::to_string(count) +
                                  " values but holds " + std::to_string(payload / 4));
  }
  if (payload > 4 * count) Throw(ErrorKind::kFormat, "trailing bytes after feature payload");
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(GetU32(bytes, 16 + 4 * i));
    if (!std::isfinite(f)) {
      Throw(ErrorKind::kData, "non-finite feature value at index " + std::to_string(i));
    }
    values[i] = f;
  }
  return {std::move(sequence_id), m, n, d, std::move(values)};
}

MultiViewSequence ReadFeatureFile(const std::filesystem::path& path) {
  return DecodeFeatures(ReadFileBytes(path), path.stem().string());
}

void WriteFeatureFile(const MultiViewSequence& sequence, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeFeatures(sequence));
}

std::string AnnotationsToText(const AnnotationSet& annotations) {
  json users = json::array();
  for (const auto& user : annotations.users) {
    users.push_back({{"user_id", user.user_id},
                     {"selections", SelectionsToJson(user.selections)}});
  }
  json doc = {{"format", kAnnotationFormat},
              {"version", kTextVersion},
              {"sequence_id", annotations.sequence_id},
              {"stage", annotations.stage},
              {"users", users}};
  return DumpDocument(doc);
}

AnnotationSet AnnotationsFromText(std::string_view text, std::optional<SequenceShape> shape) {
  const json doc = ParseDocument(text, kAnnotationFormat);
  AnnotationSet out;
  try {
    out.sequence_id = doc.at("sequence_id").get<std::string>();
    out.stage = doc.at("stage").get<int>();
    for (const auto& user : doc.at("users")) {
      out.users.push_back({user.at("user_id").get<std::string>(),
                           SelectionsFromJson(user.at("selections"))});
    }
  } catch (const json::exception& e) {
    Throw(ErrorKind::kFormat, std::string("annotation document: ") + e.what());
  }
  out.validate(shape);
  return out;
}

AnnotationSet ReadAnnotations(const std::filesystem::path& path,
                              std::optional<SequenceShape> shape) {
  return AnnotationsFromText(ReadText(path), shape);
}

void WriteAnnotations(const AnnotationSet& annotations, const std::filesystem::path& path) {
  annotations.validate();
  WriteFileAtomic(path, AnnotationsToText(annotations));
}

std::string SummaryToText(const Summary& summary) {
  json doc = {{"format", kSummaryFormat},
              {"version", kTextVersion},
              {"sequence_id", summary.sequence_id},
              {"budget_fraction", summary.budget_fraction},
              {"num_frames", summary.selections.size()},
              {"selections", SelectionsToJson(summary.selections)}};
  return DumpDocument(doc);
}

Summary SummaryFromText(std::string_view text, std::optional<SequenceShape> shape) {
  const json doc = ParseDocument(text, kSummaryFormat);
  Summary out;
  try {
    out.sequence_id = doc.at("sequence_id").get<std::string>();
    out.budget_fraction = doc.at("budget_fraction").get<double>();
    out.selections = SelectionsFromJson(doc.at("selections"));
  } catch (const json::exception& e) {
    Throw(ErrorKind::kFormat, std::string("summary document: ") + e.what());
  }
  if (!(out.budget_fraction > 0.0 && out.budget_fraction <= 1.0)) {
    Throw(ErrorKind::kValidation, "budget_fraction must lie in (0, 1]");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& s : out.selections) {
    if (shape) CheckIndex(s, *shape);
    if (!seen.insert({s.view, s.t}).second) {
      Throw(ErrorKind::kValidation, "duplicate selection in summary");
    }
  }
  if (!std::is_sorted(out.selections.begin(), out.selections.end(), ByTimeThenView{})) {
    Throw(ErrorKind::kValidation, "summary selections must be sorted by (t, view)");
  }
  return out;
}

Summary ReadSummary(const std::filesystem::path& path, std::optional<SequenceShape> shape) {
  return SummaryFromText(ReadText(path), shape);
}

void WriteSummary(const Summary& summary, const std::filesystem::path& path) {
  WriteFileAtomic(path, SummaryToText(summary));
}

void WriteFileAtomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Throw(ErrorKind::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) Throw(ErrorKind::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) Throw(ErrorKind::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view text) {
  WriteFileAtomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace mdpp
