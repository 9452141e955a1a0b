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

#include "mdpp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "mdpp/error.hpp"

namespace mdpp {
namespace {

double Harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

PrfScore FromCounts(std::size_t pred_hits, std::size_t pred_size, std::size_t truth_hits,
                    std::size_t truth_size) {
  PrfScore s;
  s.precision_defined = pred_size > 0;
  s.recall_defined = truth_size > 0;
  s.precision = s.precision_defined ? static_cast<double>(pred_hits) / static_cast<double>(pred_size) : 0.0;
  s.recall = s.recall_defined ? static_cast<double>(truth_hits) / static_cast<double>(truth_size) : 0.0;
  s.f1 = Harmonic(s.precision, s.recall);
  return s;
}

Summary UserSummary(const AnnotationSet& annotations, std::size_t user) {
  return Summary::FromSelections(annotations.sequence_id, annotations.users[user].selections, 1.0);
}

double UnitDistance(std::span<const double> a, std::span<const double> b) {
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (!(na > 0.0) || !(nb > 0.0)) return 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] / na - b[i] / nb;
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

PrfScore FrameF1(const Summary& predicted, const Summary& truth) {
  std::size_t hits = 0;
  for (const auto& s : predicted.selections) hits += truth.contains(s) ? 1 : 0;
  return FromCounts(hits, predicted.num_frames(), hits, truth.num_frames());
}

PrfScore TolerantF1(const Summary& predicted, const Summary& truth,
                    const MultiViewSequence& sequence, double tau) {
  if (tau < 0.0) Throw(ErrorKind::kConfig, "threshold must be non-negative");
  const double radius = 2.0 * tau;
  auto matched = [&](const Selection& s, const Summary& other) {
    if (s.view >= sequence.num_views() || s.t >= sequence.num_steps()) {
      Throw(ErrorKind::kIndex, "summary selection outside the sequence");
    }
    if (other.contains(s)) return true;
    for (std::size_t v = 0; v < sequence.num_views(); ++v) {
      if (v == s.view || !other.contains({v, s.t})) continue;
      if (UnitDistance(sequence.feature(s.view, s.t), sequence.feature(v, s.t)) < radius) return true;
    }
    return false;
  };
  std::size_t pred_hits = 0;
  for (const auto& s : predicted.selections) pred_hits += matched(s, truth) ? 1 : 0;
  std::size_t truth_hits = 0;
  for (const auto& s : truth.selections) truth_hits += matched(s, predicted) ? 1 : 0;
  return FromCounts(pred_hits, predicted.num_frames(), truth_hits, truth.num_frames());
}

double PairwiseConsensus(const AnnotationSet& annotations) {
  const std::size_t users = annotations.users.size();
  if (users < 2) Throw(ErrorKind::kValidation, "consensus needs at least two users");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < users; ++a) {
    for (std::size_t b = a + 1; b < users; ++b) {
      const Summary sa = UserSummary(annotations, a);
      const Summary sb = UserSummary(annotations, b);
      sum += (sa.num_frames() == 0 && sb.num_frames() == 0) ? 1.0 : FrameF1(sa, sb).f1;
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double MeanF1AgainstUsers(const Summary& summary, const AnnotationSet& annotations) {
  if (annotations.users.empty()) Throw(ErrorKind::kValidation, "no user annotations");
  double sum = 0.0;
  for (std::size_t u = 0; u < annotations.users.size(); ++u) {
    sum += FrameF1(summary, UserSummary(annotations, u)).f1;
  }
  return sum / static_cast<double>(annotations.users.size());
}

OracleResult OracleSummary(const AnnotationSet& annotations, SequenceShape shape,
                           std::span<const ShotList> shots, const OracleOptions& options,
                           double budget_fraction) {
  if (annotations.users.empty()) Throw(ErrorKind::kValidation, "oracle needs at least one user");
  annotations.validate(shape);
  if (shots.size() != 1 && shots.size() != shape.num_views) {
    Throw(ErrorKind::kShape, "need one shot list, or one per view");
  }
  for (const auto& list : shots) {
    list.validate();
    if (list.num_steps() != shape.num_steps) Throw(ErrorKind::kShape, "shot list does not cover N");
  }
  auto shots_of = [&](std::size_t view) -> const ShotList& {
    return shots.size() == 1 ? shots[0] : shots[view];
  };

  // Per-user membership grids let each candidate be scored from counts.
  const std::size_t users = annotations.users.size();
  std::vector<std::vector<bool>> member(users, std::vector<bool>(shape.num_views * shape.num_steps));
  std::vector<std::size_t> truth_size(users, 0);
  for (std::size_t u = 0; u < users; ++u) {
    for (const auto& s : annotations.users[u].selections) {
      member[u][s.view * shape.num_steps + s.t] = true;
    }
    truth_size[u] = annotations.users[u].selections.size();
  }
  auto mean_f1 = [&](std::size_t size, const std::vector<std::size_t>& hits) {
    double sum = 0.0;
    for (std::size_t u = 0; u < users; ++u) {
      sum += FromCounts(hits[u], size, hits[u], truth_size[u]).f1;
    }
    return sum / static_cast<double>(users);
  };

  std::size_t max_shots = 0;
  for (std::size_t v = 0; v < shape.num_views; ++v) max_shots = std::max(max_shots, shots_of(v).num_shots());
  std::vector<std::vector<bool>> taken(shape.num_views, std::vector<bool>(max_shots, false));

  OracleResult out;
  std::vector<Selection> frames;
  std::vector<std::size_t> hits(users, 0);
  double current = 0.0;
  while (true) {
    double best_gain = 0.0;
    std::size_t best_view = 0, best_shot = 0;
    bool found = false;
    std::vector<std::size_t> best_hits;
    for (std::size_t s = 0; s < max_shots; ++s) {
      for (std::size_t v = 0; v < shape.num_views; ++v) {
        const ShotList& list = shots_of(v);
        if (s >= list.num_shots() || taken[v][s]) continue;
        const std::size_t size = frames.size() + list.length(s);
        if (size > options.frame_budget) continue;
        std::vector<std::size_t> trial = hits;
        for (std::size_t u = 0; u < users; ++u) {
          for (std::size_t t = list.begin(s); t < list.end(s); ++t) {
            trial[u] += member[u][v * shape.num_steps + t] ? 1 : 0;
          }
        }
        const double gain = mean_f1(size, trial) - current;
        if (gain > best_gain) {
          best_gain = gain;
          best_view = v;
          best_shot = s;
          best_hits = std::move(trial);
          found = true;
        }
      }
    }
    if (!found) break;
    const ShotList& list = shots_of(best_view);
    taken[best_view][best_shot] = true;
    for (std::size_t t = list.begin(best_shot); t < list.end(best_shot); ++t) {
      frames.push_back({best_view, t});
    }
    hits = std::move(best_hits);
    current = mean_f1(frames.size(), hits);
    out.steps.push_back({best_view, best_shot, current});
  }
  out.summary = Summary::FromSelections(annotations.sequence_id, std::move(frames), budget_fraction);
  return out;
}

SequenceEval EvaluateSequence(const Summary& predicted, const Summary& truth,
                              const MultiViewSequence& sequence, std::span<const double> thresholds) {
  SequenceEval out;
  out.sequence_id = sequence.sequence_id();
  out.exact = FrameF1(predicted, truth);
  for (double tau : thresholds) out.tolerant_f1[tau] = TolerantF1(predicted, truth, sequence, tau).f1;
  return out;
}

EvalReport Aggregate(std::vector<SequenceEval> sequences) {
  EvalReport report;
  if (sequences.empty()) return report;
  const double inv = 1.0 / static_cast<double>(sequences.size());
  for (const auto& s : sequences) {
    report.precision += inv * s.exact.precision;
    report.recall += inv * s.exact.recall;
    report.f1 += inv * s.exact.f1;
    for (const auto& [tau, f1] : s.tolerant_f1) report.tolerant_f1[tau] += inv * f1;
  }
  report.sequences = std::move(sequences);
  return report;
}

std::string ReportToText(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << "sequence\tprecision\trecall\tf1";
  for (const auto& [tau, f1] : report.tolerant_f1) out << "\tf1@" << std::defaultfloat << tau;
  out << std::fixed << '\n';
  for (const auto& s : report.sequences) {
    out << s.sequence_id << '\t' << s.exact.precision << '\t' << s.exact.recall << '\t' << s.exact.f1;
    for (const auto& [tau, f1] : s.tolerant_f1) out << '\t' << f1;
    if (!s.exact.defined()) out << "\t(undefined: empty " << (s.exact.recall_defined ? "prediction" : "truth") << ')';
    out << '\n';
  }
  out << "MEAN\t" << report.precision << '\t' << report.recall << '\t' << report.f1;
  for (const auto& [tau, f1] : report.tolerant_f1) out << '\t' << f1;
  out << '\n';
  return out.str();
}

std::string ThresholdCurveToText(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << "tau\tf1\n";
  for (const auto& [tau, f1] : report.tolerant_f1) out << tau << '\t' << f1 << '\n';
  return out.str();
}

}  // namespace mdpp
