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

#ifndef MDPP_EVALUATION_HPP_
#define MDPP_EVALUATION_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mdpp/data_model.hpp"

namespace mdpp {

// Frame-level precision / recall / F1 over exact (view, t) matches.
// Recall is undefined for an empty ground truth and precision for an empty
// prediction; the corresponding flag is cleared and the value reported as 0.
struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;

  bool defined() const { return precision_defined && recall_defined; }
};

PrfScore FrameF1(const Summary& predicted, const Summary& truth);

inline constexpr double kDefaultThresholds[] = {0.0, 0.1, 0.2, 0.3};

// F1 where a frame on the wrong view still counts when the L2-normalized
// features of the two views at that step are closer than 2 * tau (2 being
// the largest distance between unit vectors). tau = 0 is exact matching.
PrfScore TolerantF1(const Summary& predicted, const Summary& truth,
                    const MultiViewSequence& sequence, double tau);

// Mean frame F1 over all unordered pairs of users. Two empty selections agree
// perfectly (F1 = 1). Throws kValidation with fewer than two users.
double PairwiseConsensus(const AnnotationSet& annotations);

struct OracleOptions {
  std::size_t frame_budget = 0;
};

struct OracleStep {
  std::size_t view = 0;
  std::size_t shot = 0;
  double mean_f1 = 0.0;  // mean F1 against all users after adding this shot
};

struct OracleResult {
  Summary summary;
  std::vector<OracleStep> steps;
};

// Greedy oracle summary: repeatedly add the (view, shot) with the largest
// strictly positive gain in mean F1 against every user, skipping shots that
// would overflow the frame budget. Ties go to the smallest (shot, view).
// `shots` holds one partition shared by all views or one per view.
OracleResult OracleSummary(const AnnotationSet& annotations, SequenceShape shape,
                           std::span<const ShotList> shots, const OracleOptions& options,
                           double budget_fraction = 0.15);

// Mean F1 of `summary` against each user's selections.
double MeanF1AgainstUsers(const Summary& summary, const AnnotationSet& annotations);

struct SequenceEval {
  std::string sequence_id;
  PrfScore exact;
  std::map<double, double> tolerant_f1;
};

SequenceEval EvaluateSequence(const Summary& predicted, const Summary& truth,
                              const MultiViewSequence& sequence,
                              std::span<const double> thresholds = kDefaultThresholds);

// Per-sequence scores averaged with equal weight.
struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<double, double> tolerant_f1;
  std::vector<SequenceEval> sequences;
};

EvalReport Aggregate(std::vector<SequenceEval> sequences);

std::string ReportToText(const EvalReport& report);
// "tau<TAB>f1" rows for plotting.
std::string ThresholdCurveToText(const EvalReport& report);

}  // namespace mdpp

#endif  // MDPP_EVALUATION_HPP_
