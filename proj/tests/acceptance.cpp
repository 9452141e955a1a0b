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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mdpp/checks.hpp"
#include "mdpp/dpp.hpp"
#include "mdpp/encoder.hpp"
#include "mdpp/error.hpp"
#include "mdpp/evaluation.hpp"
#include "mdpp/kts.hpp"
#include "mdpp/summarizer.hpp"
#include "mdpp/synthgen.hpp"
#include "mdpp/training.hpp"
#include "oracles.hpp"

namespace mdpp {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void Report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

void Normalization() {
  const auto start = Clock::now();
  const CheckReport r = CheckDppNormalization(10, 200, 1);
  const double secs = SecondsSince(start);
  Report(1, "dpp-normalization", r.passed && secs < 30.0,
         Format("%zu kernels, max rel err %.3g, %.2fs", r.trials, r.max_error, secs));
}

void MultiDppInvariance() {
  const CheckReport r = CheckMultiDppInvariance(50, 2);
  Report(2, "multi-dpp-invariance", r.passed,
         Format("M=1 exact, max permutation diff %.3g over %zu streams", r.max_error, r.trials));
}

void GradientFidelity() {
  const auto start = Clock::now();
  LossOptions ce, dpp, joint;
  ce.lambda = 0.0;
  dpp.cross_entropy_weight = 0.0;
  bool pass = true;
  std::string detail;
  for (const auto& [name, options] : {std::pair{"ce", ce}, {"dpp", dpp}, {"joint", joint}}) {
    const CheckReport r = CheckLossGradient(options, 3, 1e-5);
    pass = pass && r.passed;
    detail += Format("%s %.3g, ", name, r.max_error);
  }
  const double secs = SecondsSince(start);
  pass = pass && secs < 60.0;
  Report(3, "gradient-fidelity", pass, detail + Format("%.2fs", secs));
}

void ParameterCount() {
  // The weight shapes never mention M; the count is a function of (D, H, D').
  const ModelConfig config{16, 32, 24};
  const std::size_t expected = ModelParams::CountFor(config);
  bool pass = true;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t m : {1, 2, 3, 5}) {
    const ModelParams params = ModelParams::Init(config, 4);
    std::vector<double> values(m * 8 * 16);
    for (double& v : values) v = normal(rng);
    const MultiViewSequence seq("count", m, 8, 16, values);
    TrainingTarget target;
    target.views = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), 8);
    target.views(0, 2) = 1.0;
    target.steps = {2};
    const LossResult r = LossAndGrad(params, seq, target);
    pass = pass && params.size() == expected && r.grad.size() == expected;
  }
  Report(4, "parameter-count", pass, Format("%zu weights for M in {1,2,3,5}", expected));
}

bool KnapsackOracle() {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 15;
    std::vector<std::size_t> lengths(n);
    std::vector<double> scores(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lengths[i] = 1 + rng() % 10;
      // Integer scores keep every subset sum exact.
      scores[i] = static_cast<double>(rng() % 100);
      total += lengths[i];
    }
    const std::size_t budget = rng() % (total + 1);
    const auto brute = testing::KnapsackByEnumeration(lengths, scores, budget);
    const auto got = KnapsackItems(lengths, scores, budget);
    std::size_t used = 0;
    double value = 0.0;
    for (std::size_t i : got) {
      used += lengths[i];
      value += scores[i];
    }
    if (used > budget || value != brute.value) return false;
  }
  return true;
}

bool KtsOracle() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    const std::size_t changes = std::min<std::size_t>(3, n - 1);
    Eigen::MatrixXd x(1 + rng() % 3, static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    const SegmentationTable table = OptimalSegmentations(x, changes);
    for (std::size_t m = 0; m <= changes; ++m) {
      const double brute = testing::BestSegmentationByEnumeration(x, m);
      if (std::abs(table.objective[m] - brute) > 1e-9 * std::max(1.0, brute)) return false;
    }
  }
  return true;
}

bool OracleSummaryOracle() {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng() % 3, n = 12, len = 3;
    const ShotList shots = ShotList::Uniform(n, len);
    AnnotationSet users;
    users.sequence_id = "fixture";
    users.stage = 2;
    const std::size_t count = 2 + rng() % 2;
    for (std::size_t u = 0; u < count; ++u) {
      UserAnnotation user{"u" + std::to_string(u), {}};
      for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t v = 0; v < m; ++v) {
          if (rng() % 3 == 0) user.selections.push_back({v, t});
        }
      }
      users.users.push_back(user);
    }
    double best = 0.0;
    for (std::size_t s = 0; s < shots.num_shots(); ++s) {
      for (std::size_t v = 0; v < m; ++v) {
        std::vector<Selection> cand;
        for (std::size_t t = shots.begin(s); t < shots.end(s); ++t) cand.push_back({v, t});
        double mean = 0.0;
        for (const auto& u : users.users) mean += testing::SetF1(cand, u.selections);
        best = std::max(best, mean / static_cast<double>(count));
      }
    }
    const OracleResult r = OracleSummary(users, {m, n}, std::span(&shots, 1), {len});
    const double got = r.summary.selections.empty() ? 0.0 : MeanF1AgainstUsers(r.summary, users);
    if (got != best) return false;
  }
  return true;
}

bool DiagonalMap() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> entry(0.05, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    Eigen::VectorXd d(static_cast<Eigen::Index>(n));
    for (auto& v : d) v = entry(rng);
    Subset greedy = GreedyMap(Eigen::MatrixXd(d.asDiagonal()));
    std::sort(greedy.begin(), greedy.end());
    const auto exact = testing::MapByEnumeration(d.asDiagonal(), n).second;
    if (greedy != Subset(exact.begin(), exact.end())) return false;
  }
  return true;
}

void ExactnessOracles() {
  const bool knapsack = KnapsackOracle();
  const bool kts = KtsOracle();
  const bool oracle = OracleSummaryOracle();
  const bool map = DiagonalMap();
  Report(5, "exactness-oracles", knapsack && kts && oracle && map,
         Format("knapsack %s, kts %s, oracle %s, diagonal map %s", knapsack ? "ok" : "bad",
                kts ? "ok" : "bad", oracle ? "ok" : "bad", map ? "ok" : "bad"));
}

Summary Frames(std::size_t view, std::size_t first, std::size_t last) {
  std::vector<Selection> s;
  for (std::size_t t = first; t <= last; ++t) s.push_back({view, t});
  return Summary::FromSelections("fixture", s, 0.15);
}

void ProtocolFixtures() {
  const PrfScore f = FrameF1(Frames(0, 1, 10), Frames(0, 6, 15));
  const bool f1_ok = f.precision == 0.5 && f.recall == 0.5 && f.f1 == 0.5;

  AnnotationSet three;
  three.sequence_id = "fixture";
  for (const auto& [name, first, last] :
       {std::tuple{"a", 0, 9}, {"b", 0, 9}, {"c", 5, 14}}) {
    three.users.push_back({name, Frames(0, first, last).selections});
  }
  // Pairwise F1s: (a, b) = 1, (a, c) = 0.5, (b, c) = 0.5.
  const double consensus = PairwiseConsensus(three);
  const bool consensus_ok = std::abs(consensus - 2.0 / 3.0) < 1e-12;

  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  bool monotone = true;
  const std::vector<double> taus = {0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + rng() % 3, n = 10, d = 4;
    std::vector<double> values(m * n * d);
    for (double& v : values) v = normal(rng);
    const MultiViewSequence seq("fixture", m, n, d, values);
    std::vector<Selection> a, b;
    for (std::size_t t = 0; t < n; ++t) {
      if (rng() % 3 == 0) a.push_back({rng() % m, t});
      if (rng() % 3 == 0) b.push_back({rng() % m, t});
    }
    const Summary pred = Summary::FromSelections("fixture", a, 0.15);
    const Summary truth = Summary::FromSelections("fixture", b, 0.15);
    double last = -1.0;
    for (double tau : taus) {
      const double now = TolerantF1(pred, truth, seq, tau).f1;
      monotone = monotone && now >= last;
      last = now;
    }
  }
  Report(6, "protocol-fixtures", f1_ok && consensus_ok && monotone,
         Format("frame f1 (%.17g, %.17g, %.17g), consensus %.17g, tau sweep %s", f.precision,
                f.recall, f.f1, consensus, monotone ? "monotone" : "not monotone"));
}

void RoundRobin() {
  const std::vector<std::string> names = {"a", "b", "c", "d", "e", "f"};
  const auto plans = RoundRobinSplits(names);
  bool ok = plans.size() == 30;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& plan : plans) {
    try {
      plan.validate(names);
    } catch (const Error&) {
      ok = false;
    }
    ok = ok && plan.train.size() == 4;
    seen.insert({plan.validation, plan.test});
  }
  ok = ok && seen.size() == 30;
  Report(7, "round-robin", ok, Format("%zu plans, %zu distinct (validation, test) pairs",
                                      plans.size(), seen.size()));
}

// ---------------------------------------------------------------- end to end

struct EndToEnd {
  double joint_f1 = 0.0;
  double ce_f1 = 0.0;
  double random_f1 = 0.0;
  double seconds = 0.0;

  std::string Printed() const {
    return Format("joint %.6f, ce-only %.6f, random %.6f", joint_f1, ce_f1, random_f1);
  }
};

constexpr double kBudget = 0.15;

EndToEnd RunEndToEnd() {
  const auto start = Clock::now();
  std::vector<SynthSequence> corpus;
  std::vector<Example> examples;
  for (std::size_t i = 0; i < 32; ++i) {
    SynthConfig config;
    config.sequence_id = Format("seq%04zu", i);
    config.num_views = 3;
    config.num_steps = 300;
    config.num_events = 5;
    config.num_users = 3;
    config.boundary_jitter = 1;
    config.seed = 2026 * 1000003ULL + i;
    SynthSequence s = Generate(config);
    std::vector<ShotList> shots;
    for (std::size_t v = 0; v < s.sequence.num_views(); ++v) {
      shots.push_back(Kts(s.sequence.view_matrix(v)).to_shots());
    }
    OracleOptions options;
    options.frame_budget = FrameBudget(kBudget, s.sequence.num_steps());
    const Summary oracle =
        OracleSummary(s.annotations, s.sequence.shape(), shots, options, kBudget).summary;
    const char* collection = i < 24 ? "train" : (i < 28 ? "validation" : "test");
    examples.push_back({s.sequence, TrainingTarget::FromSummary(oracle, s.sequence.shape()), collection});
    corpus.push_back(std::move(s));
  }
  const std::span<const Example> all(examples);
  const auto train = all.subspan(0, 24);
  const auto validation = all.subspan(24, 4);

  const ModelConfig model{16, 64, 64};
  TrainConfig config;
  config.threads = ThreadsFromEnvironment();
  TrainConfig ce_config = config;
  ce_config.loss.lambda = 0.0;
  const TrainResult joint = Train(train, validation, model, config);
  const TrainResult ce = Train(train, validation, model, ce_config);

  EndToEnd out;
  for (std::size_t i = 28; i < 32; ++i) {
    const auto& s = corpus[i];
    out.joint_f1 += MeanF1AgainstUsers(SummarizeSupervised(joint.best, s.sequence).summary, s.annotations);
    out.ce_f1 += MeanF1AgainstUsers(SummarizeSupervised(ce.best, s.sequence).summary, s.annotations);
    out.random_f1 += MeanF1AgainstUsers(BaselineRandom(s.sequence, kBudget, i), s.annotations);
  }
  out.joint_f1 /= 4.0;
  out.ce_f1 /= 4.0;
  out.random_f1 /= 4.0;
  out.seconds = SecondsSince(start);
  return out;
}

}  // namespace
}  // namespace mdpp

int main() {
  using namespace mdpp;
  Normalization();
  MultiDppInvariance();
  GradientFidelity();
  ParameterCount();
  ExactnessOracles();
  ProtocolFixtures();
  RoundRobin();

  const EndToEnd first = RunEndToEnd();
  Report(8, "end-to-end", first.joint_f1 >= 2.0 * first.random_f1 &&
                              first.joint_f1 >= first.ce_f1 - 0.02 && first.seconds < 600.0,
         first.Printed() + Format(", %.1fs", first.seconds));
  const EndToEnd second = RunEndToEnd();
  Report(9, "determinism", first.Printed() == second.Printed(), second.Printed());
  return failures;
}
