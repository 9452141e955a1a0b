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

#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "manifest.hpp"
#include "mdpp/checks.hpp"
#include "mdpp/data_model.hpp"
#include "mdpp/encoder.hpp"
#include "mdpp/error.hpp"
#include "mdpp/evaluation.hpp"
#include "mdpp/kts.hpp"
#include "mdpp/summarizer.hpp"
#include "mdpp/synthgen.hpp"
#include "mdpp/training.hpp"

namespace mdpp::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kFeatureExt = ".mdv";
constexpr std::string_view kAnnotationSuffix = ".annotations.json";
constexpr std::string_view kSummarySuffix = ".summary.json";

struct Common {
  std::uint64_t seed = 0;
  std::string manifest;
};

void AddCommon(CLI::App* app, Common& common) {
  app->add_option("--seed", common.seed, "Random seed")->capture_default_str();
  app->add_option("--manifest", common.manifest,
                  "Run manifest path (default: next to the primary output, else stdout)");
}

struct KtsFlags {
  std::size_t max_segments = 32;
  double penalty = 1.0;
  std::size_t num_segments = 0;

  KtsOptions options() const {
    KtsOptions o;
    o.max_segments = max_segments;
    o.penalty = penalty;
    if (num_segments > 0) o.num_segments = num_segments;
    return o;
  }
};

void AddKts(CLI::App* app, KtsFlags& flags) {
  app->add_option("--kts-max-segments", flags.max_segments, "Upper bound on KTS segments")
      ->capture_default_str();
  app->add_option("--kts-penalty", flags.penalty, "KTS model-selection penalty coefficient")
      ->capture_default_str();
  app->add_option("--num-segments", flags.num_segments,
                  "Force this many KTS segments (0 = penalized selection)")
      ->capture_default_str();
}

void FinishManifest(const RunManifest& manifest, const Common& common,
                    const std::optional<fs::path>& primary, std::ostream& out) {
  if (!common.manifest.empty()) {
    manifest.Write(common.manifest);
  } else if (primary) {
    fs::path path = *primary;
    if (fs::is_directory(path)) {
      path /= "manifest.json";
    } else {
      path += ".manifest.json";
    }
    manifest.Write(path);
  } else {
    out << manifest.ToJson();
  }
}

// Maps sequence id -> file for every "<id><suffix>" in dir.
std::map<std::string, fs::path> ListBySuffix(const fs::path& dir, std::string_view suffix) {
  if (!fs::is_directory(dir)) Throw(ErrorKind::kIo, dir.string() + " is not a directory");
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      out[name.substr(0, name.size() - suffix.size())] = entry.path();
    }
  }
  return out;
}

std::string Fixed(double v, int precision = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

// ---------------------------------------------------------------- synth

struct SynthFlags {
  Common common;
  std::string out_dir;
  std::size_t count = 1;
  std::size_t collections = 1;
  std::string prefix = "seq";
  std::string overlap = "independent";
  SynthConfig config;
};

int RunSynth(SynthFlags& f, std::ostream& out) {
  RunManifest manifest("synth");
  manifest.set_seed(f.common.seed);
  if (f.count == 0 || f.collections == 0) Throw(ErrorKind::kConfig, "--count and --collections must be positive");
  f.config.overlap = ParseOverlapMode(f.overlap);
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  json collections = json::object();
  const int width = static_cast<int>(std::to_string(f.count - 1).size());
  for (std::size_t i = 0; i < f.count; ++i) {
    std::ostringstream id;
    id << f.prefix << std::setw(std::max(width, 4)) << std::setfill('0') << i;
    SynthConfig config = f.config;
    config.sequence_id = id.str();
    config.seed = f.common.seed * 1000003ULL + i;
    const SynthSequence s = Generate(config);
    const fs::path features = dir / (config.sequence_id + std::string(kFeatureExt));
    const fs::path annotations = dir / (config.sequence_id + std::string(kAnnotationSuffix));
    WriteFeatureFile(s.sequence, features);
    WriteAnnotations(s.annotations, annotations);
    manifest.add_output(features);
    manifest.add_output(annotations);
    collections["c" + std::to_string(i % f.collections)].push_back(config.sequence_id);
  }
  const fs::path split = dir / "collections.json";
  WriteFileAtomic(split, json{{"collections", collections}}.dump(2) + "\n");
  manifest.add_output(split);
  manifest.set_config("views", std::to_string(f.config.num_views));
  manifest.set_config("steps", std::to_string(f.config.num_steps));
  manifest.set_config("dim", std::to_string(f.config.feature_dim));
  manifest.set_config("events", std::to_string(f.config.num_events));
  manifest.set_config("overlap", f.overlap);
  manifest.set_config("palette_seed", std::to_string(f.config.palette_seed));
  out << "wrote " << f.count << " sequences to " << dir.string() << '\n';
  FinishManifest(manifest, f.common, dir, out);
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

struct OracleFlags {
  Common common;
  std::string features, annotations, out;
  std::string features_dir, annotations_dir, out_dir;
  double budget = 0.15;
  std::size_t shot_length = 0;
  KtsFlags kts;
};

Summary OracleFor(const MultiViewSequence& sequence, const AnnotationSet& annotations,
                  const OracleFlags& f) {
  std::vector<ShotList> shots;
  if (f.shot_length > 0) {
    shots.push_back(ShotList::Uniform(sequence.num_steps(), f.shot_length));
  } else {
    for (std::size_t v = 0; v < sequence.num_views(); ++v) {
      shots.push_back(Kts(sequence.view_matrix(v), f.kts.options()).to_shots());
    }
  }
  OracleOptions options;
  options.frame_budget = FrameBudget(f.budget, sequence.num_steps());
  auto result = OracleSummary(annotations, sequence.shape(), shots, options, f.budget);
  result.summary.sequence_id = sequence.sequence_id();
  return result.summary;
}

int RunOracle(OracleFlags& f, std::ostream& out) {
  RunManifest manifest("oracle");
  manifest.set_seed(f.common.seed);
  manifest.set_config("budget", Fixed(f.budget));
  manifest.set_config("shot_length", std::to_string(f.shot_length));
  std::vector<std::tuple<fs::path, fs::path, fs::path>> jobs;
  std::optional<fs::path> primary;
  if (!f.features_dir.empty()) {
    if (f.annotations_dir.empty() || f.out_dir.empty()) {
      Throw(ErrorKind::kConfig, "--features-dir needs --annotations-dir and --out-dir");
    }
    const auto notes = ListBySuffix(f.annotations_dir, kAnnotationSuffix);
    for (const auto& [id, path] : ListBySuffix(f.features_dir, kFeatureExt)) {
      auto it = notes.find(id);
      if (it == notes.end()) Throw(ErrorKind::kValidation, "no annotations for sequence " + id);
      jobs.emplace_back(path, it->second, fs::path(f.out_dir) / (id + std::string(kSummarySuffix)));
    }
    fs::create_directories(f.out_dir);
    primary = fs::path(f.out_dir);
  } else {
    if (f.features.empty() || f.annotations.empty() || f.out.empty()) {
      Throw(ErrorKind::kConfig, "oracle needs --features, --annotations and --out (or the -dir forms)");
    }
    jobs.emplace_back(f.features, f.annotations, f.out);
    primary = fs::path(f.out);
  }
  for (const auto& [features, notes, target] : jobs) {
    const MultiViewSequence sequence = ReadFeatureFile(features);
    const AnnotationSet annotations = ReadAnnotations(notes, sequence.shape());
    WriteSummary(OracleFor(sequence, annotations, f), target);
    manifest.add_input(features);
    manifest.add_input(notes);
    manifest.add_output(target);
  }
  out << "wrote " << jobs.size() << " oracle summaries\n";
  FinishManifest(manifest, f.common, primary, out);
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainFlags {
  Common common;
  std::string features_dir, oracle_dir, config, split, out_checkpoint, history_out;
  std::size_t round_robin_index = 0;
};

int RunTrain(TrainFlags& f, std::ostream& out) {
  RunManifest manifest("train");
  const auto features = ListBySuffix(f.features_dir, kFeatureExt);
  const auto oracles = ListBySuffix(f.oracle_dir, kSummarySuffix);
  const SplitFile split = ParseSplit(f.split, f.round_robin_index);
  manifest.add_input(f.split);

  std::vector<Example> examples;
  std::optional<std::size_t> input_dim;
  std::set<std::string> wanted(split.plan.train.begin(), split.plan.train.end());
  wanted.insert(split.plan.validation);
  for (const auto& [collection, ids] : split.collections) {
    if (!wanted.count(collection)) continue;
    for (const auto& id : ids) {
      auto fit = features.find(id);
      if (fit == features.end()) Throw(ErrorKind::kValidation, "no feature file for sequence " + id);
      auto oit = oracles.find(id);
      if (oit == oracles.end()) Throw(ErrorKind::kValidation, "no oracle summary for sequence " + id);
      MultiViewSequence sequence = ReadFeatureFile(fit->second);
      if (input_dim && *input_dim != sequence.feature_dim()) {
        Throw(ErrorKind::kShape, "sequences disagree on feature dimension");
      }
      input_dim = sequence.feature_dim();
      const Summary oracle = ReadSummary(oit->second, sequence.shape());
      TrainingTarget target = TrainingTarget::FromSummary(oracle, sequence.shape());
      manifest.add_input(fit->second);
      manifest.add_input(oit->second);
      examples.push_back({std::move(sequence), std::move(target), collection});
    }
  }
  if (!input_dim) Throw(ErrorKind::kConfig, "split selects no sequences");

  TrainSetup setup = ParseTrainConfig(f.config, *input_dim);
  if (!f.config.empty()) manifest.add_input(f.config);
  if (f.common.seed != 0) setup.train.seed = f.common.seed;
  setup.train.threads = ThreadsFromEnvironment();
  manifest.set_seed(setup.train.seed);
  manifest.set_config("D", std::to_string(setup.model.input_dim));
  manifest.set_config("H", std::to_string(setup.model.hidden));
  manifest.set_config("D_prime", std::to_string(setup.model.embed_dim));
  manifest.set_config("lambda", Fixed(setup.train.loss.lambda));
  manifest.set_config("learning_rate", Fixed(setup.train.learning_rate));
  manifest.set_config("batch_size", std::to_string(setup.train.batch_size));
  manifest.set_config("iterations", std::to_string(setup.train.iterations));
  manifest.set_config("bce_full_form", setup.train.loss.bce_full_form ? "true" : "false");
  manifest.set_config("validation", split.plan.validation);
  manifest.set_config("test", split.plan.test);

  const TrainResult result = Train(examples, split.plan, setup.model, setup.train,
                                   [&](const EpochRecord& r) {
                                     out << "epoch " << r.epoch << " train " << Fixed(r.train_loss)
                                         << " validation " << Fixed(r.validation_loss) << '\n';
                                   });
  std::map<std::string, std::string> meta = {
      {"best_epoch", std::to_string(result.best_epoch)},
      {"lambda", Fixed(setup.train.loss.lambda, 12)},
      {"validation", split.plan.validation},
      {"test", split.plan.test}};
  WriteCheckpoint(result.best, f.out_checkpoint, meta);
  manifest.add_output(f.out_checkpoint);
  if (!f.history_out.empty()) {
    WriteFileAtomic(fs::path(f.history_out), HistoryToText(result.history, result.best_epoch));
    manifest.add_output(f.history_out);
  }
  out << "best epoch " << result.best_epoch << '\n';
  FinishManifest(manifest, f.common, fs::path(f.out_checkpoint), out);
  return kExitOk;
}

// ---------------------------------------------------------------- summarize

struct SummarizeFlags {
  Common common;
  std::string features, out, features_dir, out_dir;
  std::string checkpoint;
  bool unsupervised = false;
  std::string baseline;
  double budget = 0.15;
  KtsFlags kts;
};

int RunSummarize(SummarizeFlags& f, std::ostream& out) {
  RunManifest manifest("summarize");
  manifest.set_seed(f.common.seed);
  const int modes = (!f.checkpoint.empty() && f.baseline.empty() ? 1 : 0) + (f.unsupervised ? 1 : 0) +
                    (!f.baseline.empty() ? 1 : 0);
  if (modes != 1) {
    Throw(ErrorKind::kConfig, "choose exactly one of --checkpoint, --unsupervised, --baseline");
  }
  SummaryBudget budget;
  budget.fraction = f.budget;
  budget.segmentation = f.kts.options();
  std::optional<ModelParams> params;
  if (!f.checkpoint.empty()) {
    params = ReadCheckpoint(f.checkpoint);
    manifest.add_input(f.checkpoint);
  }
  manifest.set_config("budget", Fixed(f.budget));
  manifest.set_config("mode", !f.baseline.empty() ? "baseline:" + f.baseline
                              : f.unsupervised    ? "unsupervised"
                                                  : "supervised");

  auto summarize = [&](const MultiViewSequence& sequence) -> Summary {
    if (f.baseline == "random") return BaselineRandom(sequence, f.budget, f.common.seed);
    if (f.baseline == "merge-views" || f.baseline == "merge-summaries") {
      const StreamSummarizer stream = params ? SupervisedStreamSummarizer(*params, budget)
                                             : UnsupervisedStreamSummarizer(budget);
      return f.baseline == "merge-views" ? BaselineMergeViews(stream, sequence, f.budget)
                                         : BaselineMergeSummaries(stream, sequence, f.budget);
    }
    if (!f.baseline.empty()) {
      Throw(ErrorKind::kConfig, "--baseline must be merge-views, merge-summaries or random");
    }
    if (f.unsupervised) return SummarizeUnsupervised(sequence, budget).result.summary;
    return SummarizeSupervised(*params, sequence, budget).summary;
  };

  std::vector<std::pair<fs::path, fs::path>> jobs;
  std::optional<fs::path> primary;
  if (!f.features_dir.empty()) {
    if (f.out_dir.empty()) Throw(ErrorKind::kConfig, "--features-dir needs --out-dir");
    for (const auto& [id, path] : ListBySuffix(f.features_dir, kFeatureExt)) {
      jobs.emplace_back(path, fs::path(f.out_dir) / (id + std::string(kSummarySuffix)));
    }
    fs::create_directories(f.out_dir);
    primary = fs::path(f.out_dir);
  } else {
    if (f.features.empty() || f.out.empty()) {
      Throw(ErrorKind::kConfig, "summarize needs --features and --out (or the -dir forms)");
    }
    jobs.emplace_back(f.features, f.out);
    primary = fs::path(f.out);
  }
  for (const auto& [input, target] : jobs) {
    const MultiViewSequence sequence = ReadFeatureFile(input);
    WriteSummary(summarize(sequence), target);
    manifest.add_input(input);
    manifest.add_output(target);
  }
  out << "wrote " << jobs.size() << " summaries\n";
  FinishManifest(manifest, f.common, primary, out);
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalFlags {
  Common common;
  std::string summary, truth, features;
  std::string summary_dir, truth_dir, features_dir;
  std::vector<double> thresholds = {0.0, 0.1, 0.2, 0.3};
  std::string report, plot_data;
};

// A truth file is either a summary or an annotation set; annotation sets are
// scored against every user and averaged.
SequenceEval EvaluateAgainst(const Summary& predicted, const fs::path& truth,
                             const MultiViewSequence& sequence, std::span<const double> thresholds) {
  const auto bytes = ReadFileBytes(truth);
  const std::string text(bytes.begin(), bytes.end());
  if (text.find("\"mdpp-annotations\"") == std::string::npos) {
    return EvaluateSequence(predicted, SummaryFromText(text, sequence.shape()), sequence, thresholds);
  }
  const AnnotationSet notes = AnnotationsFromText(text, sequence.shape());
  std::vector<SequenceEval> per_user;
  for (const auto& user : notes.users) {
    per_user.push_back(EvaluateSequence(
        predicted, Summary::FromSelections(notes.sequence_id, user.selections, 1.0), sequence,
        thresholds));
  }
  EvalReport mean = Aggregate(per_user);
  SequenceEval out;
  out.sequence_id = sequence.sequence_id();
  out.exact.precision = mean.precision;
  out.exact.recall = mean.recall;
  out.exact.f1 = mean.f1;
  out.tolerant_f1 = mean.tolerant_f1;
  return out;
}

int RunEval(EvalFlags& f, std::ostream& out) {
  RunManifest manifest("eval");
  manifest.set_seed(f.common.seed);
  std::vector<std::tuple<fs::path, fs::path, fs::path>> jobs;
  if (!f.summary_dir.empty()) {
    if (f.truth_dir.empty() || f.features_dir.empty()) {
      Throw(ErrorKind::kConfig, "--summary-dir needs --truth-dir and --features-dir");
    }
    const auto features = ListBySuffix(f.features_dir, kFeatureExt);
    const auto truth_summaries = ListBySuffix(f.truth_dir, kSummarySuffix);
    const auto truth_notes = ListBySuffix(f.truth_dir, kAnnotationSuffix);
    for (const auto& [id, path] : ListBySuffix(f.summary_dir, kSummarySuffix)) {
      auto fit = features.find(id);
      if (fit == features.end()) Throw(ErrorKind::kValidation, "no feature file for sequence " + id);
      fs::path truth;
      if (auto it = truth_summaries.find(id); it != truth_summaries.end()) {
        truth = it->second;
      } else if (auto nit = truth_notes.find(id); nit != truth_notes.end()) {
        truth = nit->second;
      } else {
        Throw(ErrorKind::kValidation, "no ground truth for sequence " + id);
      }
      jobs.emplace_back(path, truth, fit->second);
    }
  } else {
    if (f.summary.empty() || f.truth.empty() || f.features.empty()) {
      Throw(ErrorKind::kConfig, "eval needs --summary, --truth and --features (or the -dir forms)");
    }
    jobs.emplace_back(f.summary, f.truth, f.features);
  }
  if (jobs.empty()) Throw(ErrorKind::kValidation, "no summaries to evaluate");
  std::vector<SequenceEval> evals;
  for (const auto& [summary_path, truth_path, features_path] : jobs) {
    const MultiViewSequence sequence = ReadFeatureFile(features_path);
    const Summary predicted = ReadSummary(summary_path, sequence.shape());
    evals.push_back(EvaluateAgainst(predicted, truth_path, sequence, f.thresholds));
    manifest.add_input(summary_path);
    manifest.add_input(truth_path);
    manifest.add_input(features_path);
  }
  const EvalReport report = Aggregate(std::move(evals));
  const std::string table = ReportToText(report);
  std::optional<fs::path> primary;
  if (!f.report.empty()) {
    WriteFileAtomic(fs::path(f.report), table);
    manifest.add_output(f.report);
    primary = fs::path(f.report);
  }
  out << table;
  if (!f.plot_data.empty()) {
    WriteFileAtomic(fs::path(f.plot_data), ThresholdCurveToText(report));
    manifest.add_output(f.plot_data);
  }
  FinishManifest(manifest, f.common, primary, out);
  return kExitOk;
}

// ---------------------------------------------------------------- segment

struct SegmentFlags {
  Common common;
  std::string features, out;
  KtsFlags kts;
};

int RunSegment(SegmentFlags& f, std::ostream& out) {
  RunManifest manifest("segment");
  manifest.set_seed(f.common.seed);
  const MultiViewSequence sequence = ReadFeatureFile(f.features);
  manifest.add_input(f.features);
  std::ostringstream text;
  text << "# view\tshot_ends\n";
  for (std::size_t v = 0; v < sequence.num_views(); ++v) {
    const ShotList shots = Kts(sequence.view_matrix(v), f.kts.options()).to_shots();
    text << v << '\t';
    for (std::size_t i = 0; i < shots.num_shots(); ++i) text << (i ? " " : "") << shots.end(i);
    text << '\n';
  }
  std::optional<fs::path> primary;
  if (!f.out.empty()) {
    WriteFileAtomic(fs::path(f.out), text.str());
    manifest.add_output(f.out);
    primary = fs::path(f.out);
  } else {
    out << text.str();
  }
  FinishManifest(manifest, f.common, primary, out);
  return kExitOk;
}

// ---------------------------------------------------------------- check

struct CheckFlags {
  Common common;
  std::string suite = "all";
  std::size_t n = 8;
  std::size_t trials = 50;
};

int RunCheck(CheckFlags& f, std::ostream& out) {
  RunManifest manifest("check");
  manifest.set_seed(f.common.seed);
  manifest.set_config("suite", f.suite);
  std::vector<CheckReport> reports;
  const bool all = f.suite == "all";
  if (all || f.suite == "dpp") reports.push_back(CheckDppNormalization(f.n, f.trials, f.common.seed));
  if (all || f.suite == "greedy") reports.push_back(CheckGreedyModes(f.n, f.trials, f.common.seed));
  if (all || f.suite == "multi-dpp") reports.push_back(CheckMultiDppInvariance(f.trials, f.common.seed));
  if (all || f.suite == "grad") {
    const std::pair<const char*, std::pair<double, double>> variants[] = {
        {"(ce)", {1.0, 0.0}}, {"(dpp)", {0.0, 1.0}}, {"(joint)", {1.0, 1.0}}};
    for (const auto& [suffix, weights] : variants) {
      LossOptions options;
      options.cross_entropy_weight = weights.first;
      options.lambda = weights.second;
      reports.push_back(CheckLossGradient(options, f.common.seed));
      reports.back().name += suffix;
    }
  }
  if (reports.empty()) Throw(ErrorKind::kConfig, "suite must be dpp, greedy, multi-dpp, grad or all");
  bool ok = true;
  for (const auto& r : reports) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " trials=" << r.trials
        << " max_error=" << std::scientific << std::setprecision(3) << r.max_error
        << " tolerance=" << r.tolerance << std::defaultfloat << '\n';
    ok = ok && r.passed;
  }
  FinishManifest(manifest, f.common, std::nullopt, out);
  return ok ? kExitOk : kExitNumeric;
}

// ---------------------------------------------------------------- consensus

struct ConsensusFlags {
  Common common;
  std::string annotations;
};

int RunConsensus(ConsensusFlags& f, std::ostream& out) {
  RunManifest manifest("consensus");
  manifest.set_seed(f.common.seed);
  const AnnotationSet notes = ReadAnnotations(f.annotations);
  manifest.add_input(f.annotations);
  out << "pairwise_f1\t" << Fixed(PairwiseConsensus(notes)) << '\n';
  FinishManifest(manifest, f.common, std::nullopt, out);
  return kExitOk;
}

int ExitCodeFor(ErrorKind kind) {
  return kind == ErrorKind::kNumeric || kind == ErrorKind::kDegenerate ? kExitNumeric : kExitUsage;
}

}  // namespace

TrainSetup ParseTrainConfig(const std::filesystem::path& path, std::size_t input_dim) {
  TrainSetup setup;
  setup.model.input_dim = input_dim;
  if (path.empty()) return setup;
  json doc;
  try {
    const auto bytes = ReadFileBytes(path);
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    Throw(ErrorKind::kConfig, std::string("config file: ") + e.what());
  }
  try {
    auto read_size = [&](std::initializer_list<const char*> keys, std::size_t& target) {
      for (const char* k : keys) {
        if (doc.contains(k)) target = doc.at(k).get<std::size_t>();
      }
    };
    auto read_double = [&](std::initializer_list<const char*> keys, double& target) {
      for (const char* k : keys) {
        if (doc.contains(k)) target = doc.at(k).get<double>();
      }
    };
    std::size_t declared_d = input_dim;
    read_size({"D"}, declared_d);
    if (declared_d != input_dim) {
      Throw(ErrorKind::kConfig, "config D=" + std::to_string(declared_d) + " but features have D=" +
                                    std::to_string(input_dim));
    }
    read_size({"H"}, setup.model.hidden);
    read_size({"D_prime", "D'"}, setup.model.embed_dim);
    read_double({"lambda", "\xce\xbb"}, setup.train.loss.lambda);
    read_double({"learning_rate"}, setup.train.learning_rate);
    read_size({"batch_size"}, setup.train.batch_size);
    read_size({"iterations"}, setup.train.iterations);
    if (doc.contains("bce_full_form")) setup.train.loss.bce_full_form = doc.at("bce_full_form").get<bool>();
    if (doc.contains("normalize_by_n")) setup.train.loss.normalize_by_n = doc.at("normalize_by_n").get<bool>();
    if (doc.contains("seed")) setup.train.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    Throw(ErrorKind::kConfig, std::string("config file: ") + e.what());
  }
  return setup;
}

SplitFile ParseSplit(const std::filesystem::path& path, std::size_t round_robin_index) {
  SplitFile split;
  json doc;
  try {
    const auto bytes = ReadFileBytes(path);
    doc = json::parse(bytes.begin(), bytes.end());
    split.collections = doc.at("collections").get<std::map<std::string, std::vector<std::string>>>();
  } catch (const json::exception& e) {
    Throw(ErrorKind::kConfig, std::string("split file: ") + e.what());
  }
  std::vector<std::string> names;
  for (const auto& [name, ids] : split.collections) names.push_back(name);
  if (doc.contains("train")) {
    try {
      split.plan.train = doc.at("train").get<std::vector<std::string>>();
      split.plan.validation = doc.at("validation").get<std::string>();
      split.plan.test = doc.at("test").get<std::string>();
    } catch (const json::exception& e) {
      Throw(ErrorKind::kConfig, std::string("split file: ") + e.what());
    }
    split.plan.validate(names);
  } else {
    const auto plans = RoundRobinSplits(names);
    if (round_robin_index >= plans.size()) {
      Throw(ErrorKind::kConfig, "--round-robin-index must be < " + std::to_string(plans.size()));
    }
    split.plan = plans[round_robin_index];
  }
  return split;
}

int Dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view summarization with the Multi-DPP", "mdpp"};
  app.require_subcommand(1);
  app.fallthrough(false);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic multi-view sequences");
  AddCommon(synth_cmd, synth.common);
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--count", synth.count, "Number of sequences")->capture_default_str();
  synth_cmd->add_option("--collections", synth.collections, "Collections (round-robin assignment)")
      ->capture_default_str();
  synth_cmd->add_option("--prefix", synth.prefix, "Sequence id prefix")->capture_default_str();
  synth_cmd->add_option("--views", synth.config.num_views, "Views M")->capture_default_str();
  synth_cmd->add_option("--steps", synth.config.num_steps, "Time-steps N")->capture_default_str();
  synth_cmd->add_option("--dim", synth.config.feature_dim, "Feature dimension D")->capture_default_str();
  synth_cmd->add_option("--events", synth.config.num_events, "Planted events K")->capture_default_str();
  synth_cmd->add_option("--min-event-length", synth.config.min_event_length, "Shortest event")
      ->capture_default_str();
  synth_cmd->add_option("--max-event-length", synth.config.max_event_length, "Longest event")
      ->capture_default_str();
  synth_cmd->add_option("--overlap", synth.overlap, "independent | pairwise | full")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.config.noise_sigma, "Feature noise sigma")->capture_default_str();
  synth_cmd->add_option("--palette-seed", synth.config.palette_seed, "Seed of the shared cluster palette")
      ->capture_default_str();
  synth_cmd->add_option("--users", synth.config.num_users, "Simulated annotators")->capture_default_str();
  synth_cmd->add_option("--jitter", synth.config.boundary_jitter, "Annotator boundary trimming")
      ->capture_default_str();
  synth_cmd->add_option("--max-truth-fraction", synth.config.max_truth_fraction,
                        "Cap on ground-truth frames as a fraction of N (0 disables)")
      ->capture_default_str();

  OracleFlags oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Build greedy oracle summaries from annotations");
  AddCommon(oracle_cmd, oracle.common);
  oracle_cmd->add_option("--features", oracle.features, "Feature file");
  oracle_cmd->add_option("--annotations", oracle.annotations, "Annotation file");
  oracle_cmd->add_option("--out", oracle.out, "Output summary file");
  oracle_cmd->add_option("--features-dir", oracle.features_dir, "Directory of feature files");
  oracle_cmd->add_option("--annotations-dir", oracle.annotations_dir, "Directory of annotation files");
  oracle_cmd->add_option("--out-dir", oracle.out_dir, "Directory for oracle summaries");
  oracle_cmd->add_option("--budget", oracle.budget, "Summary length as a fraction of one view")
      ->capture_default_str();
  oracle_cmd->add_option("--shot-length", oracle.shot_length, "Fixed shot length (0 = per-view KTS)")
      ->capture_default_str();
  AddKts(oracle_cmd, oracle.kts);

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Train the Multi-DPP + cross-entropy model");
  AddCommon(train_cmd, train.common);
  train_cmd->add_option("--features-dir", train.features_dir, "Directory of feature files")->required();
  train_cmd->add_option("--oracle-dir", train.oracle_dir, "Directory of oracle summaries")->required();
  train_cmd->add_option("--config", train.config,
                        "JSON config: D, H (128), D_prime (128), lambda (1), bce_full_form (true), "
                        "normalize_by_n (false), learning_rate (0.001), batch_size (10), "
                        "iterations (20), seed (0)");
  train_cmd->add_option("--split", train.split, "JSON split: collections and optional assignment")
      ->required();
  train_cmd->add_option("--round-robin-index", train.round_robin_index,
                        "Plan index when the split file lists collections only")
      ->capture_default_str();
  train_cmd->add_option("--out-checkpoint", train.out_checkpoint, "Checkpoint path")->required();
  train_cmd->add_option("--history-out", train.history_out, "Per-epoch loss table");

  SummarizeFlags summarize;
  auto* summarize_cmd = app.add_subcommand("summarize", "Produce keyshot summaries");
  AddCommon(summarize_cmd, summarize.common);
  summarize_cmd->add_option("--features", summarize.features, "Feature file");
  summarize_cmd->add_option("--out", summarize.out, "Output summary file");
  summarize_cmd->add_option("--features-dir", summarize.features_dir, "Directory of feature files");
  summarize_cmd->add_option("--out-dir", summarize.out_dir, "Directory for summaries");
  summarize_cmd->add_option("--checkpoint", summarize.checkpoint,
                            "Trained model (also drives merge-* baselines)");
  summarize_cmd->add_flag("--unsupervised", summarize.unsupervised, "Unsupervised Multi-DPP greedy MAP");
  summarize_cmd->add_option("--baseline", summarize.baseline, "merge-views | merge-summaries | random");
  summarize_cmd->add_option("--budget", summarize.budget, "Summary length as a fraction of one view")
      ->capture_default_str();
  AddKts(summarize_cmd, summarize.kts);

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score summaries against ground truth");
  AddCommon(eval_cmd, eval.common);
  eval_cmd->add_option("--summary", eval.summary, "Predicted summary");
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth summary or annotation file");
  eval_cmd->add_option("--features", eval.features, "Feature file");
  eval_cmd->add_option("--summary-dir", eval.summary_dir, "Directory of predicted summaries");
  eval_cmd->add_option("--truth-dir", eval.truth_dir, "Directory of ground-truth files");
  eval_cmd->add_option("--features-dir", eval.features_dir, "Directory of feature files");
  eval_cmd->add_option("--thresholds", eval.thresholds, "Similarity thresholds tau")
      ->capture_default_str();
  eval_cmd->add_option("--report", eval.report, "Write the tabular report here");
  eval_cmd->add_option("--plot-data", eval.plot_data, "Write tau/F1 pairs here");

  SegmentFlags segment;
  auto* segment_cmd = app.add_subcommand("segment", "KTS shot boundaries per view");
  AddCommon(segment_cmd, segment.common);
  segment_cmd->add_option("--features", segment.features, "Feature file")->required();
  segment_cmd->add_option("--out", segment.out, "Output file (default stdout)");
  AddKts(segment_cmd, segment.kts);

  CheckFlags check;
  auto* check_cmd = app.add_subcommand("check", "Run brute-force and finite-difference self-checks");
  AddCommon(check_cmd, check.common);
  check_cmd->add_option("suite", check.suite, "dpp | greedy | multi-dpp | grad | all")->capture_default_str();
  check_cmd->add_option("--n", check.n, "Largest ground set")->capture_default_str();
  check_cmd->add_option("--trials", check.trials, "Random trials")->capture_default_str();

  ConsensusFlags consensus;
  auto* consensus_cmd = app.add_subcommand("consensus", "Average pairwise F1 between annotators");
  AddCommon(consensus_cmd, consensus.common);
  consensus_cmd->add_option("--annotations", consensus.annotations, "Annotation file")->required();

  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "mdpp: error[usage]: " << e.what() << '\n'
        << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return RunSynth(synth, out);
    if (oracle_cmd->parsed()) return RunOracle(oracle, out);
    if (train_cmd->parsed()) return RunTrain(train, out);
    if (summarize_cmd->parsed()) return RunSummarize(summarize, out);
    if (eval_cmd->parsed()) return RunEval(eval, out);
    if (segment_cmd->parsed()) return RunSegment(segment, out);
    if (check_cmd->parsed()) return RunCheck(check, out);
    if (consensus_cmd->parsed()) return RunConsensus(consensus, out);
  } catch (const Error& e) {
    err << "mdpp: error[" << ToString(e.kind()) << "]: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "mdpp: error[io]: " << e.what() << '\n';
    return kExitUsage;
  }
  err << "mdpp: error[usage]: no subcommand\n" << app.help();
  return kExitUsage;
}

}  // namespace mdpp::cli
