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

#include "mdpp/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "mdpp/error.hpp"

namespace mdpp {
namespace {

// Evaluates fn(i) for i in [0, count) on up to `threads` workers. Results are
// returned by index so reductions stay in a fixed order.
template <typename Fn>
auto ParallelMap(std::size_t count, std::size_t threads, Fn fn) {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> out(count);
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  for (std::size_t start = 0; start < count; start += threads) {
    const std::size_t stop = std::min(count, start + threads);
    std::vector<std::future<Result>> pending;
    for (std::size_t i = start; i < stop; ++i) {
      pending.push_back(std::async(std::launch::async, fn, i));
    }
    for (std::size_t i = start; i < stop; ++i) out[i] = pending[i - start].get();
  }
  return out;
}

std::vector<const Example*> Pick(std::span<const Example> examples,
                                 const std::set<std::string>& collections) {
  std::vector<const Example*> out;
  for (const auto& e : examples) {
    if (collections.count(e.collection)) out.push_back(&e);
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || batch_size == 0 || iterations == 0 || !(beta1 >= 0.0 && beta1 < 1.0) ||
      !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0) || threads == 0) {
    Throw(ErrorKind::kConfig, "training hyperparameters must be positive (betas in [0, 1))");
  }
  if (!(loss.lambda >= 0.0)) Throw(ErrorKind::kConfig, "lambda must be non-negative");
}

void AdamStep(ModelParams& params, const ModelParams& grad, AdamState& state,
              const TrainConfig& config) {
  const auto g = grad.weights();
  auto w = params.weights();
  if (g.size() != w.size()) Throw(ErrorKind::kShape, "gradient and parameter sizes differ");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) {
      Throw(ErrorKind::kNumeric, "non-finite gradient at weight " + std::to_string(i) +
                                     " (Adam step " + std::to_string(state.step + 1) + ")");
    }
  }
  if (state.first_moment.empty()) {
    state.first_moment.assign(w.size(), 0.0);
    state.second_moment.assign(w.size(), 0.0);
  }
  ++state.step;
  const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    m = config.beta1 * m + (1.0 - config.beta1) * g[i];
    v = config.beta2 * v + (1.0 - config.beta2) * g[i] * g[i];
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    w[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

void SplitPlan::validate(std::span<const std::string> collections) const {
  const std::set<std::string> all(collections.begin(), collections.end());
  if (all.size() != collections.size()) Throw(ErrorKind::kConfig, "collection names repeat");
  std::set<std::string> used;
  auto claim = [&](const std::string& name) {
    if (!all.count(name)) Throw(ErrorKind::kConfig, "unknown collection '" + name + "'");
    if (!used.insert(name).second) Throw(ErrorKind::kConfig, "collection '" + name + "' assigned twice");
  };
  if (train.empty()) Throw(ErrorKind::kConfig, "split has no training collection");
  for (const auto& name : train) claim(name);
  claim(validation);
  claim(test);
  if (used != all) Throw(ErrorKind::kConfig, "split does not cover every collection");
}

std::vector<SplitPlan> RoundRobinSplits(std::span<const std::string> collections) {
  if (collections.size() < 3) Throw(ErrorKind::kConfig, "round-robin splitting needs >= 3 collections");
  std::vector<SplitPlan> plans;
  for (std::size_t val = 0; val < collections.size(); ++val) {
    for (std::size_t test = 0; test < collections.size(); ++test) {
      if (test == val) continue;
      SplitPlan plan;
      plan.validation = collections[val];
      plan.test = collections[test];
      for (std::size_t k = 0; k < collections.size(); ++k) {
        if (k != val && k != test) plan.train.push_back(collections[k]);
      }
      plan.validate(collections);
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

double MeanLoss(const ModelParams& params, std::span<const Example> examples,
                const LossOptions& options, std::size_t threads) {
  if (examples.empty()) Throw(ErrorKind::kConfig, "no examples to evaluate");
  const auto losses = ParallelMap(examples.size(), threads, [&](std::size_t i) {
    return Loss(params, examples[i].sequence, examples[i].target, options);
  });
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(examples.size());
}

TrainResult Train(std::span<const Example> train, std::span<const Example> validation,
                  const ModelConfig& model, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  model.validate();
  if (train.empty() || validation.empty()) {
    Throw(ErrorKind::kConfig, "training and validation splits must be non-empty");
  }
  ModelParams params = ModelParams::Init(model, config.seed);
  AdamState adam;
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < config.iterations; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      auto results = ParallelMap(count, config.threads, [&](std::size_t i) {
        const Example& ex = train[order[start + i]];
        return LossAndGrad(params, ex.sequence, ex.target, config.loss);
      });
      ModelParams batch_grad = ModelParams::Zeros(model);
      auto acc = batch_grad.weights();
      const double inv = 1.0 / static_cast<double>(count);
      for (const auto& r : results) {
        epoch_loss += r.loss;
        const auto g = r.grad.weights();
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += inv * g[k];
      }
      AdamStep(params, batch_grad, adam, config);
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(train.size());
    record.validation_loss = MeanLoss(params, validation, config.loss, config.threads);
    if (!std::isfinite(record.validation_loss)) {
      Throw(ErrorKind::kNumeric, "validation loss became non-finite at epoch " + std::to_string(epoch));
    }
    if (record.validation_loss < best_loss) {
      best_loss = record.validation_loss;
      result.best = params;
      result.best_epoch = epoch;
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  return result;
}

TrainResult Train(std::span<const Example> examples, const SplitPlan& plan,
                  const ModelConfig& model, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  std::set<std::string> names(plan.train.begin(), plan.train.end());
  std::vector<Example> train;
  std::vector<Example> validation;
  for (const auto* e : Pick(examples, names)) train.push_back(*e);
  for (const auto* e : Pick(examples, {plan.validation})) validation.push_back(*e);
  return Train(train, validation, model, config, on_epoch);
}

std::size_t ThreadsFromEnvironment() {
  const char* env = std::getenv("MDPP_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || value < 1) {
    Throw(ErrorKind::kConfig, "MDPP_THREADS must be a positive integer");
  }
  return static_cast<std::size_t>(value);
}

std::string HistoryToText(std::span<const EpochRecord> history, std::size_t best_epoch) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch\ttrain_loss\tvalidation_loss\tbest\n";
  for (const auto& r : history) {
    out << r.epoch << '\t' << r.train_loss << '\t' << r.validation_loss << '\t'
        << (r.epoch == best_epoch ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace mdpp
