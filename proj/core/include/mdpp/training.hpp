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

#ifndef MDPP_TRAINING_HPP_
#define MDPP_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mdpp/data_model.hpp"
#include "mdpp/encoder.hpp"

namespace mdpp {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 10;
  std::size_t iterations = 20;  // epochs; validation runs after each one
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  LossOptions loss;
  std::size_t threads = 1;  // per-sequence gradient workers

  void validate() const;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;
};

// One bias-corrected Adam update. Throws kNumeric on a non-finite gradient
// and leaves `params` and `state` untouched in that case.
void AdamStep(ModelParams& params, const ModelParams& grad, AdamState& state,
              const TrainConfig& config);

// Collections used for training, validation and testing in one round.
struct SplitPlan {
  std::vector<std::string> train;
  std::string validation;
  std::string test;

  // Throws kConfig unless the plan is a disjoint, exhaustive assignment of
  // `collections`.
  void validate(std::span<const std::string> collections) const;
};

// Every ordered (validation, test) pair of distinct collections, the rest
// training: K * (K - 1) plans. Requires K >= 3.
std::vector<SplitPlan> RoundRobinSplits(std::span<const std::string> collections);

struct Example {
  MultiViewSequence sequence;
  TrainingTarget target;
  std::string collection;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;       // mean per-sequence loss seen during the epoch
  double validation_loss = 0.0;  // mean per-sequence loss after the epoch
};

struct TrainResult {
  ModelParams best;
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> history;
};

// Called after every epoch with the record just appended.
using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult Train(std::span<const Example> train, std::span<const Example> validation,
                  const ModelConfig& model, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Selects the train and validation examples by collection name.
TrainResult Train(std::span<const Example> examples, const SplitPlan& plan,
                  const ModelConfig& model, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

double MeanLoss(const ModelParams& params, std::span<const Example> examples,
                const LossOptions& options, std::size_t threads = 1);

// Worker count from MDPP_THREADS, defaulting to 1.
std::size_t ThreadsFromEnvironment();

std::string HistoryToText(std::span<const EpochRecord> history, std::size_t best_epoch);

}  // namespace mdpp

#endif  // MDPP_TRAINING_HPP_
