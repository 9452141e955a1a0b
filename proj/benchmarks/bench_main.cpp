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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mdpp/checks.hpp"
#include "mdpp/dpp.hpp"
#include "mdpp/encoder.hpp"
#include "mdpp/kts.hpp"
#include "mdpp/multi_dpp.hpp"
#include "mdpp/synthgen.hpp"

namespace mdpp {
namespace {

void BM_GreedyMap(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd L = RandomKernel(n, 64, rng).L();
  GreedyOptions options;
  options.max_size = n / 5;
  options.stop = GreedyStop::kFixedSize;
  options.update = state.range(1) == 0 ? GreedyUpdate::kIncrementalCholesky : GreedyUpdate::kRecompute;
  for (auto _ : state) benchmark::DoNotOptimize(GreedyMap(L, options));
}
BENCHMARK(BM_GreedyMap)->ArgsProduct({{100, 300}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_MultiDppLogProbGrad(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  const ViewStreams streams = RandomStreams(m, 300, 64, rng);
  Subset steps;
  for (std::size_t t = 0; t < 300; t += 7) steps.push_back(t);
  for (auto _ : state) benchmark::DoNotOptimize(MultiDppLogProbGrad(streams, steps));
}
BENCHMARK(BM_MultiDppLogProbGrad)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

// One training step's worth of work on a synthetic three-view sequence.
void BM_LossAndGrad(benchmark::State& state) {
  SynthConfig config;
  config.num_views = static_cast<std::size_t>(state.range(0));
  config.max_truth_fraction = 0.0;
  const SynthSequence s = Generate(config);
  Summary truth = Summary::FromSelections(config.sequence_id, s.annotations.users[0].selections, 0.15);
  const TrainingTarget target = TrainingTarget::FromSummary(truth, s.sequence.shape());
  const ModelParams params = ModelParams::Init({config.feature_dim, 64, 64}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(LossAndGrad(params, s.sequence, target));
}
BENCHMARK(BM_LossAndGrad)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Kts(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(16, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(Kts(x));
}
BENCHMARK(BM_Kts)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mdpp

BENCHMARK_MAIN();
