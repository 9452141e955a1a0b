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

#ifndef MDPP_ENCODER_HPP_
#define MDPP_ENCODER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdpp/data_model.hpp"
#include "mdpp/multi_dpp.hpp"

namespace mdpp {

// Architecture sizes. The trainable parameter count depends on these three
// numbers only, never on the number of views or steps.
struct ModelConfig {
  std::size_t input_dim = 0;    // D, per-frame input feature size
  std::size_t hidden = 128;     // H, LSTM state size per direction
  std::size_t embed_dim = 128;  // D', size of the diversity features

  std::size_t spatiotemporal_dim() const { return input_dim + 2 * hidden; }
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Named slices of the flat weight vector, in storage order.
enum class Block {
  kForwardInput,       // 4H x D
  kForwardRecurrent,   // 4H x H
  kForwardBias,        // 4H
  kBackwardInput,      // 4H x D
  kBackwardRecurrent,  // 4H x H
  kBackwardBias,       // 4H
  kFeatureHidden,      // D' x S
  kFeatureHiddenBias,  // D'
  kFeatureOut,         // D' x D'
  kFeatureOutBias,     // D'
  kQualityHidden,      // H x S
  kQualityHiddenBias,  // H
  kQualityOut,         // 1 x H
  kQualityOutBias,     // 1
};
inline constexpr std::size_t kNumBlocks = 14;

// Shared weights of the bidirectional LSTM, the feature head and the quality
// head. Gradients use the same type.
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(const ModelConfig& config, std::vector<double> weights, std::uint64_t seed = 0);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every block.
  static ModelParams Init(const ModelConfig& config, std::uint64_t seed);
  static ModelParams Zeros(const ModelConfig& config);
  static std::size_t CountFor(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return weights_.size(); }
  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }

  Eigen::Map<Eigen::MatrixXd> block(Block b);
  Eigen::Map<const Eigen::MatrixXd> block(Block b) const;

  double squared_norm() const;
  double block_squared_norm(std::initializer_list<Block> blocks) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  ModelConfig config_;
  std::vector<double> weights_;
  std::uint64_t seed_ = 0;
};

struct BlockShape {
  Eigen::Index rows;
  Eigen::Index cols;
};
BlockShape ShapeOf(const ModelConfig& config, Block b);

// Activations of one view, kept for the backward pass. Columns index time.
struct ViewActivations {
  Eigen::MatrixXd forward_gates;   // 4H x N, post-nonlinearity (i, f, g, o)
  Eigen::MatrixXd forward_cell;    // H x N
  Eigen::MatrixXd forward_hidden;  // H x N
  Eigen::MatrixXd backward_gates;
  Eigen::MatrixXd backward_cell;
  Eigen::MatrixXd backward_hidden;
  Eigen::MatrixXd spatiotemporal;   // S x N: [input; forward h; backward h]
  Eigen::MatrixXd feature_hidden;   // D' x N, tanh output
  Eigen::MatrixXd feature_raw;      // D' x N, before unit rescaling
  Eigen::MatrixXd quality_hidden;   // H x N, tanh output
  Eigen::VectorXd logits;           // N
};

struct ForwardTrace {
  std::vector<ViewActivations> views;
  ViewStreams streams;
  Eigen::MatrixXd probability;  // M x N, logistic output before the floor clamp
};

ForwardTrace Forward(const ModelParams& params, const MultiViewSequence& sequence);

// Per-view binary targets (M x N) plus the time-steps selected in any view.
struct TrainingTarget {
  Eigen::MatrixXd views;
  Subset steps;

  static TrainingTarget FromSummary(const Summary& summary, SequenceShape shape);
  void validate(SequenceShape shape) const;
};

struct LossOptions {
  double lambda = 1.0;          // weight of the Multi-DPP negative log-likelihood
  bool bce_full_form = true;    // include the -(1-y) log(1-p) term
  bool normalize_by_n = false;  // divide cross-entropy by N as well as by M
  double cross_entropy_weight = 1.0;  // 0 leaves the Multi-DPP term alone
};

struct LossResult {
  double loss = 0.0;
  double cross_entropy = 0.0;
  double dpp_nll = 0.0;
  ModelParams grad;
};

// Loss = CE(targets, p) + lambda * (-log P_multi-dpp(target steps)), with
// exact reverse-mode gradients for every weight.
LossResult LossAndGrad(const ModelParams& params, const MultiViewSequence& sequence,
                       const TrainingTarget& target, const LossOptions& options = {});

// Same value as LossAndGrad without the backward pass.
double Loss(const ModelParams& params, const MultiViewSequence& sequence,
            const TrainingTarget& target, const LossOptions& options = {});

// Checkpoint: a JSON header, a "@@weights" line, then float64 little-endian
// weights.
void WriteCheckpoint(const ModelParams& params, const std::filesystem::path& path,
                     const std::map<std::string, std::string>& metadata = {});
ModelParams ReadCheckpoint(const std::filesystem::path& path,
                           std::map<std::string, std::string>* metadata = nullptr);
std::vector<std::uint8_t> EncodeCheckpoint(const ModelParams& params,
                                           const std::map<std::string, std::string>& metadata);
ModelParams DecodeCheckpoint(std::span<const std::uint8_t> bytes,
                             std::map<std::string, std::string>* metadata = nullptr);

}  // namespace mdpp

#endif  // MDPP_ENCODER_HPP_
