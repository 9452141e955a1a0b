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

#include "mdpp/encoder.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mdpp/error.hpp"

namespace mdpp {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::array<Block, kNumBlocks> kAllBlocks = {
    Block::kForwardInput,      Block::kForwardRecurrent,  Block::kForwardBias,
    Block::kBackwardInput,     Block::kBackwardRecurrent, Block::kBackwardBias,
    Block::kFeatureHidden,     Block::kFeatureHiddenBias, Block::kFeatureOut,
    Block::kFeatureOutBias,    Block::kQualityHidden,     Block::kQualityHiddenBias,
    Block::kQualityOut,        Block::kQualityOutBias,
};

constexpr std::string_view kCheckpointFormat = "mdpp-checkpoint";
constexpr std::string_view kWeightsMarker = "\n@@weights\n";

std::size_t OffsetOf(const ModelConfig& config, Block b) {
  std::size_t offset = 0;
  for (Block other : kAllBlocks) {
    if (other == b) return offset;
    const auto shape = ShapeOf(config, other);
    offset += static_cast<std::size_t>(shape.rows * shape.cols);
  }
  return offset;
}

double FanIn(const ModelConfig& config, Block b) {
  switch (b) {
    case Block::kForwardInput:
    case Block::kForwardRecurrent:
    case Block::kForwardBias:
    case Block::kBackwardInput:
    case Block::kBackwardRecurrent:
    case Block::kBackwardBias:
      return static_cast<double>(config.hidden);
    case Block::kFeatureHidden:
    case Block::kFeatureHiddenBias:
    case Block::kQualityHidden:
    case Block::kQualityHiddenBias:
      return static_cast<double>(config.spatiotemporal_dim());
    case Block::kFeatureOut:
    case Block::kFeatureOutBias:
      return static_cast<double>(config.embed_dim);
    case Block::kQualityOut:
    case Block::kQualityOutBias:
      return static_cast<double>(config.hidden);
  }
  return 1.0;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double Softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

struct LstmWeights {
  Eigen::Map<const MatrixXd> input;
  Eigen::Map<const MatrixXd> recurrent;
  Eigen::Map<const MatrixXd> bias;
};

struct LstmState {
  MatrixXd gates;
  MatrixXd cell;
  MatrixXd hidden;
};

LstmState RunLstm(const LstmWeights& w, const Eigen::Ref<const MatrixXd>& x, bool reverse) {
  const Index h = w.recurrent.cols();
  const Index n = x.cols();
  LstmState s{MatrixXd(4 * h, n), MatrixXd(h, n), MatrixXd(h, n)};
  const MatrixXd projected = (w.input * x).colwise() + w.bias.col(0);
  VectorXd h_prev = VectorXd::Zero(h);
  VectorXd c_prev = VectorXd::Zero(h);
  for (Index k = 0; k < n; ++k) {
    const Index t = reverse ? n - 1 - k : k;
    VectorXd a = projected.col(t) + w.recurrent * h_prev;
    for (Index j = 0; j < h; ++j) {
      a[j] = Sigmoid(a[j]);
      a[h + j] = Sigmoid(a[h + j]);
      a[2 * h + j] = std::tanh(a[2 * h + j]);
      a[3 * h + j] = Sigmoid(a[3 * h + j]);
    }
    const VectorXd c = a.segment(h, h).cwiseProduct(c_prev) +
                       a.segment(0, h).cwiseProduct(a.segment(2 * h, h));
    const VectorXd hidden = a.segment(3 * h, h).cwiseProduct(c.array().tanh().matrix());
    s.gates.col(t) = a;
    s.cell.col(t) = c;
    s.hidden.col(t) = hidden;
    h_prev = hidden;
    c_prev = c;
  }
  return s;
}

struct LstmGrads {
  Eigen::Map<MatrixXd> input;
  Eigen::Map<MatrixXd> recurrent;
  Eigen::Map<MatrixXd> bias;
};

// Backpropagation through time; `d_hidden` holds the loss gradient reaching
// each hidden output from the layers above.
void BackpropLstm(const LstmWeights& w, const LstmState& s, const Eigen::Ref<const MatrixXd>& x,
                  const MatrixXd& d_hidden, bool reverse, LstmGrads& g) {
  const Index h = w.recurrent.cols();
  const Index n = x.cols();
  VectorXd dh_next = VectorXd::Zero(h);
  VectorXd dc_next = VectorXd::Zero(h);
  MatrixXd d_pre(4 * h, n);
  for (Index k = n - 1; k >= 0; --k) {
    const Index t = reverse ? n - 1 - k : k;
    const bool has_prev = k > 0;
    const Index prev = reverse ? t + 1 : t - 1;
    const auto gates = s.gates.col(t);
    const auto i = gates.segment(0, h).array();
    const auto f = gates.segment(h, h).array();
    const auto gg = gates.segment(2 * h, h).array();
    const auto o = gates.segment(3 * h, h).array();
    const Eigen::ArrayXd tanh_c = s.cell.col(t).array().tanh();
    const Eigen::ArrayXd dh = (d_hidden.col(t) + dh_next).array();
    const Eigen::ArrayXd dc = dc_next.array() + dh * o * (1.0 - tanh_c.square());
    const Eigen::ArrayXd c_prev =
        has_prev ? Eigen::ArrayXd(s.cell.col(prev).array()) : Eigen::ArrayXd::Zero(h);

    auto da = d_pre.col(t);
    da.segment(0, h) = (dc * gg * i * (1.0 - i)).matrix();
    da.segment(h, h) = (dc * c_prev * f * (1.0 - f)).matrix();
    da.segment(2 * h, h) = (dc * i * (1.0 - gg.square())).matrix();
    da.segment(3 * h, h) = (dh * tanh_c * o * (1.0 - o)).matrix();

    if (has_prev) g.recurrent.noalias() += da * s.hidden.col(prev).transpose();
    dh_next = w.recurrent.transpose() * da;
    dc_next = (dc * f).matrix();
  }
  g.input.noalias() += d_pre * x.transpose();
  g.bias.col(0) += d_pre.rowwise().sum();
}

void CheckSequence(const ModelParams& params, const MultiViewSequence& sequence) {
  if (sequence.feature_dim() != params.config().input_dim) {
    Throw(ErrorKind::kShape, "sequence has D=" + std::to_string(sequence.feature_dim()) +
                                 " but the model expects D=" +
                                 std::to_string(params.config().input_dim));
  }
}

struct Heads {
  double cross_entropy = 0.0;
  MatrixXd d_logits;  // M x N
};

Heads CrossEntropy(const ForwardTrace& trace, const TrainingTarget& target,
                   const LossOptions& options) {
  const auto m = trace.probability.rows();
  const auto n = trace.probability.cols();
  double scale = options.cross_entropy_weight / static_cast<double>(m);
  if (options.normalize_by_n) scale /= static_cast<double>(n);
  Heads out{0.0, MatrixXd::Zero(m, n)};
  for (Index v = 0; v < m; ++v) {
    for (Index t = 0; t < n; ++t) {
      const double a = trace.views[v].logits[t];
      const double y = target.views(v, t);
      const double p = trace.probability(v, t);
      // -log p = softplus(-a), -log(1-p) = softplus(a).
      double loss = y * Softplus(-a);
      double d = y * (p - 1.0);
      if (options.bce_full_form) {
        loss += (1.0 - y) * Softplus(a);
        d = p - y;
      }
      out.cross_entropy += scale * loss;
      out.d_logits(v, t) = scale * d;
    }
  }
  return out;
}

}  // namespace

void ModelConfig::validate() const {
  if (input_dim == 0 || hidden == 0 || embed_dim == 0) {
    Throw(ErrorKind::kConfig, "model dimensions D, H and D' must be positive");
  }
}

BlockShape ShapeOf(const ModelConfig& c, Block b) {
  const auto d = static_cast<Index>(c.input_dim);
  const auto h = static_cast<Index>(c.hidden);
  const auto e = static_cast<Index>(c.embed_dim);
  const auto s = static_cast<Index>(c.spatiotemporal_dim());
  switch (b) {
    case Block::kForwardInput:
    case Block::kBackwardInput: return {4 * h, d};
    case Block::kForwardRecurrent:
    case Block::kBackwardRecurrent: return {4 * h, h};
    case Block::kForwardBias:
    case Block::kBackwardBias: return {4 * h, 1};
    case Block::kFeatureHidden: return {e, s};
    case Block::kFeatureHiddenBias: return {e, 1};
    case Block::kFeatureOut: return {e, e};
    case Block::kFeatureOutBias: return {e, 1};
    case Block::kQualityHidden: return {h, s};
    case Block::kQualityHiddenBias: return {h, 1};
    case Block::kQualityOut: return {1, h};
    case Block::kQualityOutBias: return {1, 1};
  }
  return {0, 0};
}

ModelParams::ModelParams(const ModelConfig& config, std::vector<double> weights,
                         std::uint64_t seed)
    : config_(config), weights_(std::move(weights)), seed_(seed) {
  config_.validate();
  if (weights_.size() != CountFor(config_)) {
    Throw(ErrorKind::kShape, "expected " + std::to_string(CountFor(config_)) +
                                 " weights, got " + std::to_string(weights_.size()));
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) Throw(ErrorKind::kData, "non-finite model weight");
  }
}

std::size_t ModelParams::CountFor(const ModelConfig& config) {
  config.validate();
  std::size_t total = 0;
  for (Block b : kAllBlocks) {
    const auto shape = ShapeOf(config, b);
    total += static_cast<std::size_t>(shape.rows * shape.cols);
  }
  return total;
}

ModelParams ModelParams::Init(const ModelConfig& config, std::uint64_t seed) {
  std::vector<double> weights(CountFor(config));
  std::mt19937_64 rng(seed);
  std::size_t offset = 0;
  for (Block b : kAllBlocks) {
    const auto shape = ShapeOf(config, b);
    const double bound = 1.0 / std::sqrt(FanIn(config, b));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const auto count = static_cast<std::size_t>(shape.rows * shape.cols);
    for (std::size_t i = 0; i < count; ++i) weights[offset + i] = dist(rng);
    offset += count;
  }
  return {config, std::move(weights), seed};
}

ModelParams ModelParams::Zeros(const ModelConfig& config) {
  return {config, std::vector<double>(CountFor(config), 0.0), 0};
}

Eigen::Map<MatrixXd> ModelParams::block(Block b) {
  const auto shape = ShapeOf(config_, b);
  return {weights_.data() + OffsetOf(config_, b), shape.rows, shape.cols};
}

Eigen::Map<const MatrixXd> ModelParams::block(Block b) const {
  const auto shape = ShapeOf(config_, b);
  return {weights_.data() + OffsetOf(config_, b), shape.rows, shape.cols};
}

double ModelParams::squared_norm() const {
  double sum = 0.0;
  for (double w : weights_) sum += w * w;
  return sum;
}

double ModelParams::block_squared_norm(std::initializer_list<Block> blocks) const {
  double sum = 0.0;
  for (Block b : blocks) sum += block(b).squaredNorm();
  return sum;
}

ForwardTrace Forward(const ModelParams& params, const MultiViewSequence& sequence) {
  CheckSequence(params, sequence);
  const auto& c = params.config();
  const auto h = static_cast<Index>(c.hidden);
  const auto d = static_cast<Index>(c.input_dim);
  const auto n = static_cast<Index>(sequence.num_steps());
  const auto m = static_cast<Index>(sequence.num_views());

  const LstmWeights fwd{params.block(Block::kForwardInput), params.block(Block::kForwardRecurrent),
                        params.block(Block::kForwardBias)};
  const LstmWeights bwd{params.block(Block::kBackwardInput),
                        params.block(Block::kBackwardRecurrent), params.block(Block::kBackwardBias)};

  ForwardTrace trace;
  trace.views.resize(static_cast<std::size_t>(m));
  trace.streams.quality.resize(m, n);
  trace.probability.resize(m, n);
  for (Index v = 0; v < m; ++v) {
    auto& act = trace.views[v];
    const auto x = sequence.view_matrix(static_cast<std::size_t>(v));
    auto f = RunLstm(fwd, x, false);
    auto b = RunLstm(bwd, x, true);
    act.spatiotemporal.resize(d + 2 * h, n);
    act.spatiotemporal.topRows(d) = x;
    act.spatiotemporal.middleRows(d, h) = f.hidden;
    act.spatiotemporal.bottomRows(h) = b.hidden;
    act.forward_gates = std::move(f.gates);
    act.forward_cell = std::move(f.cell);
    act.forward_hidden = std::move(f.hidden);
    act.backward_gates = std::move(b.gates);
    act.backward_cell = std::move(b.cell);
    act.backward_hidden = std::move(b.hidden);

    act.feature_hidden = ((params.block(Block::kFeatureHidden) * act.spatiotemporal).colwise() +
                          params.block(Block::kFeatureHiddenBias).col(0))
                             .array()
                             .tanh()
                             .matrix();
    act.feature_raw = (params.block(Block::kFeatureOut) * act.feature_hidden).colwise() +
                      params.block(Block::kFeatureOutBias).col(0);
    MatrixXd unit = act.feature_raw;
    for (Index t = 0; t < n; ++t) {
      const double norm = unit.col(t).norm();
      if (!(norm > 0.0)) {
        Throw(ErrorKind::kDegenerate, "feature head produced a zero vector");
      }
      unit.col(t) /= norm;
    }
    trace.streams.features.push_back(std::move(unit));

    act.quality_hidden = ((params.block(Block::kQualityHidden) * act.spatiotemporal).colwise() +
                          params.block(Block::kQualityHiddenBias).col(0))
                             .array()
                             .tanh()
                             .matrix();
    act.logits = (params.block(Block::kQualityOut) * act.quality_hidden).transpose();
    act.logits.array() += params.block(Block::kQualityOutBias)(0, 0);
    for (Index t = 0; t < n; ++t) {
      const double p = Sigmoid(act.logits[t]);
      trace.probability(v, t) = p;
      trace.streams.quality(v, t) = std::clamp(p, kQualityFloor, 1.0);
    }
  }
  return trace;
}

TrainingTarget TrainingTarget::FromSummary(const Summary& summary, SequenceShape shape) {
  TrainingTarget target;
  target.views = MatrixXd::Zero(static_cast<Index>(shape.num_views),
                                static_cast<Index>(shape.num_steps));
  std::set<std::size_t> steps;
  for (const auto& s : summary.selections) {
    if (s.view >= shape.num_views || s.t >= shape.num_steps) {
      Throw(ErrorKind::kIndex, "summary selection outside the sequence");
    }
    target.views(static_cast<Index>(s.view), static_cast<Index>(s.t)) = 1.0;
    steps.insert(s.t);
  }
  target.steps.assign(steps.begin(), steps.end());
  return target;
}

void TrainingTarget::validate(SequenceShape shape) const {
  if (views.rows() != static_cast<Index>(shape.num_views) ||
      views.cols() != static_cast<Index>(shape.num_steps)) {
    Throw(ErrorKind::kShape, "target matrix must be M x N");
  }
  std::vector<bool> expected(shape.num_steps, false);
  for (Index v = 0; v < views.rows(); ++v) {
    for (Index t = 0; t < views.cols(); ++t) {
      const double y = views(v, t);
      if (y != 0.0 && y != 1.0) Throw(ErrorKind::kValidation, "view targets must be binary");
      if (y == 1.0) expected[static_cast<std::size_t>(t)] = true;
    }
  }
  std::vector<bool> given(shape.num_steps, false);
  for (std::size_t t : steps) {
    if (t >= shape.num_steps) Throw(ErrorKind::kIndex, "target step out of range");
    if (given[t]) Throw(ErrorKind::kValidation, "target step repeated");
    given[t] = true;
  }
  if (given != expected) {
    Throw(ErrorKind::kValidation, "target steps must be exactly the steps selected in some view");
  }
}

double Loss(const ModelParams& params, const MultiViewSequence& sequence,
            const TrainingTarget& target, const LossOptions& options) {
  target.validate(sequence.shape());
  const ForwardTrace trace = Forward(params, sequence);
  double loss = CrossEntropy(trace, target, options).cross_entropy;
  if (options.lambda != 0.0) loss -= options.lambda * MultiDppLogProb(trace.streams, target.steps);
  return loss;
}

LossResult LossAndGrad(const ModelParams& params, const MultiViewSequence& sequence,
                       const TrainingTarget& target, const LossOptions& options) {
  target.validate(sequence.shape());
  const auto& c = params.config();
  if (options.lambda != 0.0 && target.steps.size() > c.embed_dim) {
    // Rank of the joint kernel is at most D', so such a target has probability zero.
    Throw(ErrorKind::kConfig, "target has " + std::to_string(target.steps.size()) +
                                  " steps but D' = " + std::to_string(c.embed_dim) +
                                  "; the DPP term needs D' >= |target|");
  }
  const auto h = static_cast<Index>(c.hidden);
  const auto d = static_cast<Index>(c.input_dim);
  const auto e = static_cast<Index>(c.embed_dim);
  const auto n = static_cast<Index>(sequence.num_steps());
  const auto m = static_cast<Index>(sequence.num_views());

  const ForwardTrace trace = Forward(params, sequence);
  Heads heads = CrossEntropy(trace, target, options);

  LossResult result;
  result.cross_entropy = heads.cross_entropy;
  result.grad = ModelParams::Zeros(c);

  // d loss / d per-view feature and d loss / d logit.
  std::vector<MatrixXd> d_features(static_cast<std::size_t>(m), MatrixXd::Zero(e, n));
  MatrixXd d_logits = std::move(heads.d_logits);
  if (options.lambda != 0.0) {
    const StreamGradient g = MultiDppLogProbGrad(trace.streams, target.steps);
    result.dpp_nll = -g.log_prob;
    for (Index v = 0; v < m; ++v) {
      d_features[v] = -options.lambda * g.d_features[v];
      for (Index t = 0; t < n; ++t) {
        const double p = trace.probability(v, t);
        if (p < kQualityFloor) continue;  // clamp active
        d_logits(v, t) += -options.lambda * g.d_quality(v, t) * p * (1.0 - p);
      }
    }
  }
  result.loss = result.cross_entropy + options.lambda * result.dpp_nll;

  ModelParams& grad = result.grad;
  const LstmWeights fwd{params.block(Block::kForwardInput), params.block(Block::kForwardRecurrent),
                        params.block(Block::kForwardBias)};
  const LstmWeights bwd{params.block(Block::kBackwardInput),
                        params.block(Block::kBackwardRecurrent), params.block(Block::kBackwardBias)};
  LstmGrads g_fwd{grad.block(Block::kForwardInput), grad.block(Block::kForwardRecurrent),
                  grad.block(Block::kForwardBias)};
  LstmGrads g_bwd{grad.block(Block::kBackwardInput), grad.block(Block::kBackwardRecurrent),
                  grad.block(Block::kBackwardBias)};

  for (Index v = 0; v < m; ++v) {
    const auto& act = trace.views[v];
    const auto& unit = trace.streams.features[v];
    MatrixXd d_spatiotemporal = MatrixXd::Zero(d + 2 * h, n);

    if (options.lambda != 0.0) {
      // Unit rescaling: d raw = (g - u (u . g)) / |raw|.
      MatrixXd d_raw(e, n);
      for (Index t = 0; t < n; ++t) {
        const double norm = act.feature_raw.col(t).norm();
        const double proj = unit.col(t).dot(d_features[v].col(t));
        d_raw.col(t) = (d_features[v].col(t) - unit.col(t) * proj) / norm;
      }
      grad.block(Block::kFeatureOut).noalias() += d_raw * act.feature_hidden.transpose();
      grad.block(Block::kFeatureOutBias).col(0) += d_raw.rowwise().sum();
      const MatrixXd d_hidden_pre =
          (params.block(Block::kFeatureOut).transpose() * d_raw)
              .cwiseProduct((1.0 - act.feature_hidden.array().square()).matrix());
      grad.block(Block::kFeatureHidden).noalias() += d_hidden_pre * act.spatiotemporal.transpose();
      grad.block(Block::kFeatureHiddenBias).col(0) += d_hidden_pre.rowwise().sum();
      d_spatiotemporal.noalias() += params.block(Block::kFeatureHidden).transpose() * d_hidden_pre;
    }

    const Eigen::RowVectorXd dl = d_logits.row(v);
    grad.block(Block::kQualityOut).noalias() += dl * act.quality_hidden.transpose();
    grad.block(Block::kQualityOutBias)(0, 0) += dl.sum();
    const MatrixXd d_qhidden_pre =
        (params.block(Block::kQualityOut).transpose() * dl)
            .cwiseProduct((1.0 - act.quality_hidden.array().square()).matrix());
    grad.block(Block::kQualityHidden).noalias() += d_qhidden_pre * act.spatiotemporal.transpose();
    grad.block(Block::kQualityHiddenBias).col(0) += d_qhidden_pre.rowwise().sum();
    d_spatiotemporal.noalias() += params.block(Block::kQualityHidden).transpose() * d_qhidden_pre;

    const auto x = sequence.view_matrix(static_cast<std::size_t>(v));
    const LstmState f{act.forward_gates, act.forward_cell, act.forward_hidden};
    const LstmState b{act.backward_gates, act.backward_cell, act.backward_hidden};
    BackpropLstm(fwd, f, x, d_spatiotemporal.middleRows(d, h), false, g_fwd);
    BackpropLstm(bwd, b, x, d_spatiotemporal.bottomRows(h), true, g_bwd);
  }
  return result;
}

std::vector<std::uint8_t> EncodeCheckpoint(const ModelParams& params,
                                           const std::map<std::string, std::string>& metadata) {
  const auto& c = params.config();
  nlohmann::json header = {{"format", kCheckpointFormat},
                           {"version", 1},
                           {"D", c.input_dim},
                           {"H", c.hidden},
                           {"D_prime", c.embed_dim},
                           {"seed", params.seed()},
                           {"num_weights", params.size()},
                           {"dtype", "f64le"},
                           {"metadata", metadata}};
  const std::string text = header.dump(2);
  std::vector<std::uint8_t> out(text.begin(), text.end());
  out.insert(out.end(), kWeightsMarker.begin(), kWeightsMarker.end());
  for (double w : params.weights()) {
    const auto bits = std::bit_cast<std::uint64_t>(w);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return out;
}

ModelParams DecodeCheckpoint(std::span<const std::uint8_t> bytes,
                             std::map<std::string, std::string>* metadata) {
  const std::string_view all(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const auto marker = all.find(kWeightsMarker);
  if (marker == std::string_view::npos) Throw(ErrorKind::kFormat, "checkpoint has no weights marker");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(all.substr(0, marker));
  } catch (const nlohmann::json::parse_error& err) {
    Throw(ErrorKind::kFormat, std::string("checkpoint header: ") + err.what());
  }
  if (header.value("format", "") != kCheckpointFormat || header.value("version", 0) != 1 ||
      header.value("dtype", "") != "f64le") {
    Throw(ErrorKind::kFormat, "not a version-1 f64le mdpp checkpoint");
  }
  ModelConfig config;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  try {
    config.input_dim = header.at("D").get<std::size_t>();
    config.hidden = header.at("H").get<std::size_t>();
    config.embed_dim = header.at("D_prime").get<std::size_t>();
    seed = header.at("seed").get<std::uint64_t>();
    count = header.at("num_weights").get<std::size_t>();
    if (metadata) *metadata = header.value("metadata", std::map<std::string, std::string>{});
  } catch (const nlohmann::json::exception& err) {
    Throw(ErrorKind::kFormat, std::string("checkpoint header: ") + err.what());
  }
  const std::size_t start = marker + kWeightsMarker.size();
  if (bytes.size() - start != 8 * count) {
    Throw(ErrorKind::kLength, "checkpoint declares " + std::to_string(count) + " weights but holds " +
                                  std::to_string((bytes.size() - start) / 8));
  }
  std::vector<double> weights(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) {
      bits |= static_cast<std::uint64_t>(bytes[start + 8 * i + k]) << (8 * k);
    }
    weights[i] = std::bit_cast<double>(bits);
  }
  return {config, std::move(weights), seed};
}

void WriteCheckpoint(const ModelParams& params, const std::filesystem::path& path,
                     const std::map<std::string, std::string>& metadata) {
  WriteFileAtomic(path, EncodeCheckpoint(params, metadata));
}

ModelParams ReadCheckpoint(const std::filesystem::path& path,
                           std::map<std::string, std::string>* metadata) {
  return DecodeCheckpoint(ReadFileBytes(path), metadata);
}

}  // namespace mdpp
