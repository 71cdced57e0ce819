/*
 * Copyright 2026 The powerpool Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "powerpool/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "powerpool/errors.hpp"
#include "powerpool/rng.hpp"

namespace powerpool {

namespace {

Eigen::ArrayXd label_array(const std::vector<int>& labels) {
  Eigen::ArrayXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t c = 0; c < labels.size(); ++c) y[static_cast<Eigen::Index>(c)] = labels[c];
  return y;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !(effective_power_learning_rate() > 0.0)) {
    throw ConfigError("train: learning rates must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train: momentum must lie in [0, 1)");
  if (!(lambda >= 0.0)) throw ConfigError("train: lambda must be >= 0");
  if (hidden_dim < 1) throw ConfigError("train: hidden_dim must be >= 1");
  if (!(shift_std_frames >= 0.0)) throw ConfigError("train: shift_std_frames must be >= 0");
}

double clip_loss(const ClipProbs& clip_probs, const std::vector<int>& weak_labels,
                 const PowerParams* power) {
  if (static_cast<std::size_t>(clip_probs.size()) != weak_labels.size()) {
    throw StructuralError("clip loss: one label per class required");
  }
  const Eigen::ArrayXd p = clip_probs.array().max(kProbEpsilon).min(1.0 - kProbEpsilon);
  const Eigen::ArrayXd y = label_array(weak_labels);
  const double bce = -(y * p.log() + (1.0 - y) * (1.0 - p).log()).mean();
  return bce + (power ? power->regularizer() : 0.0);
}

BatchGradient batch_gradient(const ScorerWeights& weights, const PoolingSpec& pooling,
                             std::span<const Bag> batch) {
  if (batch.empty()) throw StructuralError("batch gradient: empty batch");
  const bool power = pooling.kind == PoolingKind::Power;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const double class_scale = 1.0 / static_cast<double>(weights.num_classes());

  BatchGradient out;
  out.scorer = weights.zeros_like();
  if (power) out.power_raw = Eigen::VectorXd::Zero(pooling.power->raw.size());

  for (const Bag& bag : batch) {
    const ScorerActivations act = scorer_forward(weights, bag.features);
    const ClipProbs yc = pool_forward(pooling, act.probs);
    out.loss += scale * clip_loss(yc, bag.weak_labels);

    // d(mean BCE)/dy^c; y^c already lies in [eps, 1 - eps].
    const Eigen::ArrayXd y = label_array(bag.weak_labels);
    const ClipProbs upstream =
        (scale * class_scale * (yc.array() - y) / (yc.array() * (1.0 - yc.array()))).matrix();

    const FrameProbs d_probs = pool_backward(pooling, act.probs, upstream);
    out.scorer += scorer_backward(weights, bag.features, act, d_probs);
    if (power) out.power_raw += power_data_gradient(*pooling.power, act.probs, upstream);
  }
  if (power) {
    out.loss += pooling.power->regularizer();
    out.power_raw += pooling.power->regularizer_gradient();
  }
  return out;
}

MomentumSgd::MomentumSgd(const TrainState& state, double momentum)
    : momentum_(momentum), velocity_(state.weights.zeros_like()) {
  if (state.pooling.power) power_velocity_ = Eigen::VectorXd::Zero(state.pooling.power->raw.size());
}

void MomentumSgd::step(TrainState& state, const BatchGradient& grad, double learning_rate,
                       double power_learning_rate) {
  velocity_ *= momentum_;
  velocity_ += grad.scorer;
  ScorerWeights delta = velocity_;
  delta *= -learning_rate;
  state.weights += delta;
  if (state.pooling.power && grad.power_raw.size() > 0) {
    power_velocity_ = momentum_ * power_velocity_ + grad.power_raw;
    state.pooling.power->raw -= power_learning_rate * power_velocity_;
  }
}

TrainState init_train_state(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.bags.empty()) throw StructuralError("train: dataset is empty");
  TrainState state;
  ScorerConfig scorer;
  scorer.input_dim = dataset.input_dim();
  scorer.hidden_dim = config.hidden_dim;
  scorer.num_classes = dataset.num_classes;
  scorer.seed = mix_seed(config.seed, 0x5C0BE5ULL);
  state.weights = init_weights(scorer);
  state.pooling = PoolingSpec::make(config.pooling, dataset.num_classes, config.lambda);
  return state;
}

TrainState train(const Dataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch) {
  TrainState state = init_train_state(dataset, config);
  MomentumSgd optimizer(state, config.momentum);

  std::vector<std::size_t> order(dataset.bags.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Bag> batch;
  batch.reserve(config.batch_size);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::mt19937_64 shuffle_rng(mix_seed(config.seed, 2 * epoch + 1));
    std::mt19937_64 augment_rng(mix_seed(config.seed, 2 * epoch + 2));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      batch.clear();
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      for (std::size_t k = start; k < end; ++k) {
        const Bag& bag = dataset.bags[order[k]];
        batch.push_back(config.augment ? time_shift_augment(bag, augment_rng, dataset.frame_hop_s,
                                                            config.shift_std_frames)
                                       : bag);
      }
      const BatchGradient grad = batch_gradient(state.weights, state.pooling, batch);
      const bool finite = std::isfinite(grad.loss) && grad.scorer.all_finite() &&
                          (grad.power_raw.size() == 0 || grad.power_raw.allFinite());
      if (!finite) {
        std::ostringstream msg;
        msg << "non-finite loss or gradient at epoch " << epoch + 1 << ", batch " << batches
            << " (scorer weight norm " << std::sqrt(state.weights.squared_norm());
        if (state.pooling.power) msg << ", power parameter norm " << state.pooling.power->raw.norm();
        msg << ")";
        throw NumericalError(msg.str());
      }
      optimizer.step(state, grad, config.learning_rate, config.effective_power_learning_rate());
      epoch_loss += grad.loss;
      ++batches;
    }

    state.epoch = epoch + 1;
    state.loss_history.push_back(epoch_loss / static_cast<double>(batches));
    if (state.pooling.power) state.exponent_history.push_back(state.pooling.power->exponents());
    if (on_epoch) on_epoch(state);
  }
  return state;
}

Predictions predict(const ScorerWeights& weights, const PoolingSpec& pooling,
                    const std::vector<Bag>& bags) {
  Predictions out;
  out.frame_probs.reserve(bags.size());
  out.clip_probs.resize(static_cast<Eigen::Index>(bags.size()),
                        static_cast<Eigen::Index>(weights.num_classes()));
  for (std::size_t i = 0; i < bags.size(); ++i) {
    FrameProbs probs = score_frames(weights, bags[i].features);
    out.clip_probs.row(static_cast<Eigen::Index>(i)) = pool_forward(pooling, probs).transpose();
    out.frame_probs.push_back(std::move(probs));
  }
  return out;
}

}  // namespace powerpool
