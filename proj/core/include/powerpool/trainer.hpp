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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "powerpool/pooling.hpp"
#include "powerpool/scorer.hpp"
#include "powerpool/synth.hpp"

namespace powerpool {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 0.5;
  /// Step size for the power-pooling exponents; defaults to learning_rate.
  std::optional<double> power_learning_rate;
  double momentum = 0.9;
  double lambda = 1e-4;
  PoolingKind pooling = PoolingKind::LinearSoftmax;
  bool augment = false;
  double shift_std_frames = 16.0;
  std::size_t hidden_dim = 32;
  std::uint64_t seed = 0;

  double effective_power_learning_rate() const {
    return power_learning_rate.value_or(learning_rate);
  }
  void validate() const;
};

struct TrainState {
  ScorerWeights weights;
  PoolingSpec pooling;
  std::size_t epoch = 0;
  /// Mean batch loss of every completed epoch.
  std::vector<double> loss_history;
  /// Exponents n_c after every completed epoch (Power only).
  std::vector<Eigen::VectorXd> exponent_history;
};

/// Mean binary cross-entropy over classes on clamped clip probabilities,
/// plus lambda * sum_c n_c^2 when `power` is given.
double clip_loss(const ClipProbs& clip_probs, const std::vector<int>& weak_labels,
                 const PowerParams* power = nullptr);

struct BatchGradient {
  double loss = 0.0;
  ScorerGradient scorer;
  Eigen::VectorXd power_raw;  // empty unless Power
};

/// Loss and gradient of one mini-batch: mean clip loss over the batch plus
/// the exponent penalty, added once. Uses weak labels only.
BatchGradient batch_gradient(const ScorerWeights& weights, const PoolingSpec& pooling,
                             std::span<const Bag> batch);

/// Heavy-ball SGD: v <- momentum * v + g, theta <- theta - rate * v.
class MomentumSgd {
 public:
  MomentumSgd(const TrainState& state, double momentum);
  void step(TrainState& state, const BatchGradient& grad, double learning_rate,
            double power_learning_rate);

 private:
  double momentum_;
  ScorerWeights velocity_;
  Eigen::VectorXd power_velocity_;
};

TrainState init_train_state(const Dataset& dataset, const TrainConfig& config);

using EpochCallback = std::function<void(const TrainState&)>;

/// Seeded, shuffled mini-batch training. Deterministic for a fixed config
/// and dataset. Throws NumericalError on a non-finite loss or gradient.
TrainState train(const Dataset& dataset, const TrainConfig& config,
                 const EpochCallback& on_epoch = {});

struct Predictions {
  std::vector<FrameProbs> frame_probs;  // one per bag
  Eigen::MatrixXd clip_probs;           // bags x classes
};

Predictions predict(const ScorerWeights& weights, const PoolingSpec& pooling,
                    const std::vector<Bag>& bags);

}  // namespace powerpool
