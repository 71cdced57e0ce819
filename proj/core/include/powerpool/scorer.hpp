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

#include <Eigen/Core>

#include "powerpool/pooling.hpp"

namespace powerpool {

struct ScorerConfig {
  std::size_t input_dim = 16;
  std::size_t hidden_dim = 32;
  std::size_t num_classes = 8;
  std::uint64_t seed = 0;
};

/// Frame scorer: p = logistic(W2 tanh(W1 x + b1) + b2), applied to every
/// frame independently.
struct ScorerWeights {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // classes x hidden
  Eigen::VectorXd b2;  // classes

  std::size_t input_dim() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t num_classes() const { return static_cast<std::size_t>(w2.rows()); }

  bool all_finite() const;
  double squared_norm() const;

  ScorerWeights& operator+=(const ScorerWeights& other);
  ScorerWeights& operator*=(double scale);
  /// Same shapes, all zeros.
  ScorerWeights zeros_like() const;
};

/// Gradients share the weight layout.
using ScorerGradient = ScorerWeights;

/// Intermediate activations kept for the backward pass.
struct ScorerActivations {
  Eigen::MatrixXd hidden;  // frames x hidden, after tanh
  FrameProbs probs;        // frames x classes, after logistic
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
/// Throws ConfigError when a dimension is zero.
ScorerWeights init_weights(const ScorerConfig& config);

/// Throws StructuralError when the feature width differs from input_dim.
ScorerActivations scorer_forward(const ScorerWeights& weights,
                                 const Eigen::MatrixXd& features);

FrameProbs score_frames(const ScorerWeights& weights, const Eigen::MatrixXd& features);

/// Backpropagates dL/dp (frames x classes) into weight gradients.
ScorerGradient scorer_backward(const ScorerWeights& weights,
                               const Eigen::MatrixXd& features,
                               const ScorerActivations& activations,
                               const FrameProbs& upstream);

ScorerGradient scorer_backward(const ScorerWeights& weights,
                               const Eigen::MatrixXd& features,
                               const FrameProbs& upstream);

}  // namespace powerpool
