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

#include "powerpool/scorer.hpp"

#include <cmath>
#include <random>
#include <string>

#include "powerpool/errors.hpp"

namespace powerpool {

bool ScorerWeights::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

double ScorerWeights::squared_norm() const {
  return w1.squaredNorm() + b1.squaredNorm() + w2.squaredNorm() + b2.squaredNorm();
}

ScorerWeights& ScorerWeights::operator+=(const ScorerWeights& other) {
  w1 += other.w1;
  b1 += other.b1;
  w2 += other.w2;
  b2 += other.b2;
  return *this;
}

ScorerWeights& ScorerWeights::operator*=(double scale) {
  w1 *= scale;
  b1 *= scale;
  w2 *= scale;
  b2 *= scale;
  return *this;
}

ScorerWeights ScorerWeights::zeros_like() const {
  return {Eigen::MatrixXd::Zero(w1.rows(), w1.cols()), Eigen::VectorXd::Zero(b1.size()),
          Eigen::MatrixXd::Zero(w2.rows(), w2.cols()), Eigen::VectorXd::Zero(b2.size())};
}

ScorerWeights init_weights(const ScorerConfig& config) {
  if (config.input_dim == 0 || config.hidden_dim == 0 || config.num_classes == 0) {
    throw ConfigError("scorer: input, hidden and class dimensions must be >= 1");
  }
  const auto in = static_cast<Eigen::Index>(config.input_dim);
  const auto hid = static_cast<Eigen::Index>(config.hidden_dim);
  const auto out = static_cast<Eigen::Index>(config.num_classes);

  std::mt19937_64 rng(config.seed);
  auto fill = [&rng](Eigen::MatrixXd& m, double fan_in) {
    const double bound = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Row-major fill order so the layout of the draw is independent of Eigen's storage.
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
    }
  };

  ScorerWeights w;
  w.w1.resize(hid, in);
  w.w2.resize(out, hid);
  fill(w.w1, static_cast<double>(in));
  fill(w.w2, static_cast<double>(hid));
  w.b1 = Eigen::VectorXd::Zero(hid);
  w.b2 = Eigen::VectorXd::Zero(out);
  return w;
}

ScorerActivations scorer_forward(const ScorerWeights& weights,
                                 const Eigen::MatrixXd& features) {
  if (static_cast<std::size_t>(features.cols()) != weights.input_dim()) {
    throw StructuralError("scorer: feature width " + std::to_string(features.cols()) +
                          " != input_dim " + std::to_string(weights.input_dim()));
  }
  ScorerActivations act;
  act.hidden = ((features * weights.w1.transpose()).rowwise() + weights.b1.transpose())
                   .array()
                   .tanh()
                   .matrix();
  act.probs = ((act.hidden * weights.w2.transpose()).rowwise() + weights.b2.transpose())
                  .unaryExpr([](double z) { return logistic(z); });
  return act;
}

FrameProbs score_frames(const ScorerWeights& weights, const Eigen::MatrixXd& features) {
  return scorer_forward(weights, features).probs;
}

ScorerGradient scorer_backward(const ScorerWeights& weights,
                               const Eigen::MatrixXd& features,
                               const ScorerActivations& activations,
                               const FrameProbs& upstream) {
  if (upstream.rows() != activations.probs.rows() ||
      upstream.cols() != activations.probs.cols()) {
    throw StructuralError("scorer: upstream gradient shape does not match frame probabilities");
  }
  const auto p = activations.probs.array();
  const Eigen::MatrixXd d_logit = (upstream.array() * p * (1.0 - p)).matrix();
  const Eigen::MatrixXd d_hidden =
      ((d_logit * weights.w2).array() * (1.0 - activations.hidden.array().square())).matrix();

  ScorerGradient g;
  g.w2 = d_logit.transpose() * activations.hidden;
  g.b2 = d_logit.colwise().sum().transpose();
  g.w1 = d_hidden.transpose() * features;
  g.b1 = d_hidden.colwise().sum().transpose();
  return g;
}

ScorerGradient scorer_backward(const ScorerWeights& weights,
                               const Eigen::MatrixXd& features,
                               const FrameProbs& upstream) {
  return scorer_backward(weights, features, scorer_forward(weights, features), upstream);
}

}  // namespace powerpool
