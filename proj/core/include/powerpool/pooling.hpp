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

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace powerpool {

/// Frame-level probabilities, one row per frame and one column per class.
using FrameProbs = Eigen::MatrixXd;
/// Clip-level probabilities (or gradients w.r.t. them), one entry per class.
using ClipProbs = Eigen::VectorXd;

/// Frame probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before
/// pooling. The power-pooling gradient contains y^(n-1), which is unbounded
/// at y = 0 whenever n < 1.
inline constexpr double kProbEpsilon = 1e-7;

enum class PoolingKind { Max, Average, ExponentialSoftmax, LinearSoftmax, Power };

inline constexpr std::array<PoolingKind, 5> kAllPoolingKinds = {
    PoolingKind::Max, PoolingKind::Average, PoolingKind::ExponentialSoftmax,
    PoolingKind::LinearSoftmax, PoolingKind::Power};

/// Short lowercase name: max, average, exponential, linear, power.
std::string_view pooling_name(PoolingKind kind);
/// Inverse of pooling_name. Throws ConfigError for unknown names.
PoolingKind parse_pooling_kind(std::string_view name);

double logistic(double x);
/// ln(1 + e^x), evaluated without overflow.
double softplus(double x);
/// Inverse of softplus on [0, inf). Maps 0 to -inf.
double inverse_softplus(double y);

/// Learnable per-class exponents of power pooling.
///
/// The exponent of class c is n_c = softplus(raw[c]), so n_c >= 0 for every
/// finite raw value and the optimizer works on an unconstrained vector. The
/// penalty lambda * sum_c n_c^2 is applied to the exponents themselves.
struct PowerParams {
  Eigen::VectorXd raw;
  double lambda = 0.0;

  /// Every exponent starts at exactly 1, i.e. linear softmax pooling.
  static PowerParams linear_start(std::size_t num_classes, double lambda);
  static PowerParams from_exponents(const Eigen::VectorXd& exponents,
                                    double lambda);

  std::size_t num_classes() const { return static_cast<std::size_t>(raw.size()); }
  Eigen::VectorXd exponents() const;
  /// dn_c / draw_c, i.e. logistic(raw_c).
  Eigen::VectorXd exponent_slopes() const;
  double regularizer() const;
  /// d(lambda * sum n_c^2) / draw_c = 2 lambda n_c logistic(raw_c).
  Eigen::VectorXd regularizer_gradient() const;
};

/// Pooling kind plus, for Power only, its exponent parameters.
struct PoolingSpec {
  PoolingKind kind = PoolingKind::LinearSoftmax;
  std::optional<PowerParams> power;

  /// Builds a spec for `kind`; Power gets linear_start parameters.
  static PoolingSpec make(PoolingKind kind, std::size_t num_classes,
                          double lambda = 0.0);
  static PoolingSpec with_exponents(const Eigen::VectorXd& exponents,
                                    double lambda = 0.0);
};

FrameProbs clamp_probs(const FrameProbs& probs);

/// Per-frame weights w_i used by the weighted average. For Power the weights
/// are rescaled by the largest weight of each class (the scale cancels in
/// the average). Max marks every maximal frame with 1.
Eigen::MatrixXd pooling_weights(const PoolingSpec& spec, const FrameProbs& probs);

/// Clip probability per class: y^c = sum_i w_i y_i / sum_i w_i on the
/// clamped frame probabilities.
///
/// Throws StructuralError for an empty frame axis or a class-count mismatch
/// with the power parameters, ConfigError when Power has no parameters.
ClipProbs pool_forward(const PoolingSpec& spec, const FrameProbs& probs);

/// dL/dy_i^f = upstream_c * dy^c/dy_i^f, differentiated through the clamp
/// (frames outside [eps, 1 - eps] get zero). Max routes the whole upstream
/// gradient to the first maximal frame.
FrameProbs pool_backward(const PoolingSpec& spec, const FrameProbs& probs,
                         const ClipProbs& upstream);

/// dy^c/dn_c for power pooling, per class.
Eigen::VectorXd power_exponent_derivative(const PowerParams& params,
                                          const FrameProbs& probs);

/// Data term only: upstream_c * dy^c/dn_c * dn_c/draw_c.
Eigen::VectorXd power_data_gradient(const PowerParams& params,
                                    const FrameProbs& probs,
                                    const ClipProbs& upstream);

/// dL/draw_c including the regularizer contribution.
Eigen::VectorXd power_param_gradient(const PowerParams& params,
                                     const FrameProbs& probs,
                                     const ClipProbs& upstream);

/// theta = d / y^c: 1/2 for LinearSoftmax, n_c/(n_c+1) for Power.
/// Throws ConfigError for the other kinds.
double gradient_sign_ratio(const PoolingSpec& spec, std::size_t cls = 0);

/// The frame probability d above which dy^c/dy_i^f is positive.
double sign_threshold(const PoolingSpec& spec, double clip_prob,
                      std::size_t cls = 0);

/// Gradient descent on free frame logits z_i (y_i = logistic(z_i)) under the
/// clip cross-entropy, summed over classes. The exponents stay fixed.
/// Returns steps + 1 snapshots, the first being `initial`.
std::vector<FrameProbs> simulate_bag_dynamics(const PoolingSpec& spec,
                                              const FrameProbs& initial,
                                              const std::vector<int>& labels,
                                              std::size_t steps,
                                              double step_size);

}  // namespace powerpool
