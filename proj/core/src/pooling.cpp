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

#include "powerpool/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "powerpool/errors.hpp"

namespace powerpool {

namespace {

using Column = Eigen::Ref<const Eigen::VectorXd>;

void check_input(const PoolingSpec& spec, const FrameProbs& probs) {
  if (probs.rows() == 0 || probs.cols() == 0) {
    throw StructuralError("pooling: empty frame or class axis");
  }
  if (spec.kind == PoolingKind::Power) {
    if (!spec.power) {
      throw ConfigError("pooling: power pooling requires exponent parameters");
    }
    if (spec.power->raw.size() != probs.cols()) {
      throw StructuralError("pooling: " + std::to_string(probs.cols()) +
                            " classes but " +
                            std::to_string(spec.power->raw.size()) +
                            " power parameters");
    }
  } else if (spec.power) {
    throw ConfigError("pooling: exponent parameters given for " +
                      std::string(pooling_name(spec.kind)) + " pooling");
  }
}

std::size_t first_argmax(const Column& y) {
  Eigen::Index idx = 0;
  y.maxCoeff(&idx);  // Eigen returns the first maximal index.
  return static_cast<std::size_t>(idx);
}

// Power weights relative to the largest one: (y_i / y_max)^n.
Eigen::VectorXd relative_power_weights(const Column& y, double n) {
  const double log_max = std::log(y.maxCoeff());
  Eigen::VectorXd w(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    w[i] = std::exp(n * (std::log(y[i]) - log_max));
  }
  return w;
}

Eigen::VectorXd column_weights(PoolingKind kind, double n, const Column& y) {
  switch (kind) {
    case PoolingKind::Max: {
      const double top = y.maxCoeff();
      return (y.array() == top).cast<double>();
    }
    case PoolingKind::Average:
      return Eigen::VectorXd::Ones(y.size());
    case PoolingKind::ExponentialSoftmax:
      return y.array().exp();
    case PoolingKind::LinearSoftmax:
      return y;
    case PoolingKind::Power:
      return relative_power_weights(y, n);
  }
  return {};
}

double pool_column(PoolingKind kind, double n, const Column& y) {
  switch (kind) {
    case PoolingKind::Max:
      return y.maxCoeff();
    case PoolingKind::Average:
      return y.sum() / static_cast<double>(y.size());
    default: {
      const Eigen::VectorXd w = column_weights(kind, n, y);
      return y.dot(w) / w.sum();
    }
  }
}

// dy^c/dy_i for one class.
Eigen::VectorXd pool_column_grad(PoolingKind kind, double n, const Column& y) {
  const auto m = y.size();
  switch (kind) {
    case PoolingKind::Max: {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
      g[static_cast<Eigen::Index>(first_argmax(y))] = 1.0;
      return g;
    }
    case PoolingKind::Average:
      return Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    case PoolingKind::ExponentialSoftmax: {
      const Eigen::ArrayXd w = y.array().exp();
      const double total = w.sum();
      const double yc = (y.array() * w).sum() / total;
      return (w * (1.0 + y.array() - yc) / total).matrix();
    }
    case PoolingKind::LinearSoftmax: {
      const double total = y.sum();
      const double yc = y.squaredNorm() / total;
      return ((2.0 * y.array() - yc) / total).matrix();
    }
    case PoolingKind::Power: {
      const Eigen::ArrayXd w = relative_power_weights(y, n).array();
      const double total = w.sum();
      const double yc = (y.array() * w).sum() / total;
      return (((n + 1.0) * w - n * (w / y.array()) * yc) / total).matrix();
    }
  }
  return {};
}

double class_exponent(const PoolingSpec& spec, const Eigen::VectorXd& exps,
                      Eigen::Index c) {
  return spec.kind == PoolingKind::Power ? exps[c] : 0.0;
}

Eigen::VectorXd exponents_of(const PoolingSpec& spec) {
  return spec.power ? spec.power->exponents() : Eigen::VectorXd();
}

}  // namespace

std::string_view pooling_name(PoolingKind kind) {
  switch (kind) {
    case PoolingKind::Max:
      return "max";
    case PoolingKind::Average:
      return "average";
    case PoolingKind::ExponentialSoftmax:
      return "exponential";
    case PoolingKind::LinearSoftmax:
      return "linear";
    case PoolingKind::Power:
      return "power";
  }
  return "unknown";
}

PoolingKind parse_pooling_kind(std::string_view name) {
  for (PoolingKind kind : kAllPoolingKinds) {
    if (pooling_name(kind) == name) return kind;
  }
  throw ConfigError("unknown pooling kind '" + std::string(name) +
                    "' (expected max, average, exponential, linear or power)");
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double inverse_softplus(double y) {
  if (y <= 0.0) return -std::numeric_limits<double>::infinity();
  // ln(e^y - 1) = y + ln(1 - e^-y)
  return y + std::log(-std::expm1(-y));
}

PowerParams PowerParams::linear_start(std::size_t num_classes, double lambda) {
  return from_exponents(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(num_classes)),
                        lambda);
}

PowerParams PowerParams::from_exponents(const Eigen::VectorXd& exponents,
                                        double lambda) {
  PowerParams p;
  p.raw = exponents.unaryExpr([](double n) { return inverse_softplus(n); });
  p.lambda = lambda;
  return p;
}

Eigen::VectorXd PowerParams::exponents() const {
  return raw.unaryExpr([](double r) { return softplus(r); });
}

Eigen::VectorXd PowerParams::exponent_slopes() const {
  return raw.unaryExpr([](double r) { return logistic(r); });
}

double PowerParams::regularizer() const {
  return lambda * exponents().squaredNorm();
}

Eigen::VectorXd PowerParams::regularizer_gradient() const {
  return (2.0 * lambda * exponents().array() * exponent_slopes().array()).matrix();
}

PoolingSpec PoolingSpec::make(PoolingKind kind, std::size_t num_classes,
                              double lambda) {
  PoolingSpec spec;
  spec.kind = kind;
  if (kind == PoolingKind::Power) {
    spec.power = PowerParams::linear_start(num_classes, lambda);
  }
  return spec;
}

PoolingSpec PoolingSpec::with_exponents(const Eigen::VectorXd& exponents,
                                        double lambda) {
  PoolingSpec spec;
  spec.kind = PoolingKind::Power;
  spec.power = PowerParams::from_exponents(exponents, lambda);
  return spec;
}

FrameProbs clamp_probs(const FrameProbs& probs) {
  return probs.cwiseMax(kProbEpsilon).cwiseMin(1.0 - kProbEpsilon);
}

Eigen::MatrixXd pooling_weights(const PoolingSpec& spec, const FrameProbs& probs) {
  check_input(spec, probs);
  const FrameProbs y = clamp_probs(probs);
  const Eigen::VectorXd exps = exponents_of(spec);
  Eigen::MatrixXd w(y.rows(), y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    w.col(c) = column_weights(spec.kind, class_exponent(spec, exps, c), y.col(c));
  }
  return w;
}

ClipProbs pool_forward(const PoolingSpec& spec, const FrameProbs& probs) {
  check_input(spec, probs);
  const FrameProbs y = clamp_probs(probs);
  const Eigen::VectorXd exps = exponents_of(spec);
  ClipProbs out(y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    out[c] = pool_column(spec.kind, class_exponent(spec, exps, c), y.col(c));
  }
  return out;
}

FrameProbs pool_backward(const PoolingSpec& spec, const FrameProbs& probs,
                         const ClipProbs& upstream) {
  check_input(spec, probs);
  if (upstream.size() != probs.cols()) {
    throw StructuralError("pool_backward: upstream gradient has " +
                          std::to_string(upstream.size()) + " entries for " +
                          std::to_string(probs.cols()) + " classes");
  }
  const FrameProbs y = clamp_probs(probs);
  const Eigen::VectorXd exps = exponents_of(spec);
  FrameProbs grad(y.rows(), y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    grad.col(c) =
        upstream[c] * pool_column_grad(spec.kind, class_exponent(spec, exps, c), y.col(c));
  }
  const auto inside = (probs.array() >= kProbEpsilon && probs.array() <= 1.0 - kProbEpsilon);
  return inside.select(grad, 0.0);
}

Eigen::VectorXd power_exponent_derivative(const PowerParams& params,
                                          const FrameProbs& probs) {
  PoolingSpec spec{PoolingKind::Power, params};
  check_input(spec, probs);
  const FrameProbs y = clamp_probs(probs);
  const Eigen::VectorXd exps = params.exponents();
  Eigen::VectorXd out(y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    // dy^c/dn = sum_i (y_i - y^c) w_i ln y_i / sum_i w_i, with dw_i/dn = w_i ln y_i.
    const Eigen::ArrayXd col = y.col(c).array();
    const Eigen::ArrayXd w = relative_power_weights(y.col(c), exps[c]).array();
    const double total = w.sum();
    const double yc = (col * w).sum() / total;
    out[c] = ((col - yc) * w * col.log()).sum() / total;
  }
  return out;
}

Eigen::VectorXd power_data_gradient(const PowerParams& params,
                                    const FrameProbs& probs,
                                    const ClipProbs& upstream) {
  if (upstream.size() != probs.cols()) {
    throw StructuralError("power gradient: upstream/class count mismatch");
  }
  return (upstream.array() * power_exponent_derivative(params, probs).array() *
          params.exponent_slopes().array())
      .matrix();
}

Eigen::VectorXd power_param_gradient(const PowerParams& params,
                                     const FrameProbs& probs,
                                     const ClipProbs& upstream) {
  return power_data_gradient(params, probs, upstream) + params.regularizer_gradient();
}

double gradient_sign_ratio(const PoolingSpec& spec, std::size_t cls) {
  switch (spec.kind) {
    case PoolingKind::LinearSoftmax:
      return 0.5;
    case PoolingKind::Power: {
      if (!spec.power) {
        throw ConfigError("sign threshold: power pooling requires exponent parameters");
      }
      if (cls >= spec.power->num_classes()) {
        throw StructuralError("sign threshold: class index out of range");
      }
      const double n = softplus(spec.power->raw[static_cast<Eigen::Index>(cls)]);
      return n / (n + 1.0);
    }
    default:
      throw ConfigError("sign threshold is defined for linear and power pooling only, not " +
                        std::string(pooling_name(spec.kind)));
  }
}

double sign_threshold(const PoolingSpec& spec, double clip_prob, std::size_t cls) {
  return gradient_sign_ratio(spec, cls) * clip_prob;
}

std::vector<FrameProbs> simulate_bag_dynamics(const PoolingSpec& spec,
                                              const FrameProbs& initial,
                                              const std::vector<int>& labels,
                                              std::size_t steps,
                                              double step_size) {
  if (steps == 0 || !(step_size > 0.0)) {
    throw ConfigError("bag dynamics: steps and step size must be positive");
  }
  check_input(spec, initial);
  if (labels.size() != static_cast<std::size_t>(initial.cols())) {
    throw StructuralError("bag dynamics: one label per class required");
  }
  const Eigen::ArrayXd target =
      Eigen::Map<const Eigen::ArrayXi>(labels.data(), static_cast<Eigen::Index>(labels.size()))
          .cast<double>();

  Eigen::ArrayXXd logits = clamp_probs(initial).array().unaryExpr(
      [](double p) { return std::log(p) - std::log1p(-p); });

  std::vector<FrameProbs> trajectory;
  trajectory.reserve(steps + 1);
  trajectory.push_back(initial);
  for (std::size_t step = 0; step < steps; ++step) {
    const FrameProbs y = logits.unaryExpr([](double z) { return logistic(z); }).matrix();
    const ClipProbs yc = pool_forward(spec, y);
    const ClipProbs dloss =
        ((yc.array() - target) / (yc.array() * (1.0 - yc.array()))).matrix();
    const FrameProbs dy = pool_backward(spec, y, dloss);
    logits -= step_size * (dy.array() * y.array() * (1.0 - y.array()));
    trajectory.push_back(logits.unaryExpr([](double z) { return logistic(z); }).matrix());
  }
  return trajectory;
}

}  // namespace powerpool
