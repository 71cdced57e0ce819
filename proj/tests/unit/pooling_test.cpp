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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "powerpool/errors.hpp"
#include "powerpool/pooling.hpp"

using namespace powerpool;

namespace {

FrameProbs column(std::initializer_list<double> values) {
  FrameProbs p(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) p(i++, 0) = v;
  return p;
}

ClipProbs ones(Eigen::Index n) { return ClipProbs::Ones(n); }

PoolingSpec spec_for(PoolingKind kind, Eigen::Index classes, std::mt19937_64& rng) {
  if (kind != PoolingKind::Power) return PoolingSpec::make(kind, static_cast<std::size_t>(classes));
  std::uniform_real_distribution<double> n(0.05, 6.0);
  Eigen::VectorXd exps(classes);
  for (Eigen::Index c = 0; c < classes; ++c) exps[c] = n(rng);
  return PoolingSpec::with_exponents(exps);
}

// Frame of a class where the pooling gradient changes sign, holding the other
// frames fixed: the root of y - theta * y^c(y) found by bisection.
double self_consistent_threshold(const PoolingSpec& spec, FrameProbs probs, Eigen::Index frame) {
  const double theta = gradient_sign_ratio(spec);
  double lo = 1e-6, hi = 1.0 - 1e-6;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    probs(frame, 0) = mid;
    (mid - theta * pool_forward(spec, probs)[0] < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double frame_gradient(const PoolingSpec& spec, FrameProbs probs, Eigen::Index frame, double value) {
  probs(frame, 0) = value;
  return pool_backward(spec, probs, ones(1))(frame, 0);
}

}  // namespace

TEST(PoolingForward, LinearSoftmaxTwoFrames) {
  const auto spec = PoolingSpec::make(PoolingKind::LinearSoftmax, 1);
  EXPECT_NEAR(pool_forward(spec, column({0.2, 0.8}))[0], 0.68, 1e-15);
}

TEST(PoolingForward, PowerAtOneMatchesLinear) {
  const auto spec = PoolingSpec::with_exponents(Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(pool_forward(spec, column({0.2, 0.8}))[0], 0.68, 1e-15);
}

TEST(PoolingForward, PowerAtZeroIsMean) {
  const auto spec = PoolingSpec::with_exponents(Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(pool_forward(spec, column({0.1, 0.4, 0.7, 0.2}))[0], 0.35, 1e-15);
}

TEST(PoolingForward, SingleFrameIsIdentity) {
  for (PoolingKind kind : kAllPoolingKinds) {
    const auto spec = PoolingSpec::make(kind, 1);
    EXPECT_NEAR(pool_forward(spec, column({0.37}))[0], 0.37, 1e-15) << pooling_name(kind);
    EXPECT_NEAR(pool_backward(spec, column({0.37}), ones(1))(0, 0), 1.0, 1e-12) << pooling_name(kind);
  }
}

TEST(PoolingForward, MaxAndAverage) {
  const FrameProbs p = column({0.1, 0.6, 0.3});
  EXPECT_DOUBLE_EQ(pool_forward(PoolingSpec::make(PoolingKind::Max, 1), p)[0], 0.6);
  EXPECT_NEAR(pool_forward(PoolingSpec::make(PoolingKind::Average, 1), p)[0], 1.0 / 3.0, 1e-15);
  const double e = (0.1 * std::exp(0.1) + 0.6 * std::exp(0.6) + 0.3 * std::exp(0.3)) /
                   (std::exp(0.1) + std::exp(0.6) + std::exp(0.3));
  EXPECT_NEAR(pool_forward(PoolingSpec::make(PoolingKind::ExponentialSoftmax, 1), p)[0], e, 1e-15);
}

TEST(PoolingForward, ClampsProbabilities) {
  const auto spec = PoolingSpec::make(PoolingKind::Max, 1);
  EXPECT_DOUBLE_EQ(pool_forward(spec, column({0.0, 1.0}))[0], 1.0 - kProbEpsilon);
  EXPECT_DOUBLE_EQ(pool_forward(spec, column({0.0, 0.0}))[0], kProbEpsilon);
}

TEST(PoolingForward, HugeExponentApproachesMax) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    FrameProbs p = oracle::random_bag(rng, 20, 1, 0.01, 0.7);
    p(5, 0) = 0.95;
    const auto spec = PoolingSpec::with_exponents(Eigen::VectorXd::Constant(1, 64.0));
    EXPECT_NEAR(pool_forward(spec, p)[0], 0.95, 1e-3);
  }
}

TEST(PoolingForward, Errors) {
  EXPECT_THROW(pool_forward(PoolingSpec::make(PoolingKind::Average, 1), FrameProbs(0, 1)), StructuralError);
  PoolingSpec missing{PoolingKind::Power, std::nullopt};
  EXPECT_THROW(pool_forward(missing, column({0.5})), ConfigError);
  EXPECT_THROW(pool_forward(PoolingSpec::make(PoolingKind::Power, 2), column({0.5})), StructuralError);
}

TEST(PoolingBackward, LinearSoftmaxTwoFrames) {
  const auto spec = PoolingSpec::make(PoolingKind::LinearSoftmax, 1);
  const FrameProbs g = pool_backward(spec, column({0.2, 0.8}), ones(1));
  EXPECT_NEAR(g(0, 0), -0.28, 1e-15);
  EXPECT_NEAR(g(1, 0), 0.92, 1e-15);
}

TEST(PoolingBackward, MaxRoutesToFirstMaximum) {
  const auto spec = PoolingSpec::make(PoolingKind::Max, 1);
  const FrameProbs g = pool_backward(spec, column({0.3, 0.7, 0.7}), ClipProbs::Constant(1, 2.5));
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_EQ(g(1, 0), 2.5);
  EXPECT_EQ(g(2, 0), 0.0);
}

TEST(PoolingBackward, ZeroOutsideClamp) {
  const auto spec = PoolingSpec::make(PoolingKind::LinearSoftmax, 1);
  const FrameProbs g = pool_backward(spec, column({0.0, 0.5, 1.0}), ones(1));
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_EQ(g(2, 0), 0.0);
  EXPECT_NE(g(1, 0), 0.0);
}

TEST(PoolingBackward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Eigen::Index> frames(2, 64), classes(1, 4);
  for (PoolingKind kind : kAllPoolingKinds) {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Index t = frames(rng), c = classes(rng);
      FrameProbs p = oracle::random_bag(rng, t, c);
      if (kind == PoolingKind::Max) {
        // Keep the maximum clear of ties so the derivative exists.
        for (Eigen::Index k = 0; k < c; ++k) p(rng() % t, k) = 0.995;
      }
      const auto spec = spec_for(kind, c, rng);
      const ClipProbs up = ClipProbs::Random(c);
      EXPECT_LT(oracle::relative_error(pool_backward(spec, p, up), oracle::fd_pool_gradient(spec, p, up)), 1e-5)
          << pooling_name(kind) << " trial " << trial;
    }
  }
}

TEST(PoolingBackward, PositiveEntryForDistinctFrames) {
  std::mt19937_64 rng(3);
  for (PoolingKind kind : {PoolingKind::LinearSoftmax, PoolingKind::Power}) {
    for (int trial = 0; trial < 50; ++trial) {
      const FrameProbs p = oracle::random_bag(rng, 8, 2);
      const auto spec = spec_for(kind, 2, rng);
      const FrameProbs g = pool_backward(spec, p, ones(2));
      EXPECT_GT(g.col(0).maxCoeff(), 0.0);
      EXPECT_GT(g.col(1).maxCoeff(), 0.0);
    }
  }
}

TEST(PoolingReductions, PowerOneIsLinearPowerZeroIsAverage) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const FrameProbs p = oracle::random_bag(rng, 1 + static_cast<Eigen::Index>(rng() % 40), 3, 0.0, 1.0);
    const ClipProbs up = ClipProbs::Random(3);
    const auto linear = PoolingSpec::make(PoolingKind::LinearSoftmax, 3);
    const auto average = PoolingSpec::make(PoolingKind::Average, 3);
    const auto p1 = PoolingSpec::with_exponents(Eigen::VectorXd::Ones(3));
    const auto p0 = PoolingSpec::with_exponents(Eigen::VectorXd::Zero(3));
    EXPECT_LT((pool_forward(p1, p) - pool_forward(linear, p)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((pool_backward(p1, p, up) - pool_backward(linear, p, up)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((pool_forward(p0, p) - pool_forward(average, p)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((pool_backward(p0, p, up) - pool_backward(average, p, up)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PoolingProperties, ClipProbabilityWithinFrameRange) {
  std::mt19937_64 rng(13);
  for (PoolingKind kind : kAllPoolingKinds) {
    for (int trial = 0; trial < 100; ++trial) {
      const FrameProbs p = clamp_probs(oracle::random_bag(rng, 1 + static_cast<Eigen::Index>(rng() % 30), 2, 0, 1));
      const auto spec = spec_for(kind, 2, rng);
      const ClipProbs y = pool_forward(spec, p);
      for (Eigen::Index c = 0; c < 2; ++c) {
        EXPECT_GE(y[c], p.col(c).minCoeff() - 1e-15);
        EXPECT_LE(y[c], p.col(c).maxCoeff() + 1e-15);
      }
    }
  }
}

TEST(PoolingProperties, WeightsNonDecreasingInProbability) {
  std::mt19937_64 rng(17);
  for (PoolingKind kind : kAllPoolingKinds) {
    for (int trial = 0; trial < 50; ++trial) {
      FrameProbs p = oracle::random_bag(rng, 12, 1, 0, 1);
      std::sort(p.data(), p.data() + p.size());
      const auto spec = spec_for(kind, 1, rng);
      const Eigen::MatrixXd w = pooling_weights(spec, p);
      for (Eigen::Index i = 1; i < p.rows(); ++i) EXPECT_LE(w(i - 1, 0), w(i, 0)) << pooling_name(kind);
    }
  }
}

TEST(PowerParams, ExponentsNonNegativeOnGrid) {
  for (double raw = -50.0; raw <= 50.0; raw += 0.25) {
    PowerParams p{Eigen::VectorXd::Constant(1, raw), 0.0};
    EXPECT_GE(p.exponents()[0], 0.0);
    const double theta = gradient_sign_ratio(PoolingSpec{PoolingKind::Power, p});
    EXPECT_GE(theta, 0.0);
    EXPECT_LT(theta, 1.0);
  }
}

TEST(PowerParams, LinearStartIsOne) {
  const auto p = PowerParams::linear_start(4, 0.0);
  for (Eigen::Index c = 0; c < 4; ++c) EXPECT_NEAR(p.exponents()[c], 1.0, 1e-15);
  EXPECT_NEAR(softplus(inverse_softplus(0.337)), 0.337, 1e-15);
  EXPECT_TRUE(std::isinf(inverse_softplus(0.0)));
}

TEST(PowerGradient, ExponentDerivativeMatchesFiniteDifferences) {
  const auto params = PowerParams::from_exponents(Eigen::VectorXd::Ones(1), 0.0);
  const double analytic = power_exponent_derivative(params, column({0.2, 0.8}))[0];
  const double fd = oracle::fd_exponent_derivative(Eigen::VectorXd::Ones(1), column({0.2, 0.8}))[0];
  EXPECT_LT(std::abs(analytic - fd) / std::abs(fd), 1e-5);

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const FrameProbs p = oracle::random_bag(rng, 2 + static_cast<Eigen::Index>(rng() % 40), 3);
    Eigen::VectorXd n = (Eigen::VectorXd::Random(3).array() + 1.0) * 3.0 + 0.01;
    const auto pp = PowerParams::from_exponents(n, 0.0);
    EXPECT_LT(oracle::relative_error(power_exponent_derivative(pp, p), oracle::fd_exponent_derivative(n, p)), 1e-5);
  }
}

TEST(PowerGradient, RawGradientIncludesRegularizer) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const FrameProbs p = oracle::random_bag(rng, 2 + static_cast<Eigen::Index>(rng() % 40), 3);
    PowerParams pp{Eigen::VectorXd::Random(3) * 3.0, 0.05};
    const ClipProbs up = ClipProbs::Random(3);
    EXPECT_LT(oracle::relative_error(power_param_gradient(pp, p, up), oracle::fd_raw_gradient(pp, p, up)), 1e-5);
  }
}

TEST(PowerGradient, UniformFramesLeaveOnlyRegularizer) {
  const auto pp = PowerParams::linear_start(1, 1e-4);
  const FrameProbs p = column({0.4, 0.4, 0.4});
  EXPECT_NEAR(power_exponent_derivative(pp, p)[0], 0.0, 1e-15);
  const double slope = logistic(pp.raw[0]);
  EXPECT_NEAR(power_param_gradient(pp, p, ones(1))[0], 2.0 * 1e-4 * slope, 1e-16);
  EXPECT_NEAR(slope, 1.0 - 1.0 / std::exp(1.0), 1e-15);
}

TEST(SignThreshold, WorkedValues) {
  EXPECT_NEAR(sign_threshold(PoolingSpec::make(PoolingKind::LinearSoftmax, 1), 0.68), 0.34, 1e-15);
  const auto p337 = PoolingSpec::with_exponents(Eigen::VectorXd::Constant(1, 0.337));
  EXPECT_NEAR(sign_threshold(p337, 0.5), 0.12603, 1e-5);
  const auto p0 = PoolingSpec::with_exponents(Eigen::VectorXd::Zero(1));
  EXPECT_EQ(sign_threshold(p0, 0.9), 0.0);
  EXPECT_THROW(sign_threshold(PoolingSpec::make(PoolingKind::Max, 1), 0.5), ConfigError);
  EXPECT_THROW(gradient_sign_ratio(PoolingSpec::make(PoolingKind::ExponentialSoftmax, 1)), ConfigError);
}

TEST(SignThreshold, GradientFlipsAtFixedPoint) {
  std::mt19937_64 rng(29);
  std::vector<PoolingSpec> specs = {PoolingSpec::make(PoolingKind::LinearSoftmax, 1)};
  for (double n : {0.1, 0.337, 1.0, 3.0}) specs.push_back(PoolingSpec::with_exponents(Eigen::VectorXd::Constant(1, n)));
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 20; ++trial) {
      const FrameProbs p = oracle::random_bag(rng, 6, 1, 0.2, 0.95);
      const double d = self_consistent_threshold(spec, p, 0);
      EXPECT_LT(frame_gradient(spec, p, 0, d - 1e-4), 0.0);
      EXPECT_GT(frame_gradient(spec, p, 0, d + 1e-4), 0.0);
      FrameProbs at = p;
      at(0, 0) = d;
      EXPECT_NEAR(sign_threshold(spec, pool_forward(spec, at)[0]), d, 1e-9);
    }
  }
}

TEST(BagDynamics, PositiveBagSeparatesAroundThreshold) {
  for (const auto& spec : {PoolingSpec::make(PoolingKind::LinearSoftmax, 1),
                           PoolingSpec::with_exponents(Eigen::VectorXd::Constant(1, 0.337)),
                           PoolingSpec::with_exponents(Eigen::VectorXd::Constant(1, 1.5))}) {
    const auto traj = simulate_bag_dynamics(spec, column({0.9, 0.1}), {1}, 10000, 0.5);
    ASSERT_EQ(traj.size(), 10001u);
    EXPECT_GT(traj.back()(0, 0), 0.99);
    EXPECT_LT(traj.back()(1, 0), 0.01);
  }
}

// For large n the low frame's gradient scales like y^n, so it decays as a
// power law: at n = 3 it is still near 0.03 after 10,000 steps and about
// 0.01 after 200,000.
TEST(BagDynamics, LargeExponentLowFrameDecaysSlowly) {
  const auto spec = PoolingSpec::with_exponents(Eigen::VectorXd::Constant(1, 3.0));
  const auto traj = simulate_bag_dynamics(spec, column({0.9, 0.1}), {1}, 1000000, 0.5);
  for (std::size_t k = 1; k < traj.size(); k += 10000) EXPECT_LT(traj[k](1, 0), traj[k - 1](1, 0));
  EXPECT_GT(traj[10000](1, 0), 0.01);
  EXPECT_LT(traj.back()(1, 0), 0.01);
  EXPECT_GT(traj.back()(0, 0), 0.99);
}

TEST(BagDynamics, NegativeBagGoesToZero) {
  for (const auto& spec : {PoolingSpec::make(PoolingKind::LinearSoftmax, 1),
                           PoolingSpec::with_exponents(Eigen::VectorXd::Constant(1, 0.337))}) {
    const auto traj = simulate_bag_dynamics(spec, column({0.9, 0.1}), {0}, 10000, 0.5);
    EXPECT_LT(traj.back().maxCoeff(), 0.01);
  }
}

TEST(BagDynamics, SingleFramePositiveRises) {
  const auto traj = simulate_bag_dynamics(PoolingSpec::make(PoolingKind::LinearSoftmax, 1), column({0.5}), {1}, 2000, 0.5);
  EXPECT_GT(traj.back()(0, 0), 0.99);
}

TEST(BagDynamics, RejectsBadArguments) {
  const auto spec = PoolingSpec::make(PoolingKind::LinearSoftmax, 1);
  EXPECT_THROW(simulate_bag_dynamics(spec, column({0.5}), {1}, 0, 0.5), ConfigError);
  EXPECT_THROW(simulate_bag_dynamics(spec, column({0.5}), {1}, 10, 0.0), ConfigError);
  EXPECT_THROW(simulate_bag_dynamics(spec, column({0.5}), {1, 0}, 10, 0.5), StructuralError);
}

TEST(PoolingNames, RoundTrip) {
  for (PoolingKind kind : kAllPoolingKinds) EXPECT_EQ(parse_pooling_kind(pooling_name(kind)), kind);
  EXPECT_THROW(parse_pooling_kind("attention"), ConfigError);
}
