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

#include <random>

#include "oracles.hpp"
#include "powerpool/errors.hpp"
#include "powerpool/sed_eval.hpp"

using namespace powerpool;

namespace {

const EvalConfig kDefault{};

FrameProbs column(std::initializer_list<double> values) {
  FrameProbs p(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) p(i++, 0) = v;
  return p;
}

}  // namespace

TEST(MedianFilter, WorkedExamples) {
  EXPECT_EQ(median_filter(column({0, 1, 0}), {3}), column({0, 0, 0}));
  const FrameProbs p = column({0.1, 0.9, 0.3, 0.7});
  EXPECT_EQ(median_filter(p, {1}), p);
  EXPECT_EQ(median_filter(column({0.4, 0.4, 0.4, 0.4}), {5}), column({0.4, 0.4, 0.4, 0.4}));
  // Edge replication: the first window is [0.9, 0.9, 0.1].
  EXPECT_EQ(median_filter(column({0.9, 0.1, 0.2}), {3}), column({0.9, 0.2, 0.2}));
}

TEST(MedianFilter, PerClassWindows) {
  FrameProbs p(5, 2);
  p << 0, 0, 1, 1, 0, 0, 1, 1, 0, 0;
  // Column 0 with window 1 is unchanged; column 1 keeps only the middle spike.
  FrameProbs expected(5, 2);
  expected << 0, 0, 1, 0, 0, 1, 1, 0, 0, 0;
  EXPECT_EQ(median_filter(p, {1, 3}), expected);
}

TEST(MedianFilter, RejectsEvenOrZeroWindow) {
  EXPECT_THROW(median_filter(column({0.1, 0.2}), {2}), ConfigError);
  EXPECT_THROW(median_filter(column({0.1, 0.2}), {0}), ConfigError);
  EXPECT_THROW(median_filter(column({0.1, 0.2}), {1, 1}), StructuralError);
}

TEST(MedianFilter, WindowSizes) {
  // beta * duration / hop = 1/3 * 8 / 0.1 = 26.67 -> nearest odd is 27.
  EXPECT_EQ(class_window_sizes({8.0, 0.5, 1.5, 0.0}, 0.1, 1.0 / 3.0), (std::vector<std::size_t>{27, 1, 5, 1}));
}

TEST(DecodeEvents, WorkedExamples) {
  EXPECT_TRUE(decode_events(FrameProbs::Zero(50, 2), kDefault, 0.1).empty());

  FrameProbs p = FrameProbs::Zero(50, 1);
  p.block(10, 0, 20, 1).setConstant(0.9);
  const EventList one = decode_events(p, kDefault, 0.1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0].onset_s, 1.0, 1e-12);
  EXPECT_NEAR(one[0].offset_s, 3.0, 1e-12);

  p(20, 0) = 0.1;
  EXPECT_EQ(decode_events(p, kDefault, 0.1).size(), 2u);
}

TEST(DecodeEvents, ThresholdIsStrict) {
  EXPECT_TRUE(decode_events(FrameProbs::Constant(10, 3, 0.5), kDefault, 0.1).empty());
  const EventList all = decode_events(FrameProbs::Constant(10, 1, 0.51), kDefault, 0.1);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_NEAR(all[0].offset_s, 1.0, 1e-12);
}

TEST(EventF1, WorkedExamples) {
  const EventList ref = {{0, 1.0, 2.0}};
  const LevelReport same = event_f1(ref, ref, 1, kDefault);
  EXPECT_EQ(same.macro().f1, 1.0);
  EXPECT_EQ(same.macro().precision, 1.0);

  const LevelReport late = event_f1(ref, {{0, 1.3, 2.0}}, 1, kDefault);
  EXPECT_EQ(late.per_class[0], (Counts{0, 1, 1}));
  EXPECT_EQ(late.macro().f1, 0.0);

  const LevelReport long_event = event_f1({{0, 0.0, 10.0}}, {{0, 0.1, 8.5}}, 1, kDefault);
  EXPECT_EQ(long_event.per_class[0], (Counts{1, 0, 0}));
}

TEST(EventF1, CollarBoundariesAreInclusive) {
  EXPECT_EQ(event_f1({{0, 1.0, 2.0}}, {{0, 1.2, 2.2}}, 1, kDefault).per_class[0].tp, 1u);
  EXPECT_EQ(event_f1({{0, 1.0, 2.0}}, {{0, 1.201, 2.0}}, 1, kDefault).per_class[0].tp, 0u);
  EXPECT_EQ(event_f1({{0, 0.0, 5.0}}, {{0, 0.0, 6.0}}, 1, kDefault).per_class[0].tp, 1u);
  EXPECT_EQ(event_f1({{0, 0.0, 5.0}}, {{0, 0.0, 6.001}}, 1, kDefault).per_class[0].tp, 0u);
}

TEST(EventF1, ClassesDoNotCrossMatch) {
  const LevelReport r = event_f1({{0, 1.0, 2.0}}, {{1, 1.0, 2.0}}, 2, kDefault);
  EXPECT_EQ(r.per_class[0], (Counts{0, 0, 1}));
  EXPECT_EQ(r.per_class[1], (Counts{0, 1, 0}));
}

TEST(EventF1, MatchingIsMaximal) {
  // The first hypothesis fits both references, the second only the first;
  // onset-order greedy assignment would find one match.
  const EventList ref = {{0, 0.0, 0.2}, {0, 0.3, 0.5}};
  const EventList hyp = {{0, 0.15, 0.35}, {0, 0.18, 0.25}};
  EXPECT_EQ(event_f1(ref, hyp, 1, kDefault).per_class[0], (Counts{2, 0, 0}));
}

TEST(EventF1, RejectsOverlappingReferences) {
  EXPECT_THROW(event_f1({{0, 0.0, 2.0}, {0, 1.0, 3.0}}, {}, 1, kDefault), StructuralError);
  EXPECT_THROW(event_f1({{3, 0.0, 2.0}}, {}, 1, kDefault), StructuralError);
}

TEST(SegmentF1, WorkedExamples) {
  const EventList ref = {{0, 0.0, 1.5}};
  EXPECT_EQ(segment_f1(ref, ref, 10.0, 1, kDefault).macro().f1, 1.0);
  const LevelReport r = segment_f1(ref, {{0, 0.0, 0.5}}, 10.0, 1, kDefault);
  EXPECT_EQ(r.per_class[0], (Counts{1, 0, 1}));
  const Scores s = r.macro();
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 0.5);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-15);

  const Scores empty = segment_f1(ref, {}, 10.0, 1, kDefault).macro();
  EXPECT_EQ(empty.precision, 0.0);
  EXPECT_EQ(empty.f1, 0.0);
}

TEST(SegmentF1, BoundaryTouchIsNotOverlap) {
  // An event ending exactly at 1 s does not touch segment 1.
  EXPECT_EQ(segment_f1({{0, 0.5, 1.0}}, {{0, 1.0, 1.5}}, 3.0, 1, kDefault).per_class[0], (Counts{0, 1, 1}));
}

TEST(ClipF1, WorkedExamples) {
  Eigen::MatrixXi labels(2, 1);
  labels << 1, 1;
  Eigen::MatrixXd probs(2, 1);
  probs << 0.9, 0.2;
  const LevelReport r = clip_f1(labels, probs, kDefault);
  EXPECT_EQ(r.per_class[0], (Counts{1, 0, 1}));
  EXPECT_NEAR(r.macro().f1, 2.0 / 3.0, 1e-15);

  probs << 0.9, 0.8;
  EXPECT_EQ(clip_f1(labels, probs, kDefault).macro().f1, 1.0);

  labels.setZero();
  probs.setZero();
  const Scores none = clip_f1(labels, probs, kDefault).class_scores(0);
  EXPECT_EQ(none.f1, 0.0);
  EXPECT_TRUE(none.zero_support);
}

TEST(Scores, MacroIsUnweightedMean) {
  LevelReport r = LevelReport::zeros(2);
  r.per_class[0] = {1, 0, 0};
  r.per_class[1] = {1, 1, 3};
  const Scores m = r.macro();
  EXPECT_NEAR(m.precision, (1.0 + 0.5) / 2, 1e-15);
  EXPECT_NEAR(m.recall, (1.0 + 0.25) / 2, 1e-15);
  EXPECT_NEAR(m.f1, (1.0 + 2 * 0.5 * 0.25 / 0.75) / 2, 1e-15);
}

TEST(MetricOracle, AgreesWithExhaustiveEnumeration) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_metric_instance(rng, 3, 5000, 5);
    const EventList ref = oracle::to_events(inst.reference);
    const EventList hyp = oracle::to_events(inst.hypothesis);
    EXPECT_EQ(event_f1(ref, hyp, 3, kDefault).per_class, oracle::brute_event_counts(inst.reference, inst.hypothesis, 3))
        << "trial " << trial;
    EXPECT_EQ(segment_f1(ref, hyp, 5.0, 3, kDefault).per_class,
              oracle::brute_segment_counts(inst.reference, inst.hypothesis, 5000, 1000, 3))
        << "trial " << trial;
  }
}

TEST(MetricOracle, ClipLevelAgrees) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXi labels(12, 3);
    Eigen::MatrixXd probs(12, 3);
    for (Eigen::Index i = 0; i < 12; ++i) {
      for (Eigen::Index c = 0; c < 3; ++c) {
        labels(i, c) = u(rng) < 0.5;
        probs(i, c) = u(rng) < 0.1 ? 0.5 : u(rng);
      }
    }
    EXPECT_EQ(clip_f1(labels, probs, kDefault).per_class, oracle::brute_clip_counts(labels, probs, 0.5));
  }
}

TEST(Spearman, AverageRanks) {
  EXPECT_NEAR(spearman_correlation({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(spearman_correlation({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_EQ(spearman_correlation({1, 1, 1}, {1, 2, 3}), 0.0);
  // Ranks x: 1, 2.5, 2.5, 4 against y: 1..4.
  EXPECT_NEAR(spearman_correlation({1, 2, 2, 3}, {1, 2, 3, 4}), 4.5 / std::sqrt(4.5 * 5.0), 1e-15);
}

TEST(EvalConfig, Validation) {
  EvalConfig c;
  c.offset_pct = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.binarize_threshold = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.onset_collar_s = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}
