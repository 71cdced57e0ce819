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

#include "powerpool/errors.hpp"
#include "powerpool/rng.hpp"
#include "powerpool/synth.hpp"

using namespace powerpool;

namespace {

SynthConfig small_config(std::size_t clips, std::uint64_t seed = 3) {
  SynthConfig config = default_synth_config(seed);
  config.num_clips = clips;
  return config;
}

SynthConfig with_layout(const ClassLayout& layout, std::size_t clips) {
  SynthConfig config = small_config(clips);
  config.classes = make_event_classes(layout, config.seed);
  return config;
}

}  // namespace

TEST(Synth, DefaultLayout) {
  const SynthConfig config = default_synth_config(0);
  ASSERT_EQ(config.classes.size(), 8u);
  EXPECT_EQ(config.num_frames(), 100u);
  EXPECT_EQ(config.input_dim(), 16u);
  EXPECT_NEAR(config.classes.front().mean_duration_s, 0.5, 1e-12);
  EXPECT_NEAR(config.classes.back().mean_duration_s, 8.0, 1e-12);
  for (std::size_t c = 1; c < 8; ++c) {
    EXPECT_NEAR(config.classes[c].mean_duration_s / config.classes[c - 1].mean_duration_s, std::pow(16.0, 1.0 / 7.0),
                1e-12);
  }
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = 0; b < 8; ++b) {
      const double dot = config.classes[a].feature_signature.dot(config.classes[b].feature_signature);
      EXPECT_NEAR(dot, a == b ? 4.0 : 0.0, 1e-12);
    }
  }
}

TEST(Synth, WeakLabelsFollowEvents) {
  for (const Bag& bag : generate_dataset(small_config(300))) {
    for (std::size_t c = 0; c < 8; ++c) {
      std::size_t count = 0;
      for (const Event& e : bag.reference_events) {
        if (e.class_id == c) ++count;
        EXPECT_GE(e.onset_s, 0.0);
        EXPECT_LE(e.offset_s, 10.0);
        EXPECT_LT(e.onset_s, e.offset_s);
      }
      EXPECT_LE(count, 1u);
      EXPECT_EQ(bag.weak_labels[c], count > 0 ? 1 : 0);
    }
  }
}

TEST(Synth, MeanDurationsWithinTenPercent) {
  const SynthConfig config = small_config(600);
  const auto bags = generate_dataset(config);
  const auto means = class_mean_durations(bags, 8);
  for (std::size_t c = 0; c < 8; ++c) {
    EXPECT_NEAR(means[c], config.classes[c].mean_duration_s, 0.1 * config.classes[c].mean_duration_s) << c;
  }
}

TEST(Synth, EventFramesCarrySignature) {
  SynthConfig config = small_config(50);
  config.noise_std = 0.0;
  for (const Bag& bag : generate_dataset(config)) {
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(100, 16);
    for (const Event& e : bag.reference_events) {
      const auto on = static_cast<Eigen::Index>(std::llround(e.onset_s / 0.1));
      const auto off = static_cast<Eigen::Index>(std::llround(e.offset_s / 0.1));
      for (Eigen::Index i = on; i < off; ++i) expected.row(i) += config.classes[e.class_id].feature_signature.transpose();
    }
    EXPECT_LT((bag.features - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Synth, Deterministic) {
  const auto a = generate_dataset(small_config(20, 9));
  const auto b = generate_dataset(small_config(20, 9));
  const auto c = generate_dataset(small_config(20, 10));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].features, b[i].features);
    EXPECT_EQ(a[i].reference_events, b[i].reference_events);
  }
  EXPECT_NE(a[0].features, c[0].features);
}

TEST(Synth, ClipsIndependentOfRange) {
  const SynthConfig config = small_config(10);
  const auto all = generate_dataset(config);
  const auto part = generate_clips(config, 4, 3);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(part[k].clip_id, 4 + k);
    EXPECT_EQ(part[k].features, all[4 + k].features);
  }
}

TEST(Synth, NoOccurrenceMeansNoEvents) {
  ClassLayout layout;
  layout.occurrence_prob = 0.0;
  for (const Bag& bag : generate_dataset(with_layout(layout, 20))) {
    EXPECT_TRUE(bag.reference_events.empty());
    for (int y : bag.weak_labels) EXPECT_EQ(y, 0);
  }
}

TEST(Synth, WholeClipEvents) {
  ClassLayout layout;
  layout.num_classes = 3;
  layout.mean_durations_s = {10.0, 10.0, 10.0};
  layout.jitter_ratio = 0.0;
  layout.occurrence_prob = 1.0;
  for (const Bag& bag : generate_dataset(with_layout(layout, 10))) {
    ASSERT_EQ(bag.reference_events.size(), 3u);
    for (const Event& e : bag.reference_events) {
      EXPECT_EQ(e.onset_s, 0.0);
      EXPECT_EQ(e.offset_s, 10.0);
    }
    for (int y : bag.weak_labels) EXPECT_EQ(y, 1);
  }
}

TEST(Synth, RejectsInvalidConfig) {
  SynthConfig config = small_config(10);
  config.clip_len_s = 0.1;
  EXPECT_THROW(config.validate(), ConfigError);
  config = small_config(0);
  EXPECT_THROW(config.validate(), ConfigError);
}

TEST(TimeShift, ZeroShiftIsIdentity) {
  const Bag bag = generate_dataset(small_config(1)).front();
  const Bag shifted = shift_bag(bag, 0, 0.1);
  EXPECT_EQ(shifted.features, bag.features);
  EXPECT_EQ(shifted.reference_events, bag.reference_events);
}

TEST(TimeShift, ShiftThenUnshiftRestores) {
  for (const Bag& bag : generate_dataset(small_config(20))) {
    for (long k : {1L, 7L, 16L, 55L, 99L, 150L}) {
      const Bag there = shift_bag(bag, k, 0.1);
      EXPECT_EQ(there.weak_labels, bag.weak_labels);
      const Bag back = shift_bag(there, -k, 0.1);
      EXPECT_EQ(back.features, bag.features);
      EXPECT_EQ(back.reference_events, bag.reference_events);
    }
  }
}

TEST(TimeShift, EventsFollowFeatures) {
  Bag bag;
  bag.features = Eigen::MatrixXd::Zero(10, 1);
  bag.features(8, 0) = 1.0;
  bag.features(9, 0) = 1.0;
  bag.weak_labels = {1};
  bag.reference_events = {{0, 0.8, 1.0}};
  const Bag shifted = shift_bag(bag, 1, 0.1);
  EXPECT_EQ(shifted.features(9, 0), 1.0);
  EXPECT_EQ(shifted.features(0, 0), 1.0);
  ASSERT_EQ(shifted.reference_events.size(), 2u);
  EXPECT_EQ(shifted.reference_events[0], (Event{0, 0.0, 0.1}));
  EXPECT_EQ(shifted.reference_events[1], (Event{0, 0.9, 1.0}));
}

TEST(TimeShift, AugmentKeepsWeakLabels) {
  std::mt19937_64 rng(mix_seed(1, 2));
  for (const Bag& bag : generate_dataset(small_config(30))) {
    const Bag aug = time_shift_augment(bag, rng, 0.1);
    EXPECT_EQ(aug.weak_labels, bag.weak_labels);
    EXPECT_NEAR(aug.features.sum(), bag.features.sum(), 1e-9);
  }
}
