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
#include <random>
#include <vector>

#include <Eigen/Core>

#include "powerpool/events.hpp"

namespace powerpool {

struct EventClassSpec {
  std::size_t class_id = 0;
  double mean_duration_s = 1.0;
  double duration_jitter_s = 0.0;
  Eigen::VectorXd feature_signature;
  double occurrence_prob = 0.5;
};

/// Parameters used to build the default family of event classes: mean
/// durations log-spaced between min and max (unless listed explicitly),
/// jitter proportional to the mean, and mutually orthogonal signatures of
/// norm `signature_scale` (as far as feature_dim allows).
struct ClassLayout {
  std::size_t num_classes = 8;
  double min_duration_s = 0.5;
  double max_duration_s = 8.0;
  std::vector<double> mean_durations_s;  // overrides min/max when non-empty
  double jitter_ratio = 0.2;
  double occurrence_prob = 0.5;
  std::size_t feature_dim = 16;
  double signature_scale = 2.0;
};

struct SynthConfig {
  double clip_len_s = 10.0;
  double frame_hop_s = 0.1;
  std::size_t num_clips = 1000;
  std::vector<EventClassSpec> classes;
  double noise_std = 0.5;
  std::uint64_t seed = 0;

  std::size_t num_frames() const;
  std::size_t input_dim() const;
  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// One clip: frame features, weak labels, and the strong reference events.
struct Bag {
  std::size_t clip_id = 0;
  Eigen::MatrixXd features;      // frames x input_dim
  std::vector<int> weak_labels;  // one {0,1} per class
  EventList reference_events;
};

/// A set of clips sharing frame geometry and class count.
struct Dataset {
  double frame_hop_s = 0.1;
  double clip_len_s = 10.0;
  std::size_t num_classes = 0;
  std::vector<Bag> bags;

  std::size_t input_dim() const;
};

std::vector<EventClassSpec> make_event_classes(const ClassLayout& layout, std::uint64_t seed);

/// The default benchmark: 8 classes from 0.5 s to 8 s, 10 s clips at 0.1 s hop.
SynthConfig default_synth_config(std::uint64_t seed = 0);

/// Clips 0 .. num_clips-1 of the stream defined by `config`.
std::vector<Bag> generate_dataset(const SynthConfig& config);
/// Clips first_clip .. first_clip+count-1 of the same stream. Each clip is
/// drawn from its own generator seeded from (seed, clip index).
std::vector<Bag> generate_clips(const SynthConfig& config, std::size_t first_clip,
                                std::size_t count);

Dataset make_dataset(const SynthConfig& config, std::vector<Bag> bags);

/// Circular shift by `frames` (positive moves content later). Reference
/// events move with the content; an event crossing the clip end is split.
Bag shift_bag(const Bag& bag, long frames, double frame_hop_s);

/// shift_bag with a shift drawn as round(Normal(0, shift_std_frames)).
Bag time_shift_augment(const Bag& bag, std::mt19937_64& rng, double frame_hop_s,
                       double shift_std_frames = 16.0);

/// Mean reference event duration per class; 0 for classes with no events.
std::vector<double> class_mean_durations(const std::vector<Bag>& bags, std::size_t num_classes);

}  // namespace powerpool
