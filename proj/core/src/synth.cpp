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

#include "powerpool/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "powerpool/errors.hpp"
#include "powerpool/rng.hpp"

namespace powerpool {

void sort_events(EventList& events) {
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.onset_s != b.onset_s) return a.onset_s < b.onset_s;
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    return a.offset_s < b.offset_s;
  });
}

std::size_t SynthConfig::num_frames() const {
  return static_cast<std::size_t>(std::llround(clip_len_s / frame_hop_s));
}

std::size_t SynthConfig::input_dim() const {
  return classes.empty() ? 0 : static_cast<std::size_t>(classes.front().feature_signature.size());
}

void SynthConfig::validate() const {
  if (!(frame_hop_s > 0.0) || !(clip_len_s > 0.0) || num_frames() < 2) {
    throw ConfigError("synth: clip_len_s / frame_hop_s must give at least 2 frames");
  }
  if (num_clips < 1) throw ConfigError("synth: num_clips must be >= 1");
  if (classes.empty()) throw ConfigError("synth: at least one event class required");
  if (!(noise_std >= 0.0)) throw ConfigError("synth: noise_std must be >= 0");
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& spec = classes[c];
    const std::string name = "synth: class " + std::to_string(c);
    if (spec.class_id != c) throw ConfigError(name + " has class_id " + std::to_string(spec.class_id));
    if (!(spec.mean_duration_s > 0.0) || spec.mean_duration_s > clip_len_s + 1e-9) {
      throw ConfigError(name + " mean duration must lie in (0, clip_len_s]");
    }
    if (spec.duration_jitter_s < 0.0 ||
        (spec.duration_jitter_s > 0.0 && spec.duration_jitter_s >= spec.mean_duration_s)) {
      throw ConfigError(name + " jitter must be smaller than the mean duration");
    }
    if (!(spec.occurrence_prob >= 0.0 && spec.occurrence_prob <= 1.0)) {
      throw ConfigError(name + " occurrence_prob must lie in [0, 1]");
    }
    if (static_cast<std::size_t>(spec.feature_signature.size()) != input_dim() || input_dim() == 0) {
      throw ConfigError(name + " signature dimension differs from the other classes");
    }
  }
}

std::size_t Dataset::input_dim() const {
  return bags.empty() ? 0 : static_cast<std::size_t>(bags.front().features.cols());
}

std::vector<EventClassSpec> make_event_classes(const ClassLayout& layout, std::uint64_t seed) {
  const std::size_t n = layout.mean_durations_s.empty() ? layout.num_classes
                                                         : layout.mean_durations_s.size();
  if (n == 0 || layout.feature_dim == 0) {
    throw ConfigError("synth: need at least one class and one feature dimension");
  }
  if (layout.mean_durations_s.empty() &&
      !(layout.min_duration_s > 0.0 && layout.max_duration_s >= layout.min_duration_s)) {
    throw ConfigError("synth: need 0 < min_duration_s <= max_duration_s");
  }
  if (!(layout.jitter_ratio >= 0.0 && layout.jitter_ratio < 1.0)) {
    throw ConfigError("synth: jitter_ratio must lie in [0, 1)");
  }

  std::mt19937_64 rng(mix_seed(seed, 0xC1A55E5ULL));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(layout.feature_dim);

  std::vector<EventClassSpec> classes(n);
  std::vector<Eigen::VectorXd> basis;
  for (std::size_t c = 0; c < n; ++c) {
    double mean = 0.0;
    if (!layout.mean_durations_s.empty()) {
      mean = layout.mean_durations_s[c];
    } else if (n == 1) {
      mean = layout.min_duration_s;
    } else {
      const double t = static_cast<double>(c) / static_cast<double>(n - 1);
      mean = layout.min_duration_s * std::pow(layout.max_duration_s / layout.min_duration_s, t);
    }

    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
    // Gram-Schmidt against earlier signatures while the dimension allows it.
    if (basis.size() < layout.feature_dim) {
      for (const auto& b : basis) v -= v.dot(b) * b;
    }
    v.normalize();
    basis.push_back(v);

    classes[c].class_id = c;
    classes[c].mean_duration_s = mean;
    classes[c].duration_jitter_s = layout.jitter_ratio * mean;
    classes[c].feature_signature = layout.signature_scale * v;
    classes[c].occurrence_prob = layout.occurrence_prob;
  }
  return classes;
}

SynthConfig default_synth_config(std::uint64_t seed) {
  SynthConfig config;
  config.seed = seed;
  config.classes = make_event_classes(ClassLayout{}, seed);
  return config;
}

std::vector<Bag> generate_dataset(const SynthConfig& config) {
  return generate_clips(config, 0, config.num_clips);
}

std::vector<Bag> generate_clips(const SynthConfig& config, std::size_t first_clip,
                                std::size_t count) {
  config.validate();
  const std::size_t frames = config.num_frames();
  const auto dim = static_cast<Eigen::Index>(config.input_dim());
  const double hop = config.frame_hop_s;

  std::vector<Bag> bags;
  bags.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t clip = first_clip + k;
    std::mt19937_64 rng(mix_seed(config.seed, clip + 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    Bag bag;
    bag.clip_id = clip;
    bag.weak_labels.assign(config.classes.size(), 0);
    // Active frame range per class, [begin, end).
    std::vector<std::pair<std::size_t, std::size_t>> active(config.classes.size(), {0, 0});

    for (const auto& spec : config.classes) {
      if (!(unit(rng) < spec.occurrence_prob)) continue;
      const double lo = spec.mean_duration_s - spec.duration_jitter_s;
      const double hi = spec.mean_duration_s + spec.duration_jitter_s;
      const double duration = lo + (hi - lo) * unit(rng);
      const auto len = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::llround(duration / hop)), 1, frames);
      std::uniform_int_distribution<std::size_t> onset_dist(0, frames - len);
      const std::size_t onset = onset_dist(rng);
      active[spec.class_id] = {onset, onset + len};
      bag.weak_labels[spec.class_id] = 1;
      bag.reference_events.push_back({spec.class_id, round_ms(static_cast<double>(onset) * hop),
                                      round_ms(static_cast<double>(onset + len) * hop)});
    }

    bag.features.resize(static_cast<Eigen::Index>(frames), dim);
    for (std::size_t i = 0; i < frames; ++i) {
      for (Eigen::Index d = 0; d < dim; ++d) {
        bag.features(static_cast<Eigen::Index>(i), d) = config.noise_std * noise(rng);
      }
    }
    for (const auto& spec : config.classes) {
      const auto [begin, end] = active[spec.class_id];
      for (std::size_t i = begin; i < end; ++i) {
        bag.features.row(static_cast<Eigen::Index>(i)) += spec.feature_signature.transpose();
      }
    }
    sort_events(bag.reference_events);
    bags.push_back(std::move(bag));
  }
  return bags;
}

Dataset make_dataset(const SynthConfig& config, std::vector<Bag> bags) {
  Dataset ds;
  ds.frame_hop_s = config.frame_hop_s;
  ds.clip_len_s = round_ms(static_cast<double>(config.num_frames()) * config.frame_hop_s);
  ds.num_classes = config.classes.size();
  ds.bags = std::move(bags);
  return ds;
}

Bag shift_bag(const Bag& bag, long frames, double frame_hop_s) {
  const auto n = static_cast<long>(bag.features.rows());
  if (n == 0) return bag;
  const long k = ((frames % n) + n) % n;
  if (k == 0) return bag;

  Bag out;
  out.clip_id = bag.clip_id;
  out.weak_labels = bag.weak_labels;
  out.features.resize(bag.features.rows(), bag.features.cols());
  for (long i = 0; i < n; ++i) {
    out.features.row((i + k) % n) = bag.features.row(i);
  }

  const double clip_len = round_ms(static_cast<double>(n) * frame_hop_s);
  const double shift = round_ms(static_cast<double>(k) * frame_hop_s);
  EventList moved;
  for (const Event& e : bag.reference_events) {
    const double on = round_ms(e.onset_s + shift);
    const double off = round_ms(e.offset_s + shift);
    if (on >= clip_len) {
      moved.push_back({e.class_id, round_ms(on - clip_len), round_ms(off - clip_len)});
    } else if (off > clip_len) {
      moved.push_back({e.class_id, on, clip_len});
      moved.push_back({e.class_id, 0.0, round_ms(off - clip_len)});
    } else {
      moved.push_back({e.class_id, on, off});
    }
  }
  sort_events(moved);
  // Rejoin pieces of one event that now touch again.
  for (const Event& e : moved) {
    auto joined = std::find_if(out.reference_events.begin(), out.reference_events.end(),
                               [&](const Event& prev) {
                                 return prev.class_id == e.class_id &&
                                        std::abs(prev.offset_s - e.onset_s) < 1e-9;
                               });
    if (joined != out.reference_events.end()) {
      joined->offset_s = e.offset_s;
    } else {
      out.reference_events.push_back(e);
    }
  }
  sort_events(out.reference_events);
  return out;
}

Bag time_shift_augment(const Bag& bag, std::mt19937_64& rng, double frame_hop_s,
                       double shift_std_frames) {
  if (shift_std_frames <= 0.0) return bag;
  std::normal_distribution<double> dist(0.0, shift_std_frames);
  return shift_bag(bag, std::lround(dist(rng)), frame_hop_s);
}

std::vector<double> class_mean_durations(const std::vector<Bag>& bags, std::size_t num_classes) {
  std::vector<double> total(num_classes, 0.0);
  std::vector<std::size_t> count(num_classes, 0);
  for (const Bag& bag : bags) {
    for (const Event& e : bag.reference_events) {
      if (e.class_id >= num_classes) continue;
      total[e.class_id] += e.duration();
      ++count[e.class_id];
    }
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    total[c] = count[c] ? total[c] / static_cast<double>(count[c]) : 0.0;
  }
  return total;
}

}  // namespace powerpool
