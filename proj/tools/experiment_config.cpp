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

#include "experiment_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "powerpool/errors.hpp"
#include "powerpool/formats.hpp"

namespace powerpool::cli {

namespace {

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    return parse_real(v);
  } catch (const FormatError&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> to_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (v.empty()) return out;
  for (const auto& item : split(v, ',')) out.push_back(to_real(key, item));
  return out;
}

std::vector<PoolingKind> to_poolings(const std::string& key, const std::string& v) {
  std::vector<PoolingKind> out;
  for (const auto& item : split(v, ',')) {
    try {
      out.push_back(parse_pooling_kind(item));
    } catch (const ConfigError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': at least one pooling kind required");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"synth.clip_len_s", [](auto& c, auto& k, auto& v) { c.synth.clip_len_s = to_real(k, v); }},
      {"synth.frame_hop_s", [](auto& c, auto& k, auto& v) { c.synth.frame_hop_s = to_real(k, v); }},
      {"synth.num_clips", [](auto& c, auto& k, auto& v) { c.synth.num_clips = to_count(k, v); }},
      {"synth.num_test_clips", [](auto& c, auto& k, auto& v) { c.num_test_clips = to_count(k, v); }},
      {"synth.noise_std", [](auto& c, auto& k, auto& v) { c.synth.noise_std = to_real(k, v); }},
      {"synth.seed", [](auto& c, auto& k, auto& v) { c.synth.seed = to_count(k, v); }},
      {"synth.num_classes", [](auto& c, auto& k, auto& v) { c.layout.num_classes = to_count(k, v); }},
      {"synth.min_duration_s", [](auto& c, auto& k, auto& v) { c.layout.min_duration_s = to_real(k, v); }},
      {"synth.max_duration_s", [](auto& c, auto& k, auto& v) { c.layout.max_duration_s = to_real(k, v); }},
      {"synth.mean_durations_s", [](auto& c, auto& k, auto& v) { c.layout.mean_durations_s = to_reals(k, v); }},
      {"synth.jitter_ratio", [](auto& c, auto& k, auto& v) { c.layout.jitter_ratio = to_real(k, v); }},
      {"synth.occurrence_prob", [](auto& c, auto& k, auto& v) { c.layout.occurrence_prob = to_real(k, v); }},
      {"synth.feature_dim", [](auto& c, auto& k, auto& v) { c.layout.feature_dim = to_count(k, v); }},
      {"synth.signature_scale", [](auto& c, auto& k, auto& v) { c.layout.signature_scale = to_real(k, v); }},
      {"train.epochs", [](auto& c, auto& k, auto& v) { c.train.epochs = to_count(k, v); }},
      {"train.batch_size", [](auto& c, auto& k, auto& v) { c.train.batch_size = to_count(k, v); }},
      {"train.learning_rate", [](auto& c, auto& k, auto& v) { c.train.learning_rate = to_real(k, v); }},
      {"train.power_learning_rate",
       [](auto& c, auto& k, auto& v) {
         if (v.empty() || v == "default") {
           c.train.power_learning_rate.reset();
         } else {
           c.train.power_learning_rate = to_real(k, v);
         }
       }},
      {"train.momentum", [](auto& c, auto& k, auto& v) { c.train.momentum = to_real(k, v); }},
      {"train.lambda", [](auto& c, auto& k, auto& v) { c.train.lambda = to_real(k, v); }},
      {"train.pooling",
       [](auto& c, auto& k, auto& v) {
         try {
           c.train.pooling = parse_pooling_kind(v);
         } catch (const ConfigError& e) {
           throw ConfigError("config key '" + k + "': " + e.what());
         }
       }},
      {"train.augment", [](auto& c, auto& k, auto& v) { c.train.augment = to_bool(k, v); }},
      {"train.shift_std_frames", [](auto& c, auto& k, auto& v) { c.train.shift_std_frames = to_real(k, v); }},
      {"train.hidden_dim", [](auto& c, auto& k, auto& v) { c.train.hidden_dim = to_count(k, v); }},
      {"train.seed", [](auto& c, auto& k, auto& v) { c.train.seed = to_count(k, v); }},
      {"train.checkpoint_every", [](auto& c, auto& k, auto& v) { c.checkpoint_every = to_count(k, v); }},
      {"eval.onset_collar_s", [](auto& c, auto& k, auto& v) { c.eval.onset_collar_s = to_real(k, v); }},
      {"eval.offset_collar_s", [](auto& c, auto& k, auto& v) { c.eval.offset_collar_s = to_real(k, v); }},
      {"eval.offset_pct", [](auto& c, auto& k, auto& v) { c.eval.offset_pct = to_real(k, v); }},
      {"eval.segment_len_s", [](auto& c, auto& k, auto& v) { c.eval.segment_len_s = to_real(k, v); }},
      {"eval.threshold", [](auto& c, auto& k, auto& v) { c.eval.binarize_threshold = to_real(k, v); }},
      {"eval.median_beta", [](auto& c, auto& k, auto& v) { c.eval.median_beta = to_real(k, v); }},
      {"experiment.out", [](auto& c, auto&, auto& v) { c.out_dir = v; }},
      {"experiment.poolings", [](auto& c, auto& k, auto& v) { c.poolings = to_poolings(k, v); }},
      {"experiment.seeds", [](auto& c, auto& k, auto& v) { c.seeds = to_count(k, v); }},
      {"experiment.jobs", [](auto& c, auto& k, auto& v) { c.jobs = to_count(k, v); }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::finalize() {
  synth.classes = make_event_classes(layout, synth.seed);
  synth.validate();
  train.validate();
  eval.validate();
  if (poolings.empty()) throw ConfigError("experiment: at least one pooling kind required");
  if (seeds < 1) throw ConfigError("experiment: seeds must be >= 1");
  if (jobs < 1) throw ConfigError("experiment: jobs must be >= 1");
}

ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& values) {
  ExperimentConfig config;
  for (const auto& [key, value] : values) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(config, key, value);
  }
  config.finalize();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_experiment_config(parse_key_values(in));
}

std::string format_experiment_config(const ExperimentConfig& c) {
  auto reals = [](const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
    return out;
  };
  std::string poolings;
  for (std::size_t i = 0; i < c.poolings.size(); ++i) {
    poolings += (i ? "," : "") + std::string(pooling_name(c.poolings[i]));
  }
  std::ostringstream out;
  out << "synth.clip_len_s=" << format_real(c.synth.clip_len_s) << '\n'
      << "synth.frame_hop_s=" << format_real(c.synth.frame_hop_s) << '\n'
      << "synth.num_clips=" << c.synth.num_clips << '\n'
      << "synth.num_test_clips=" << c.num_test_clips << '\n'
      << "synth.noise_std=" << format_real(c.synth.noise_std) << '\n'
      << "synth.seed=" << c.synth.seed << '\n'
      << "synth.num_classes=" << c.layout.num_classes << '\n'
      << "synth.min_duration_s=" << format_real(c.layout.min_duration_s) << '\n'
      << "synth.max_duration_s=" << format_real(c.layout.max_duration_s) << '\n'
      << "synth.mean_durations_s=" << reals(c.layout.mean_durations_s) << '\n'
      << "synth.jitter_ratio=" << format_real(c.layout.jitter_ratio) << '\n'
      << "synth.occurrence_prob=" << format_real(c.layout.occurrence_prob) << '\n'
      << "synth.feature_dim=" << c.layout.feature_dim << '\n'
      << "synth.signature_scale=" << format_real(c.layout.signature_scale) << '\n'
      << "train.epochs=" << c.train.epochs << '\n'
      << "train.batch_size=" << c.train.batch_size << '\n'
      << "train.learning_rate=" << format_real(c.train.learning_rate) << '\n'
      << "train.power_learning_rate="
      << (c.train.power_learning_rate ? format_real(*c.train.power_learning_rate) : "default") << '\n'
      << "train.momentum=" << format_real(c.train.momentum) << '\n'
      << "train.lambda=" << format_real(c.train.lambda) << '\n'
      << "train.pooling=" << pooling_name(c.train.pooling) << '\n'
      << "train.augment=" << (c.train.augment ? "true" : "false") << '\n'
      << "train.shift_std_frames=" << format_real(c.train.shift_std_frames) << '\n'
      << "train.hidden_dim=" << c.train.hidden_dim << '\n'
      << "train.seed=" << c.train.seed << '\n'
      << "train.checkpoint_every=" << c.checkpoint_every << '\n'
      << "eval.onset_collar_s=" << format_real(c.eval.onset_collar_s) << '\n'
      << "eval.offset_collar_s=" << format_real(c.eval.offset_collar_s) << '\n'
      << "eval.offset_pct=" << format_real(c.eval.offset_pct) << '\n'
      << "eval.segment_len_s=" << format_real(c.eval.segment_len_s) << '\n'
      << "eval.threshold=" << format_real(c.eval.binarize_threshold) << '\n'
      << "eval.median_beta=" << format_real(c.eval.median_beta) << '\n'
      << "experiment.out=" << c.out_dir.string() << '\n'
      << "experiment.poolings=" << poolings << '\n'
      << "experiment.seeds=" << c.seeds << '\n'
      << "experiment.jobs=" << c.jobs << '\n';
  return out.str();
}

}  // namespace powerpool::cli
