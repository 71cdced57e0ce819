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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "powerpool/pooling.hpp"
#include "powerpool/sed_eval.hpp"
#include "powerpool/synth.hpp"
#include "powerpool/trainer.hpp"

namespace powerpool::cli {

/// Everything one experiment needs. Read from a flat key=value file whose
/// keys carry a section prefix: synth.*, train.*, eval.*, experiment.*.
struct ExperimentConfig {
  SynthConfig synth;  // classes are rebuilt from `layout` by finalize()
  ClassLayout layout;
  std::size_t num_test_clips = 300;
  TrainConfig train;
  std::size_t checkpoint_every = 1;  // 0 writes only the final checkpoint
  EvalConfig eval;
  std::filesystem::path out_dir = "out";
  std::vector<PoolingKind> poolings{kAllPoolingKinds.begin(), kAllPoolingKinds.end()};
  std::size_t seeds = 1;
  std::size_t jobs = 1;

  /// Rebuilds synth.classes from layout and synth.seed, then validates.
  void finalize();
};

/// Applies `values` on top of the defaults. Unknown keys and unparsable
/// values throw ConfigError naming the key.
ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& values);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical key=value text for every key (round-trips through the parser).
std::string format_experiment_config(const ExperimentConfig& config);

}  // namespace powerpool::cli
