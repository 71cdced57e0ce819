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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "experiment_config.hpp"
#include "powerpool/formats.hpp"
#include "powerpool/trainer.hpp"

namespace powerpool::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Flags shared by the subcommands; each one reads what it needs.
struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> pooling;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> jobs;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> predictions;
  std::optional<std::filesystem::path> run;
  std::optional<std::size_t> clip;
  std::optional<std::size_t> cls;
  std::string split = "test";
  bool svg = false;
};

/// Outcome of one train + evaluate run.
struct RunResult {
  PoolingKind pooling = PoolingKind::LinearSoftmax;
  std::uint64_t seed = 0;
  MetricsReport metrics;
  Eigen::VectorXd exponents;  // effective n_c per class (nan where undefined)
  std::vector<double> class_mean_durations_s;
  /// Spearman correlation of learned n_c against mean duration (Power only).
  double exponent_duration_correlation = 0.0;
  double final_loss = 0.0;
};

/// n for the gradient-sign threshold: 1 for linear, 0 for average, the
/// learned value for power, nan for max and exponential.
double effective_exponent(const PoolingSpec& pooling, std::size_t cls);

Checkpoint make_checkpoint(const TrainState& state, const Dataset& train_set);

/// Scores the dataset with the checkpoint, median-filters with windows from
/// the checkpoint's class durations, and counts all three levels.
MetricsReport evaluate_checkpoint(const Checkpoint& checkpoint, const Dataset& dataset,
                                  const EvalConfig& config, Predictions* predictions = nullptr);

std::vector<ClipPredictionRow> clip_prediction_rows(const Checkpoint& checkpoint, const Dataset& dataset,
                                                    const Predictions& predictions);

/// Trains on `train_set`, evaluates on `eval_set`, and writes the run
/// artifacts into `out_dir` (nothing is written when out_dir is empty).
RunResult run_training(const Dataset& train_set, const Dataset& eval_set, const TrainConfig& train,
                       const EvalConfig& eval, std::size_t checkpoint_every,
                       const std::filesystem::path& out_dir);

/// Train and test splits of the synthetic stream described by `config`.
std::pair<Dataset, Dataset> generate_splits(const ExperimentConfig& config);

/// Runs every (pooling, seed) pair of the config, seeds base_seed ..
/// base_seed + config.seeds - 1, on config.jobs worker threads. Without
/// `data`, each seed gets its own synthetic splits (synth seed = run seed).
/// Results come back in (pooling, seed) order; per-run artifacts go to
/// out_dir/<pooling>/seed_<s> and summaries to out_dir (skipped when empty).
std::vector<RunResult> run_sweep(const ExperimentConfig& config, std::uint64_t base_seed,
                                 const std::optional<std::pair<Dataset, Dataset>>& data,
                                 const std::filesystem::path& out_dir);

int cmd_generate(const CommandOptions& opts, std::ostream& out);
int cmd_train(const CommandOptions& opts, std::ostream& out);
int cmd_evaluate(const CommandOptions& opts, std::ostream& out);
int cmd_plotdata(const CommandOptions& opts, std::ostream& out);
int cmd_sweep(const CommandOptions& opts, std::ostream& out);

/// Full command line entry point; maps errors onto the exit-code contract
/// (0 success, 2 usage or config error, 3 numerical abort).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace powerpool::cli
