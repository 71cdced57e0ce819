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

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "powerpool/errors.hpp"
#include "svg_plot.hpp"

namespace powerpool::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

ExperimentConfig resolve_config(const CommandOptions& opts) {
  ExperimentConfig config;
  if (opts.config) {
    config = load_experiment_config(*opts.config);
  }
  if (opts.seed) {
    config.synth.seed = *opts.seed;
    config.train.seed = *opts.seed;
  }
  if (opts.pooling) config.train.pooling = parse_pooling_kind(*opts.pooling);
  if (opts.seeds) config.seeds = *opts.seeds;
  if (opts.jobs) config.jobs = *opts.jobs;
  if (opts.out) config.out_dir = *opts.out;
  config.finalize();
  return config;
}

Dataset load_split(const fs::path& dir, const std::string& split) {
  const DatasetPaths paths = DatasetPaths::in(dir, split);
  if (!paths.exist()) {
    throw ConfigError("dataset split '" + split + "' not found in " + dir.string());
  }
  return load_dataset(paths);
}

void print_metrics(std::ostream& out, const MetricsReport& m) {
  auto line = [&out](const char* name, const LevelReport& r) {
    const Scores s = r.macro();
    out << "  " << name << " macro  F1 " << fixed(s.f1) << "  P " << fixed(s.precision) << "  R "
        << fixed(s.recall) << '\n';
  };
  line("event  ", m.event);
  line("segment", m.segment);
  line("clip   ", m.clip);
}

std::string losses_text(const std::vector<double>& losses) {
  FileHeader h;
  h.type = "losses";
  h.fields = {{"epochs", std::to_string(losses.size())}};
  h.columns = {"epoch", "loss"};
  std::string out = format_header(h) + "\n";
  for (std::size_t e = 0; e < losses.size(); ++e) {
    out += std::to_string(e + 1) + "," + format_real(losses[e]) + "\n";
  }
  return out;
}

template <typename Writer, typename Value>
void write_file(const fs::path& path, Writer writer, const Value& value) {
  std::ostringstream ss;
  writer(ss, value);
  write_text_file(path, ss.str());
}

std::string epoch_name(std::size_t epoch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "epoch_%04zu.ckpt", epoch);
  return buf;
}

}  // namespace

double effective_exponent(const PoolingSpec& pooling, std::size_t cls) {
  switch (pooling.kind) {
    case PoolingKind::Average:
      return 0.0;
    case PoolingKind::LinearSoftmax:
      return 1.0;
    case PoolingKind::Power:
      return softplus(pooling.power->raw[static_cast<Eigen::Index>(cls)]);
    default:
      return kNaN;
  }
}

Checkpoint make_checkpoint(const TrainState& state, const Dataset& train_set) {
  Checkpoint ck;
  ck.pooling = state.pooling;
  ck.weights = state.weights;
  ck.epoch = state.epoch;
  ck.frame_hop_s = train_set.frame_hop_s;
  ck.class_mean_durations_s = class_mean_durations(train_set.bags, train_set.num_classes);
  return ck;
}

MetricsReport evaluate_checkpoint(const Checkpoint& checkpoint, const Dataset& dataset,
                                  const EvalConfig& config, Predictions* predictions) {
  if (checkpoint.weights.num_classes() != dataset.num_classes) {
    throw StructuralError("checkpoint has " + std::to_string(checkpoint.weights.num_classes()) +
                          " classes but the dataset has " + std::to_string(dataset.num_classes));
  }
  if (checkpoint.weights.input_dim() != dataset.input_dim()) {
    throw StructuralError("checkpoint expects " + std::to_string(checkpoint.weights.input_dim()) +
                          " features per frame but the dataset has " + std::to_string(dataset.input_dim()));
  }
  Predictions local = predict(checkpoint.weights, checkpoint.pooling, dataset.bags);
  const auto windows =
      class_window_sizes(checkpoint.class_mean_durations_s, dataset.frame_hop_s, config.median_beta);
  MetricsReport report = evaluate_dataset(dataset, local.frame_probs, local.clip_probs, windows, config);
  if (predictions) *predictions = std::move(local);
  return report;
}

std::vector<ClipPredictionRow> clip_prediction_rows(const Checkpoint& checkpoint, const Dataset& dataset,
                                                    const Predictions& predictions) {
  std::vector<ClipPredictionRow> rows;
  for (std::size_t i = 0; i < dataset.bags.size(); ++i) {
    for (std::size_t c = 0; c < dataset.num_classes; ++c) {
      const double yc = predictions.clip_probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      const double n = effective_exponent(checkpoint.pooling, c);
      rows.push_back({dataset.bags[i].clip_id, c, yc, n, n / (n + 1.0) * yc, 0.5 * yc});
    }
  }
  return rows;
}

RunResult run_training(const Dataset& train_set, const Dataset& eval_set, const TrainConfig& train,
                       const EvalConfig& eval, std::size_t checkpoint_every, const fs::path& out_dir) {
  const bool write = !out_dir.empty();
  const TrainState state = powerpool::train(train_set, train, [&](const TrainState& s) {
    if (write && checkpoint_every > 0 && s.epoch % checkpoint_every == 0) {
      save_checkpoint(make_checkpoint(s, train_set), out_dir / "checkpoints" / epoch_name(s.epoch));
    }
  });

  const Checkpoint checkpoint = make_checkpoint(state, train_set);
  Predictions predictions;
  RunResult result;
  result.pooling = train.pooling;
  result.seed = train.seed;
  result.metrics = evaluate_checkpoint(checkpoint, eval_set, eval, &predictions);
  result.final_loss = state.loss_history.back();
  result.class_mean_durations_s = checkpoint.class_mean_durations_s;
  result.exponents.resize(static_cast<Eigen::Index>(train_set.num_classes));
  for (std::size_t c = 0; c < train_set.num_classes; ++c) {
    result.exponents[static_cast<Eigen::Index>(c)] = effective_exponent(state.pooling, c);
  }
  if (train.pooling == PoolingKind::Power) {
    result.exponent_duration_correlation = spearman_correlation(
        std::vector<double>(result.exponents.data(), result.exponents.data() + result.exponents.size()),
        result.class_mean_durations_s);
  } else {
    result.exponent_duration_correlation = kNaN;
  }

  if (write) {
    fs::create_directories(out_dir);
    save_checkpoint(checkpoint, out_dir / "checkpoint.ckpt");
    write_text_file(out_dir / "losses.csv", losses_text(state.loss_history));
    if (!state.exponent_history.empty()) {
      write_file(out_dir / "exponents.csv", write_exponents, state.exponent_history);
    }
    write_file(out_dir / "metrics.csv", write_metrics, result.metrics);
    FramePredictionDump dump;
    dump.frame_hop_s = eval_set.frame_hop_s;
    for (const Bag& bag : eval_set.bags) dump.clip_ids.push_back(bag.clip_id);
    dump.probs = predictions.frame_probs;
    write_file(out_dir / "frame_predictions.csv", write_frame_predictions, dump);
    write_file(out_dir / "clip_predictions.csv", write_clip_predictions,
               clip_prediction_rows(checkpoint, eval_set, predictions));
  }
  return result;
}

std::pair<Dataset, Dataset> generate_splits(const ExperimentConfig& config) {
  Dataset train = make_dataset(config.synth, generate_clips(config.synth, 0, config.synth.num_clips));
  Dataset test = make_dataset(config.synth, generate_clips(config.synth, config.synth.num_clips, config.num_test_clips));
  return {std::move(train), std::move(test)};
}

std::vector<RunResult> run_sweep(const ExperimentConfig& config, std::uint64_t base_seed,
                                 const std::optional<std::pair<Dataset, Dataset>>& data,
                                 const fs::path& out_dir) {
  // Datasets per seed are built up front and shared read-only by the workers.
  std::vector<std::pair<Dataset, Dataset>> per_seed;
  if (!data) {
    for (std::size_t s = 0; s < config.seeds; ++s) {
      ExperimentConfig seeded = config;
      seeded.synth.seed = base_seed + s;
      seeded.finalize();
      per_seed.push_back(generate_splits(seeded));
    }
  }

  struct Task {
    PoolingKind kind;
    std::size_t seed_index;
  };
  std::vector<Task> tasks;
  for (PoolingKind kind : config.poolings) {
    for (std::size_t s = 0; s < config.seeds; ++s) tasks.push_back({kind, s});
  }

  std::vector<RunResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        const auto& [train_set, test_set] = data ? *data : per_seed[tasks[t].seed_index];
        TrainConfig train = config.train;
        train.pooling = tasks[t].kind;
        train.seed = base_seed + tasks[t].seed_index;
        const fs::path dir = out_dir.empty() ? fs::path()
                                             : out_dir / std::string(pooling_name(train.pooling)) /
                                                   ("seed_" + std::to_string(train.seed));
        results[t] = run_training(train_set, test_set.bags.empty() ? train_set : test_set, train, config.eval,
                                  config.checkpoint_every, dir);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.jobs, tasks.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (!out_dir.empty()) {
    std::ostringstream summary;
    FileHeader h;
    h.type = "sweep_summary";
    h.columns = {"pooling", "seed", "event_f1", "event_precision", "event_recall",
                 "segment_f1", "clip_f1", "exponent_duration_spearman"};
    summary << format_header(h) << '\n';
    for (const RunResult& r : results) {
      summary << pooling_name(r.pooling) << ',' << r.seed << ',' << format_real(r.metrics.event.macro().f1) << ','
              << format_real(r.metrics.event.macro().precision) << ','
              << format_real(r.metrics.event.macro().recall) << ','
              << format_real(r.metrics.segment.macro().f1) << ',' << format_real(r.metrics.clip.macro().f1) << ','
              << format_real(r.exponent_duration_correlation) << '\n';
    }
    write_text_file(out_dir / "summary.csv", summary.str());
  }
  return results;
}

int cmd_generate(const CommandOptions& opts, std::ostream& out) {
  const ExperimentConfig config = resolve_config(opts);
  const auto [train, test] = generate_splits(config);
  const fs::path dir = config.out_dir;
  save_dataset(train, DatasetPaths::in(dir, "train"));
  if (!test.bags.empty()) save_dataset(test, DatasetPaths::in(dir, "test"));
  write_text_file(dir / "generate.cfg", format_experiment_config(config));

  out << "wrote " << train.bags.size() << " train and " << test.bags.size() << " test clips to "
      << dir.string() << '\n';
  out << "classes: " << train.num_classes << ", frames per clip: " << config.synth.num_frames()
      << ", feature dim: " << train.input_dim() << '\n';
  const auto means = class_mean_durations(train.bags, train.num_classes);
  const Eigen::MatrixXi labels = weak_label_matrix(train.bags, train.num_classes);
  for (std::size_t c = 0; c < train.num_classes; ++c) {
    out << "  class " << c << ": configured mean " << fixed(config.synth.classes[c].mean_duration_s, 2)
        << " s, observed mean " << fixed(means[c], 2) << " s, positive clips "
        << labels.col(static_cast<Eigen::Index>(c)).sum() << '\n';
  }
  return kExitOk;
}

int cmd_train(const CommandOptions& opts, std::ostream& out) {
  if (!opts.data) throw ConfigError("train: --data DIR is required");
  const ExperimentConfig config = resolve_config(opts);
  const Dataset train_set = load_split(*opts.data, "train");
  const DatasetPaths eval_paths = DatasetPaths::in(*opts.data, opts.split);
  const Dataset eval_set = eval_paths.exist() ? load_dataset(eval_paths) : train_set;

  const fs::path dir = config.out_dir;
  fs::create_directories(dir);
  write_text_file(dir / "train.cfg", format_experiment_config(config));
  const RunResult result =
      run_training(train_set, eval_set, config.train, config.eval, config.checkpoint_every, dir);

  out << "pooling " << pooling_name(config.train.pooling) << ", seed " << config.train.seed << ", "
      << config.train.epochs << " epochs, final loss " << fixed(result.final_loss, 6) << '\n';
  if (config.train.pooling == PoolingKind::Power) {
    out << "  n_c:";
    for (Eigen::Index c = 0; c < result.exponents.size(); ++c) out << ' ' << fixed(result.exponents[c], 3);
    out << "\n  spearman(n_c, mean duration) = " << fixed(result.exponent_duration_correlation) << '\n';
  }
  out << "evaluated on " << (eval_paths.exist() ? opts.split : std::string("train")) << " split ("
      << eval_set.bags.size() << " clips):\n";
  print_metrics(out, result.metrics);
  out << "artifacts in " << dir.string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const CommandOptions& opts, std::ostream& out) {
  if (!opts.data) throw ConfigError("evaluate: --data DIR is required");
  if (static_cast<bool>(opts.checkpoint) == static_cast<bool>(opts.predictions)) {
    throw ConfigError("evaluate: give exactly one of --checkpoint or --predictions");
  }
  const ExperimentConfig config = resolve_config(opts);
  const Dataset dataset = load_split(*opts.data, opts.split);

  MetricsReport report;
  if (opts.checkpoint) {
    report = evaluate_checkpoint(load_checkpoint(*opts.checkpoint), dataset, config.eval);
  } else {
    std::istringstream in(read_text_file(*opts.predictions));
    const FramePredictionDump dump = read_frame_predictions(in);
    std::map<std::size_t, std::size_t> by_clip;
    for (std::size_t k = 0; k < dump.clip_ids.size(); ++k) by_clip[dump.clip_ids[k]] = k;
    std::vector<FrameProbs> frames;
    Eigen::MatrixXd clip_probs(static_cast<Eigen::Index>(dataset.bags.size()),
                               static_cast<Eigen::Index>(dataset.num_classes));
    for (std::size_t i = 0; i < dataset.bags.size(); ++i) {
      const auto it = by_clip.find(dataset.bags[i].clip_id);
      if (it == by_clip.end()) {
        throw StructuralError("predictions lack clip " + std::to_string(dataset.bags[i].clip_id));
      }
      const FrameProbs& p = dump.probs[it->second];
      if (static_cast<std::size_t>(p.cols()) != dataset.num_classes) {
        throw StructuralError("predictions have " + std::to_string(p.cols()) + " classes but the dataset has " +
                              std::to_string(dataset.num_classes));
      }
      // Without a pooling model the clip score is the frame maximum.
      clip_probs.row(static_cast<Eigen::Index>(i)) = p.colwise().maxCoeff();
      frames.push_back(p);
    }
    const auto windows = class_window_sizes(class_mean_durations(dataset.bags, dataset.num_classes),
                                            dataset.frame_hop_s, config.eval.median_beta);
    report = evaluate_dataset(dataset, frames, clip_probs, windows, config.eval);
  }

  const fs::path dir = config.out_dir;
  write_file(dir / "metrics.csv", write_metrics, report);
  out << "evaluated " << dataset.bags.size() << " clips of split '" << opts.split << "':\n";
  print_metrics(out, report);
  out << "report in " << (dir / "metrics.csv").string() << '\n';
  return kExitOk;
}

int cmd_plotdata(const CommandOptions& opts, std::ostream& out) {
  if (!opts.run || !opts.data || !opts.clip || !opts.cls) {
    throw ConfigError("plotdata: --run, --data, --clip and --class are required");
  }
  const fs::path run = *opts.run;
  const Checkpoint ck = load_checkpoint(run / "checkpoint.ckpt");
  const std::size_t cls = *opts.cls;
  if (cls >= ck.weights.num_classes()) {
    throw ConfigError("plotdata: unknown class " + std::to_string(cls));
  }

  std::istringstream frames_in(read_text_file(run / "frame_predictions.csv"));
  const FramePredictionDump dump = read_frame_predictions(frames_in);
  const auto pos = std::find(dump.clip_ids.begin(), dump.clip_ids.end(), *opts.clip);
  if (pos == dump.clip_ids.end()) throw ConfigError("plotdata: unknown clip " + std::to_string(*opts.clip));
  const FrameProbs& probs = dump.probs[static_cast<std::size_t>(pos - dump.clip_ids.begin())];

  std::istringstream clips_in(read_text_file(run / "clip_predictions.csv"));
  const auto clip_rows = read_clip_predictions(clips_in);
  const auto row = std::find_if(clip_rows.begin(), clip_rows.end(), [&](const ClipPredictionRow& r) {
    return r.clip_id == *opts.clip && r.class_id == cls;
  });
  if (row == clip_rows.end()) throw ConfigError("plotdata: no clip prediction for the requested clip/class");

  const Dataset dataset = load_split(*opts.data, opts.split);
  const auto bag = std::find_if(dataset.bags.begin(), dataset.bags.end(),
                                [&](const Bag& b) { return b.clip_id == *opts.clip; });
  if (bag == dataset.bags.end()) throw ConfigError("plotdata: clip not in split '" + opts.split + "'");

  const fs::path dir = opts.out ? *opts.out : run / "plots";
  const std::string stem = "clip" + std::to_string(*opts.clip) + "_class" + std::to_string(cls);

  // Per-frame series against both thresholds.
  std::vector<double> time, yf, yc, d_power, d_linear, reference;
  FileHeader h;
  h.type = "frame_series";
  h.fields = {{"clip_id", std::to_string(*opts.clip)},
              {"class_id", std::to_string(cls)},
              {"pooling", std::string(pooling_name(ck.pooling.kind))},
              {"n", format_real(row->exponent)}};
  h.columns = {"time_s", "y_f", "y_c", "d_power", "d_linear", "reference"};
  std::string series = format_header(h) + "\n";
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const double t = round_ms(static_cast<double>(i) * dump.frame_hop_s);
    const double mid = t + 0.5 * dump.frame_hop_s;
    const bool active = std::any_of(bag->reference_events.begin(), bag->reference_events.end(),
                                    [&](const Event& e) { return e.class_id == cls && e.onset_s <= mid && mid < e.offset_s; });
    time.push_back(t);
    yf.push_back(probs(i, static_cast<Eigen::Index>(cls)));
    yc.push_back(row->clip_prob);
    d_power.push_back(row->d_power);
    d_linear.push_back(row->d_linear);
    reference.push_back(active ? 1.0 : 0.0);
    series += format_real(t) + "," + format_real(yf.back()) + "," + format_real(row->clip_prob) + "," +
              format_real(row->d_power) + "," + format_real(row->d_linear) + "," + (active ? "1" : "0") + "\n";
  }
  write_text_file(dir / ("series_" + stem + ".csv"), series);

  // Exponent against mean duration, sorted by duration.
  std::vector<std::size_t> order(ck.weights.num_classes());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ck.class_mean_durations_s[a] < ck.class_mean_durations_s[b];
  });
  FileHeader eh;
  eh.type = "exponent_vs_duration";
  eh.fields = {{"pooling", std::string(pooling_name(ck.pooling.kind))}};
  eh.columns = {"class_id", "mean_duration_s", "n"};
  std::string table = format_header(eh) + "\n";
  std::vector<double> durations, exponents;
  for (std::size_t c : order) {
    durations.push_back(ck.class_mean_durations_s[c]);
    exponents.push_back(effective_exponent(ck.pooling, c));
    table += std::to_string(c) + "," + format_real(durations.back()) + "," + format_real(exponents.back()) + "\n";
  }
  write_text_file(dir / "exponent_vs_duration.csv", table);

  if (opts.svg) {
    write_text_file(dir / ("series_" + stem + ".svg"),
                    render_svg_plot("Frame predictions, clip " + std::to_string(*opts.clip) + ", class " +
                                        std::to_string(cls),
                                    "time (s)", "probability", time,
                                    {{"y_f", "#1f77b4", yf},
                                     {"reference", "#999999", reference, true},
                                     {"d_power", "#d62728", d_power, true},
                                     {"d_linear", "#2ca02c", d_linear, true}},
                                    0.0, 1.0));
    const double top = std::max(1.0, exponents.empty() ? 1.0 : *std::max_element(exponents.begin(), exponents.end()));
    write_text_file(dir / "exponent_vs_duration.svg",
                    render_svg_plot("Exponent per class", "mean duration (s)", "n", durations,
                                    {{"n_c", "#d62728", exponents, false, true}}, 0.0, std::ceil(top)));
  }
  out << "wrote plot data for clip " << *opts.clip << ", class " << cls << " to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out) {
  const ExperimentConfig config = resolve_config(opts);
  std::optional<std::pair<Dataset, Dataset>> data;
  if (opts.data) {
    Dataset train = load_split(*opts.data, "train");
    const DatasetPaths test_paths = DatasetPaths::in(*opts.data, "test");
    Dataset test = test_paths.exist() ? load_dataset(test_paths) : Dataset{};
    data.emplace(std::move(train), std::move(test));
  }
  fs::create_directories(config.out_dir);
  write_text_file(config.out_dir / "sweep.cfg", format_experiment_config(config));
  const auto results = run_sweep(config, config.train.seed, data, config.out_dir);

  out << "pooling      seed  event_F1  event_R  segment_F1  clip_F1  spearman(n,dur)\n";
  for (const RunResult& r : results) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s %4llu  %8.3f  %7.3f  %10.3f  %7.3f  %8.3f\n",
                  std::string(pooling_name(r.pooling)).c_str(), static_cast<unsigned long long>(r.seed),
                  r.metrics.event.macro().f1, r.metrics.event.macro().recall, r.metrics.segment.macro().f1,
                  r.metrics.clip.macro().f1, r.exponent_duration_correlation);
    out << buf;
  }
  out << "summary in " << (config.out_dir / "summary.csv").string() << '\n';
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"powerpool: MIL pooling experiments for weakly labelled event detection"};
  app.require_subcommand(1);
  CommandOptions opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "key=value experiment config file");
    sub->add_option("--out", opts.out, "output directory");
  };
  auto* generate = app.add_subcommand("generate", "generate a synthetic weakly labelled dataset");
  add_common(generate);
  generate->add_option("--seed", opts.seed, "synthetic data seed");

  auto* train = app.add_subcommand("train", "train one model and write run artifacts");
  add_common(train);
  train->add_option("--data", opts.data, "dataset directory from 'generate'");
  train->add_option("--seed", opts.seed, "training seed");
  train->add_option("--pooling", opts.pooling, "max, average, exponential, linear or power");
  train->add_option("--split", opts.split, "split to evaluate on after training");

  auto* evaluate = app.add_subcommand("evaluate", "three-level F1 report for a checkpoint or prediction dump");
  add_common(evaluate);
  evaluate->add_option("--data", opts.data, "dataset directory");
  evaluate->add_option("--checkpoint", opts.checkpoint, "checkpoint file");
  evaluate->add_option("--predictions", opts.predictions, "frame prediction dump instead of a checkpoint");
  evaluate->add_option("--split", opts.split, "dataset split (train or test)");

  auto* plotdata = app.add_subcommand("plotdata", "frame series and exponent tables for plotting");
  plotdata->add_option("--run", opts.run, "run directory from 'train'");
  plotdata->add_option("--data", opts.data, "dataset directory");
  plotdata->add_option("--clip", opts.clip, "clip id");
  plotdata->add_option("--class", opts.cls, "class id");
  plotdata->add_option("--split", opts.split, "dataset split the run was evaluated on");
  plotdata->add_option("--out", opts.out, "output directory (default RUN/plots)");
  plotdata->add_flag("--svg", opts.svg, "also render SVG figures");

  auto* sweep = app.add_subcommand("sweep", "pooling kinds x seeds, trained in parallel");
  add_common(sweep);
  sweep->add_option("--data", opts.data, "dataset directory (default: generate per seed)");
  sweep->add_option("--seed", opts.seed, "first seed");
  sweep->add_option("--seeds", opts.seeds, "number of seeds");
  sweep->add_option("--jobs", opts.jobs, "parallel worker slots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(opts, out);
    if (*train) return cmd_train(opts, out);
    if (*evaluate) return cmd_evaluate(opts, out);
    if (*plotdata) return cmd_plotdata(opts, out);
    if (*sweep) return cmd_sweep(opts, out);
  } catch (const NumericalError& e) {
    err << "error: numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace powerpool::cli
