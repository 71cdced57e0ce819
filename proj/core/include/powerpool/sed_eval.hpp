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
#include <vector>

#include <Eigen/Core>

#include "powerpool/events.hpp"
#include "powerpool/pooling.hpp"
#include "powerpool/synth.hpp"

namespace powerpool {

struct EvalConfig {
  double onset_collar_s = 0.2;
  double offset_collar_s = 0.2;
  /// Offset tolerance is max(offset_collar_s, offset_pct * reference length).
  double offset_pct = 0.2;
  double segment_len_s = 1.0;
  double binarize_threshold = 0.5;
  double median_beta = 1.0 / 3.0;

  void validate() const;
};

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// No reference positives (tp + fn == 0).
  bool zero_support = false;
};

/// P, R, F1 with every 0/0 taken as 0.
Scores score_counts(const Counts& counts);

/// Counts per class for one evaluation level.
struct LevelReport {
  std::vector<Counts> per_class;

  static LevelReport zeros(std::size_t num_classes);
  std::size_t num_classes() const { return per_class.size(); }
  Scores class_scores(std::size_t cls) const;
  /// Unweighted mean of the per-class P, R and F1.
  Scores macro() const;
  LevelReport& operator+=(const LevelReport& other);
};

struct MetricsReport {
  LevelReport clip;
  LevelReport segment;
  LevelReport event;
};

/// Per-class sliding median with edge replication. Windows must be odd.
FrameProbs median_filter(const FrameProbs& probs, const std::vector<std::size_t>& class_windows);

/// Nearest odd integer to beta * duration / hop, at least 1. Classes with a
/// non-positive duration get window 1.
std::vector<std::size_t> class_window_sizes(const std::vector<double>& class_mean_durations_s,
                                            double hop_s, double median_beta);

/// Runs of frames strictly above the threshold become events with
/// onset = first * hop and offset = (last + 1) * hop.
EventList decode_events(const FrameProbs& probs, const EvalConfig& config, double hop_s);

/// Event-based counts for one clip. A hypothesis can match a reference of the
/// same class when the onsets differ by at most onset_collar_s and the offsets
/// by at most max(offset_collar_s, offset_pct * reference length). TP is the
/// size of a maximum one-to-one matching; ties resolve in onset order.
///
/// Throws StructuralError when two reference events of one class overlap.
LevelReport event_f1(const EventList& reference, const EventList& hypothesis,
                     std::size_t num_classes, const EvalConfig& config);

/// Segment-based counts for one clip over segments of segment_len_s.
LevelReport segment_f1(const EventList& reference, const EventList& hypothesis,
                       double clip_len_s, std::size_t num_classes, const EvalConfig& config);

/// Clip-level counts. Rows are clips, columns classes; a clip is predicted
/// positive when its probability exceeds binarize_threshold.
LevelReport clip_f1(const Eigen::MatrixXi& weak_labels, const Eigen::MatrixXd& clip_probs,
                    const EvalConfig& config);

/// Full three-level evaluation: median filtering, decoding, then counting.
/// `clip_probs` has one row per bag.
MetricsReport evaluate_dataset(const Dataset& dataset, const std::vector<FrameProbs>& frame_probs,
                               const Eigen::MatrixXd& clip_probs,
                               const std::vector<std::size_t>& class_windows,
                               const EvalConfig& config);

Eigen::MatrixXi weak_label_matrix(const std::vector<Bag>& bags, std::size_t num_classes);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either input is constant.
double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace powerpool
