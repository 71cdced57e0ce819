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

// Plain-text file formats. Every file starts with one header line
//
//   # schema=1 type=<kind> key=value ... columns=a,b,c
//
// followed by comma-separated rows, UTF-8, LF line endings. Reals are
// written in shortest round-trip form unless noted otherwise.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "powerpool/pooling.hpp"
#include "powerpool/scorer.hpp"
#include "powerpool/sed_eval.hpp"
#include "powerpool/synth.hpp"

namespace powerpool {

inline constexpr int kSchemaVersion = 1;

/// Thrown for unreadable, unwritable or malformed files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);
double parse_real(std::string_view text);

struct FileHeader {
  std::string type;
  std::map<std::string, std::string> fields;  // excludes schema and type
  std::vector<std::string> columns;

  const std::string& at(const std::string& key) const;
};

std::string format_header(const FileHeader& header);
/// Parses a header line and checks schema=1 and the expected type.
FileHeader parse_header(std::string_view line, std::string_view expected_type);

std::vector<std::string> split(std::string_view text, char sep);

// Dataset files: <prefix>.features.csv, <prefix>.weak.csv, <prefix>.events.csv

struct DatasetPaths {
  std::filesystem::path features;
  std::filesystem::path weak_labels;
  std::filesystem::path events;

  static DatasetPaths in(const std::filesystem::path& dir, const std::string& prefix);
  bool exist() const;
};

/// features rows: clip_id,frame_index,x0..x{d-1}
void write_features(std::ostream& out, const Dataset& dataset);
/// weak rows: clip_id,c0..c{C-1}
void write_weak_labels(std::ostream& out, const Dataset& dataset);
/// events rows: clip_id,class_id,onset_s,offset_s (three decimals)
void write_events(std::ostream& out, const Dataset& dataset);

void save_dataset(const Dataset& dataset, const DatasetPaths& paths);
Dataset load_dataset(const DatasetPaths& paths);

/// Trained model plus the bookkeeping needed to evaluate it.
struct Checkpoint {
  PoolingSpec pooling;
  ScorerWeights weights;
  std::size_t epoch = 0;
  double frame_hop_s = 0.1;
  /// Mean reference duration per class in the training set (median windows).
  std::vector<double> class_mean_durations_s;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// rows: level,class,tp,fp,fn,precision,recall,f1,zero_support; one row per
/// class then a macro row (summed counts, macro scores) per level.
void write_metrics(std::ostream& out, const MetricsReport& report);
MetricsReport read_metrics(std::istream& in);

/// rows: epoch,class_id,n (one per epoch and class)
void write_exponents(std::ostream& out, const std::vector<Eigen::VectorXd>& history);
std::vector<Eigen::VectorXd> read_exponents(std::istream& in);

/// Frame predictions, rows: clip_id,frame_index,y0..y{C-1}
struct FramePredictionDump {
  double frame_hop_s = 0.1;
  std::vector<std::size_t> clip_ids;
  std::vector<FrameProbs> probs;
};
void write_frame_predictions(std::ostream& out, const FramePredictionDump& dump);
FramePredictionDump read_frame_predictions(std::istream& in);

/// Clip predictions with gradient-sign thresholds, rows:
/// clip_id,class_id,y_c,n,d_power,d_linear. n is the effective exponent
/// (1 for linear, 0 for average, the learned value for power, nan otherwise).
struct ClipPredictionRow {
  std::size_t clip_id = 0;
  std::size_t class_id = 0;
  double clip_prob = 0.0;
  double exponent = 0.0;
  double d_power = 0.0;
  double d_linear = 0.0;
};
void write_clip_predictions(std::ostream& out, const std::vector<ClipPredictionRow>& rows);
std::vector<ClipPredictionRow> read_clip_predictions(std::istream& in);

/// Flat key=value config text; '#' starts a comment. Duplicate keys and
/// lines without '=' throw ConfigError naming the line.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Truncates `path` and writes `text`. Throws FormatError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace powerpool
