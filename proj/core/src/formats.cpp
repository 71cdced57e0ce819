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

#include "powerpool/formats.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "powerpool/errors.hpp"

namespace powerpool {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_count(std::string_view text) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError("expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::string fixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

std::string join_reals(const double* begin, Eigen::Index n) {
  std::string out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i) out += ',';
    out += format_real(begin[i]);
  }
  return out;
}

std::vector<double> parse_reals(std::string_view line) {
  std::vector<double> values;
  for (const auto& field : split(line, ',')) values.push_back(parse_real(field));
  return values;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  return in;
}

// Reads the header line of a stream.
FileHeader read_header(std::istream& in, std::string_view type) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header line in " + std::string(type) + " file");
  return parse_header(line, type);
}

bool next_row(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

std::string columns_with_prefix(const std::string& lead, char prefix, std::size_t n) {
  std::string out = lead;
  for (std::size_t i = 0; i < n; ++i) out += "," + std::string(1, prefix) + std::to_string(i);
  return out;
}

void write_matrix_block(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
  out << "matrix," << name << ',' << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Eigen::RowVectorXd row = m.row(r);
    out << join_reals(row.data(), row.size()) << '\n';
  }
}

void write_vector_block(std::ostream& out, const std::string& name, const Eigen::VectorXd& v) {
  out << "vector," << name << ',' << v.size() << '\n';
  out << join_reals(v.data(), v.size()) << '\n';
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw FormatError("cannot format real");
  return std::string(buf, ptr);
}

double parse_real(std::string_view text) {
  const std::string t = trim(text);
  if (t == "nan" || t == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw FormatError("expected a real number, got '" + t + "'");
  }
  return value;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

const std::string& FileHeader::at(const std::string& key) const {
  const auto it = fields.find(key);
  if (it == fields.end()) throw FormatError(type + " header lacks field '" + key + "'");
  return it->second;
}

std::string format_header(const FileHeader& header) {
  std::string out = "# schema=" + std::to_string(kSchemaVersion) + " type=" + header.type;
  for (const auto& [key, value] : header.fields) out += " " + key + "=" + value;
  out += " columns=";
  for (std::size_t i = 0; i < header.columns.size(); ++i) {
    if (i) out += ',';
    out += header.columns[i];
  }
  return out;
}

FileHeader parse_header(std::string_view line, std::string_view expected_type) {
  const std::string text = trim(line);
  if (text.rfind("# ", 0) != 0) {
    throw FormatError("expected a '# schema=...' header line, got '" + text + "'");
  }
  FileHeader header;
  bool schema_ok = false;
  for (const auto& token : split(std::string_view(text).substr(2), ' ')) {
    if (token.empty()) continue;
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw FormatError("malformed header token '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "schema") {
      schema_ok = value == std::to_string(kSchemaVersion);
    } else if (key == "type") {
      header.type = value;
    } else if (key == "columns") {
      header.columns = split(value, ',');
    } else {
      header.fields[key] = value;
    }
  }
  if (!schema_ok) throw FormatError("unsupported or missing schema version in header");
  if (header.type != expected_type) {
    throw FormatError("expected a " + std::string(expected_type) + " file, got type '" + header.type + "'");
  }
  return header;
}

DatasetPaths DatasetPaths::in(const std::filesystem::path& dir, const std::string& prefix) {
  return {dir / (prefix + ".features.csv"), dir / (prefix + ".weak.csv"), dir / (prefix + ".events.csv")};
}

bool DatasetPaths::exist() const {
  return std::filesystem::exists(features) && std::filesystem::exists(weak_labels) &&
         std::filesystem::exists(events);
}

void write_features(std::ostream& out, const Dataset& ds) {
  const std::size_t dim = ds.input_dim();
  FileHeader h;
  h.type = "features";
  h.fields = {{"input_dim", std::to_string(dim)},
              {"frame_hop_s", format_real(ds.frame_hop_s)},
              {"clip_len_s", format_real(ds.clip_len_s)},
              {"num_clips", std::to_string(ds.bags.size())}};
  h.columns = split(columns_with_prefix("clip_id,frame_index", 'x', dim), ',');
  out << format_header(h) << '\n';
  for (const Bag& bag : ds.bags) {
    for (Eigen::Index i = 0; i < bag.features.rows(); ++i) {
      const Eigen::RowVectorXd row = bag.features.row(i);
      out << bag.clip_id << ',' << i << ',' << join_reals(row.data(), row.size()) << '\n';
    }
  }
}

void write_weak_labels(std::ostream& out, const Dataset& ds) {
  FileHeader h;
  h.type = "weak_labels";
  h.fields = {{"num_classes", std::to_string(ds.num_classes)}};
  h.columns = split(columns_with_prefix("clip_id", 'c', ds.num_classes), ',');
  out << format_header(h) << '\n';
  for (const Bag& bag : ds.bags) {
    out << bag.clip_id;
    for (int label : bag.weak_labels) out << ',' << label;
    out << '\n';
  }
}

void write_events(std::ostream& out, const Dataset& ds) {
  FileHeader h;
  h.type = "events";
  h.fields = {{"num_classes", std::to_string(ds.num_classes)},
              {"clip_len_s", fixed3(ds.clip_len_s)}};
  h.columns = {"clip_id", "class_id", "onset_s", "offset_s"};
  out << format_header(h) << '\n';
  for (const Bag& bag : ds.bags) {
    for (const Event& e : bag.reference_events) {
      out << bag.clip_id << ',' << e.class_id << ',' << fixed3(e.onset_s) << ',' << fixed3(e.offset_s)
          << '\n';
    }
  }
}

void save_dataset(const Dataset& dataset, const DatasetPaths& paths) {
  {
    auto out = open_out(paths.features);
    write_features(out, dataset);
  }
  {
    auto out = open_out(paths.weak_labels);
    write_weak_labels(out, dataset);
  }
  auto out = open_out(paths.events);
  write_events(out, dataset);
  if (!out) throw FormatError("failed writing dataset files");
}

Dataset load_dataset(const DatasetPaths& paths) {
  Dataset ds;
  std::unordered_map<std::size_t, std::size_t> index;
  std::string line;

  {
    auto in = open_in(paths.features);
    const FileHeader h = read_header(in, "features");
    const std::size_t dim = parse_count(h.at("input_dim"));
    ds.frame_hop_s = parse_real(h.at("frame_hop_s"));
    ds.clip_len_s = parse_real(h.at("clip_len_s"));
    std::vector<std::vector<double>> rows;
    std::size_t current = 0;
    auto flush = [&]() {
      if (rows.empty()) return;
      Bag bag;
      bag.clip_id = current;
      bag.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t d = 0; d < dim; ++d) {
          bag.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = rows[r][d];
        }
      }
      index[current] = ds.bags.size();
      ds.bags.push_back(std::move(bag));
      rows.clear();
    };
    while (next_row(in, line)) {
      const auto fields = split(line, ',');
      if (fields.size() != dim + 2) {
        throw FormatError(paths.features.string() + ": row has " + std::to_string(fields.size()) +
                          " fields, expected " + std::to_string(dim + 2));
      }
      const std::size_t clip = parse_count(fields[0]);
      const std::size_t frame = parse_count(fields[1]);
      if (frame == 0) {
        flush();
        if (index.count(clip)) throw FormatError(paths.features.string() + ": clip rows not contiguous");
        current = clip;
      } else if (clip != current || frame != rows.size()) {
        throw FormatError(paths.features.string() + ": frame indices out of order");
      }
      std::vector<double> values(dim);
      for (std::size_t d = 0; d < dim; ++d) values[d] = parse_real(fields[d + 2]);
      rows.push_back(std::move(values));
    }
    flush();
  }

  {
    auto in = open_in(paths.weak_labels);
    const FileHeader h = read_header(in, "weak_labels");
    ds.num_classes = parse_count(h.at("num_classes"));
    while (next_row(in, line)) {
      const auto fields = split(line, ',');
      if (fields.size() != ds.num_classes + 1) throw FormatError(paths.weak_labels.string() + ": wrong field count");
      const auto it = index.find(parse_count(fields[0]));
      if (it == index.end()) throw FormatError(paths.weak_labels.string() + ": unknown clip " + fields[0]);
      auto& labels = ds.bags[it->second].weak_labels;
      labels.clear();
      for (std::size_t c = 0; c < ds.num_classes; ++c) {
        const std::size_t v = parse_count(fields[c + 1]);
        if (v > 1) throw FormatError(paths.weak_labels.string() + ": labels must be 0 or 1");
        labels.push_back(static_cast<int>(v));
      }
    }
  }

  {
    auto in = open_in(paths.events);
    const FileHeader h = read_header(in, "events");
    if (parse_count(h.at("num_classes")) != ds.num_classes) {
      throw FormatError(paths.events.string() + ": class count differs from the weak labels");
    }
    while (next_row(in, line)) {
      const auto fields = split(line, ',');
      if (fields.size() != 4) throw FormatError(paths.events.string() + ": expected 4 fields");
      const auto it = index.find(parse_count(fields[0]));
      if (it == index.end()) throw FormatError(paths.events.string() + ": unknown clip " + fields[0]);
      Event e{parse_count(fields[1]), parse_real(fields[2]), parse_real(fields[3])};
      if (e.class_id >= ds.num_classes || !(e.onset_s < e.offset_s)) {
        throw FormatError(paths.events.string() + ": invalid event row '" + line + "'");
      }
      ds.bags[it->second].reference_events.push_back(e);
    }
  }

  for (Bag& bag : ds.bags) {
    if (bag.weak_labels.size() != ds.num_classes) {
      throw FormatError("clip " + std::to_string(bag.clip_id) + " has no weak labels");
    }
    sort_events(bag.reference_events);
  }
  return ds;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  FileHeader h;
  h.type = "checkpoint";
  h.fields = {{"pooling", std::string(pooling_name(ck.pooling.kind))},
              {"epoch", std::to_string(ck.epoch)},
              {"frame_hop_s", format_real(ck.frame_hop_s)},
              {"input_dim", std::to_string(ck.weights.input_dim())},
              {"hidden_dim", std::to_string(ck.weights.hidden_dim())},
              {"num_classes", std::to_string(ck.weights.num_classes())}};
  h.columns = {"block", "name", "rows", "cols"};
  out << format_header(h) << '\n';
  write_matrix_block(out, "w1", ck.weights.w1);
  write_vector_block(out, "b1", ck.weights.b1);
  write_matrix_block(out, "w2", ck.weights.w2);
  write_vector_block(out, "b2", ck.weights.b2);
  if (ck.pooling.power) {
    write_vector_block(out, "power_raw", ck.pooling.power->raw);
    write_vector_block(out, "power_lambda", Eigen::VectorXd::Constant(1, ck.pooling.power->lambda));
  }
  write_vector_block(out, "class_mean_durations_s",
                     Eigen::Map<const Eigen::VectorXd>(ck.class_mean_durations_s.data(),
                                                       static_cast<Eigen::Index>(ck.class_mean_durations_s.size())));
}

Checkpoint read_checkpoint(std::istream& in) {
  const FileHeader h = read_header(in, "checkpoint");
  Checkpoint ck;
  ck.pooling.kind = parse_pooling_kind(h.at("pooling"));
  ck.epoch = parse_count(h.at("epoch"));
  ck.frame_hop_s = parse_real(h.at("frame_hop_s"));

  std::map<std::string, Eigen::MatrixXd> blocks;
  std::string line;
  while (next_row(in, line)) {
    const auto fields = split(line, ',');
    if (fields.size() < 3) throw FormatError("checkpoint: malformed block line '" + line + "'");
    const bool is_matrix = fields[0] == "matrix";
    if (!is_matrix && fields[0] != "vector") throw FormatError("checkpoint: unknown block '" + fields[0] + "'");
    const std::size_t rows = is_matrix ? parse_count(fields[2]) : 1;
    const std::size_t cols = parse_count(fields[is_matrix ? 3 : 2]);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      std::string row;
      if (cols == 0) {
        // Empty vectors are written as an empty line.
        std::getline(in, row);
        continue;
      }
      if (!next_row(in, row)) throw FormatError("checkpoint: truncated block " + fields[1]);
      const auto values = parse_reals(row);
      if (values.size() != cols) throw FormatError("checkpoint: wrong width in block " + fields[1]);
      for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[c];
    }
    blocks[fields[1]] = std::move(m);
  }
  auto block = [&](const std::string& name) -> const Eigen::MatrixXd& {
    const auto it = blocks.find(name);
    if (it == blocks.end()) throw FormatError("checkpoint: missing block " + name);
    return it->second;
  };
  ck.weights.w1 = block("w1");
  ck.weights.b1 = block("b1").transpose();
  ck.weights.w2 = block("w2");
  ck.weights.b2 = block("b2").transpose();
  if (ck.weights.b1.size() != ck.weights.w1.rows() || ck.weights.w2.cols() != ck.weights.w1.rows() ||
      ck.weights.b2.size() != ck.weights.w2.rows()) {
    throw FormatError("checkpoint: inconsistent weight shapes");
  }
  if (ck.pooling.kind == PoolingKind::Power) {
    PowerParams p;
    p.raw = block("power_raw").transpose();
    p.lambda = block("power_lambda")(0, 0);
    if (p.raw.size() != ck.weights.w2.rows()) throw FormatError("checkpoint: power parameter count mismatch");
    ck.pooling.power = std::move(p);
  }
  const Eigen::MatrixXd& durations = block("class_mean_durations_s");
  ck.class_mean_durations_s.assign(durations.data(), durations.data() + durations.size());
  return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_checkpoint(out, checkpoint);
  if (!out) throw FormatError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_checkpoint(in);
}

void write_metrics(std::ostream& out, const MetricsReport& report) {
  FileHeader h;
  h.type = "metrics";
  h.fields = {{"num_classes", std::to_string(report.event.num_classes())}};
  h.columns = {"level", "class", "tp", "fp", "fn", "precision", "recall", "f1", "zero_support"};
  out << format_header(h) << '\n';
  auto level = [&out](const char* name, const LevelReport& r) {
    auto row = [&](const std::string& cls, const Counts& c, const Scores& s) {
      out << name << ',' << cls << ',' << c.tp << ',' << c.fp << ',' << c.fn << ','
          << format_real(s.precision) << ',' << format_real(s.recall) << ',' << format_real(s.f1) << ','
          << (s.zero_support ? 1 : 0) << '\n';
    };
    Counts total;
    for (std::size_t c = 0; c < r.num_classes(); ++c) {
      row(std::to_string(c), r.per_class[c], r.class_scores(c));
      total += r.per_class[c];
    }
    row("macro", total, r.macro());
  };
  level("clip", report.clip);
  level("segment", report.segment);
  level("event", report.event);
}

MetricsReport read_metrics(std::istream& in) {
  const FileHeader h = read_header(in, "metrics");
  const std::size_t classes = parse_count(h.at("num_classes"));
  MetricsReport report{LevelReport::zeros(classes), LevelReport::zeros(classes), LevelReport::zeros(classes)};
  std::string line;
  while (next_row(in, line)) {
    const auto f = split(line, ',');
    if (f.size() != 9) throw FormatError("metrics: expected 9 fields in '" + line + "'");
    if (f[1] == "macro") continue;
    LevelReport* level = f[0] == "clip" ? &report.clip
                         : f[0] == "segment" ? &report.segment
                         : f[0] == "event" ? &report.event
                                           : nullptr;
    if (!level) throw FormatError("metrics: unknown level '" + f[0] + "'");
    const std::size_t cls = parse_count(f[1]);
    if (cls >= classes) throw FormatError("metrics: class index out of range");
    level->per_class[cls] = {parse_count(f[2]), parse_count(f[3]), parse_count(f[4])};
  }
  return report;
}

void write_exponents(std::ostream& out, const std::vector<Eigen::VectorXd>& history) {
  FileHeader h;
  h.type = "exponents";
  h.fields = {{"num_classes", std::to_string(history.empty() ? 0 : history.front().size())},
              {"epochs", std::to_string(history.size())}};
  h.columns = {"epoch", "class_id", "n"};
  out << format_header(h) << '\n';
  for (std::size_t e = 0; e < history.size(); ++e) {
    for (Eigen::Index c = 0; c < history[e].size(); ++c) {
      out << e + 1 << ',' << c << ',' << format_real(history[e][c]) << '\n';
    }
  }
}

std::vector<Eigen::VectorXd> read_exponents(std::istream& in) {
  const FileHeader h = read_header(in, "exponents");
  const std::size_t classes = parse_count(h.at("num_classes"));
  const std::size_t epochs = parse_count(h.at("epochs"));
  std::vector<Eigen::VectorXd> history(epochs, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes)));
  std::string line;
  while (next_row(in, line)) {
    const auto f = split(line, ',');
    if (f.size() != 3) throw FormatError("exponents: expected 3 fields");
    const std::size_t e = parse_count(f[0]);
    const std::size_t c = parse_count(f[1]);
    if (e < 1 || e > epochs || c >= classes) throw FormatError("exponents: index out of range");
    history[e - 1][static_cast<Eigen::Index>(c)] = parse_real(f[2]);
  }
  return history;
}

void write_frame_predictions(std::ostream& out, const FramePredictionDump& dump) {
  const std::size_t classes = dump.probs.empty() ? 0 : static_cast<std::size_t>(dump.probs.front().cols());
  FileHeader h;
  h.type = "frame_predictions";
  h.fields = {{"num_classes", std::to_string(classes)}, {"frame_hop_s", format_real(dump.frame_hop_s)}};
  h.columns = split(columns_with_prefix("clip_id,frame_index", 'y', classes), ',');
  out << format_header(h) << '\n';
  for (std::size_t k = 0; k < dump.probs.size(); ++k) {
    const FrameProbs& p = dump.probs[k];
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const Eigen::RowVectorXd row = p.row(i);
      out << dump.clip_ids[k] << ',' << i << ',' << join_reals(row.data(), row.size()) << '\n';
    }
  }
}

FramePredictionDump read_frame_predictions(std::istream& in) {
  const FileHeader h = read_header(in, "frame_predictions");
  const std::size_t classes = parse_count(h.at("num_classes"));
  FramePredictionDump dump;
  dump.frame_hop_s = parse_real(h.at("frame_hop_s"));
  std::vector<std::vector<double>> rows;
  auto flush = [&]() {
    if (rows.empty()) return;
    FrameProbs p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(classes));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < classes; ++c) p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    dump.probs.push_back(std::move(p));
    rows.clear();
  };
  std::string line;
  while (next_row(in, line)) {
    const auto f = split(line, ',');
    if (f.size() != classes + 2) throw FormatError("frame predictions: wrong field count");
    const std::size_t clip = parse_count(f[0]);
    const std::size_t frame = parse_count(f[1]);
    if (frame == 0) {
      flush();
      dump.clip_ids.push_back(clip);
    } else if (dump.clip_ids.empty() || dump.clip_ids.back() != clip || frame != rows.size()) {
      throw FormatError("frame predictions: rows out of order at clip " + f[0]);
    }
    std::vector<double> values(classes);
    for (std::size_t c = 0; c < classes; ++c) values[c] = parse_real(f[c + 2]);
    rows.push_back(std::move(values));
  }
  flush();
  return dump;
}

void write_clip_predictions(std::ostream& out, const std::vector<ClipPredictionRow>& rows) {
  FileHeader h;
  h.type = "clip_predictions";
  h.columns = {"clip_id", "class_id", "y_c", "n", "d_power", "d_linear"};
  out << format_header(h) << '\n';
  for (const auto& r : rows) {
    out << r.clip_id << ',' << r.class_id << ',' << format_real(r.clip_prob) << ',' << format_real(r.exponent)
        << ',' << format_real(r.d_power) << ',' << format_real(r.d_linear) << '\n';
  }
}

std::vector<ClipPredictionRow> read_clip_predictions(std::istream& in) {
  read_header(in, "clip_predictions");
  std::vector<ClipPredictionRow> rows;
  std::string line;
  while (next_row(in, line)) {
    const auto f = split(line, ',');
    if (f.size() != 6) throw FormatError("clip predictions: expected 6 fields");
    rows.push_back({parse_count(f[0]), parse_count(f[1]), parse_real(f[2]), parse_real(f[3]),
                    parse_real(f[4]), parse_real(f[5])});
  }
  return rows;
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value, got '" + body + "'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace powerpool
