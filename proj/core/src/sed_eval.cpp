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

#include "powerpool/sed_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "powerpool/errors.hpp"

namespace powerpool {

namespace {

// Time comparisons tolerate representation error of millisecond values.
constexpr double kTimeTol = 1e-9;

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

EventList of_class(const EventList& events, std::size_t cls) {
  EventList out;
  for (const Event& e : events) {
    if (e.class_id == cls) out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Event& a, const Event& b) { return a.onset_s < b.onset_s; });
  return out;
}

void check_classes(const EventList& events, std::size_t num_classes, const char* what) {
  for (const Event& e : events) {
    if (e.class_id >= num_classes) {
      throw StructuralError(std::string(what) + " event has class " + std::to_string(e.class_id) +
                            " but only " + std::to_string(num_classes) + " classes exist");
    }
  }
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);

bool augment(std::size_t r, const std::vector<std::vector<std::size_t>>& candidates,
             std::vector<std::size_t>& owner, std::vector<bool>& visited) {
  for (std::size_t h : candidates[r]) {
    if (visited[h]) continue;
    visited[h] = true;
    if (owner[h] == kUnmatched || augment(owner[h], candidates, owner, visited)) {
      owner[h] = r;
      return true;
    }
  }
  return false;
}

}  // namespace

void EvalConfig::validate() const {
  if (!(onset_collar_s > 0.0) || !(offset_collar_s > 0.0)) {
    throw ConfigError("eval: collars must be positive");
  }
  if (!(offset_pct > 0.0 && offset_pct < 1.0)) throw ConfigError("eval: offset_pct must lie in (0, 1)");
  if (!(segment_len_s > 0.0)) throw ConfigError("eval: segment_len_s must be positive");
  if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0)) {
    throw ConfigError("eval: threshold must lie in (0, 1)");
  }
  if (!(median_beta >= 0.0)) throw ConfigError("eval: median_beta must be >= 0");
}

Scores score_counts(const Counts& c) {
  Scores s;
  s.precision = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  s.recall = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  s.f1 = safe_ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
  s.zero_support = (c.tp + c.fn) == 0;
  return s;
}

LevelReport LevelReport::zeros(std::size_t num_classes) {
  return LevelReport{std::vector<Counts>(num_classes)};
}

Scores LevelReport::class_scores(std::size_t cls) const { return score_counts(per_class.at(cls)); }

Scores LevelReport::macro() const {
  Scores m;
  if (per_class.empty()) return m;
  bool all_zero_support = true;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const Scores s = class_scores(c);
    m.precision += s.precision;
    m.recall += s.recall;
    m.f1 += s.f1;
    all_zero_support = all_zero_support && s.zero_support;
  }
  const auto n = static_cast<double>(per_class.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  m.zero_support = all_zero_support;
  return m;
}

LevelReport& LevelReport::operator+=(const LevelReport& other) {
  if (per_class.empty()) per_class.resize(other.per_class.size());
  if (per_class.size() != other.per_class.size()) {
    throw StructuralError("metrics: cannot add reports with different class counts");
  }
  for (std::size_t c = 0; c < per_class.size(); ++c) per_class[c] += other.per_class[c];
  return *this;
}

FrameProbs median_filter(const FrameProbs& probs, const std::vector<std::size_t>& class_windows) {
  if (class_windows.size() != static_cast<std::size_t>(probs.cols())) {
    throw StructuralError("median filter: one window per class required");
  }
  for (std::size_t w : class_windows) {
    if (w == 0 || w % 2 == 0) {
      throw ConfigError("median filter: window " + std::to_string(w) + " is not odd and >= 1");
    }
  }
  const Eigen::Index frames = probs.rows();
  FrameProbs out(probs.rows(), probs.cols());
  std::vector<double> buf;
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    const auto half = static_cast<Eigen::Index>(class_windows[static_cast<std::size_t>(c)] / 2);
    for (Eigen::Index i = 0; i < frames; ++i) {
      buf.clear();
      for (Eigen::Index j = i - half; j <= i + half; ++j) {
        buf.push_back(probs(std::clamp<Eigen::Index>(j, 0, frames - 1), c));
      }
      auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
      std::nth_element(buf.begin(), mid, buf.end());
      out(i, c) = *mid;
    }
  }
  return out;
}

std::vector<std::size_t> class_window_sizes(const std::vector<double>& class_mean_durations_s,
                                            double hop_s, double median_beta) {
  if (!(hop_s > 0.0)) throw ConfigError("window sizes: hop must be positive");
  std::vector<std::size_t> windows;
  windows.reserve(class_mean_durations_s.size());
  for (double duration : class_mean_durations_s) {
    const double x = median_beta * duration / hop_s;
    if (!(x > 1.0)) {
      windows.push_back(1);
      continue;
    }
    const auto half = static_cast<std::size_t>(std::llround((x - 1.0) / 2.0));
    windows.push_back(2 * half + 1);
  }
  return windows;
}

EventList decode_events(const FrameProbs& probs, const EvalConfig& config, double hop_s) {
  EventList events;
  const Eigen::Index frames = probs.rows();
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    Eigen::Index i = 0;
    while (i < frames) {
      if (!(probs(i, c) > config.binarize_threshold)) {
        ++i;
        continue;
      }
      Eigen::Index j = i;
      while (j + 1 < frames && probs(j + 1, c) > config.binarize_threshold) ++j;
      events.push_back({static_cast<std::size_t>(c), round_ms(static_cast<double>(i) * hop_s),
                        round_ms(static_cast<double>(j + 1) * hop_s)});
      i = j + 1;
    }
  }
  sort_events(events);
  return events;
}

LevelReport event_f1(const EventList& reference, const EventList& hypothesis,
                     std::size_t num_classes, const EvalConfig& config) {
  check_classes(reference, num_classes, "reference");
  check_classes(hypothesis, num_classes, "hypothesis");
  LevelReport report = LevelReport::zeros(num_classes);
  for (std::size_t cls = 0; cls < num_classes; ++cls) {
    const EventList ref = of_class(reference, cls);
    const EventList hyp = of_class(hypothesis, cls);
    for (std::size_t i = 1; i < ref.size(); ++i) {
      if (ref[i].onset_s < ref[i - 1].offset_s - kTimeTol) {
        throw StructuralError("event metrics: overlapping reference events of class " +
                              std::to_string(cls));
      }
    }
    // Maximum one-to-one matching by augmenting paths. References are taken
    // in onset order and candidates tried in onset order, so the result is
    // the greedy assignment whenever that one is already maximal.
    std::vector<std::vector<std::size_t>> candidates(ref.size());
    for (std::size_t r = 0; r < ref.size(); ++r) {
      const double offset_tol = std::max(config.offset_collar_s, config.offset_pct * ref[r].duration());
      for (std::size_t h = 0; h < hyp.size(); ++h) {
        if (std::abs(hyp[h].onset_s - ref[r].onset_s) <= config.onset_collar_s + kTimeTol &&
            std::abs(hyp[h].offset_s - ref[r].offset_s) <= offset_tol + kTimeTol) {
          candidates[r].push_back(h);
        }
      }
    }
    std::vector<std::size_t> owner(hyp.size(), kUnmatched);
    std::size_t tp = 0;
    for (std::size_t r = 0; r < ref.size(); ++r) {
      std::vector<bool> visited(hyp.size(), false);
      if (augment(r, candidates, owner, visited)) ++tp;
    }
    report.per_class[cls] = {tp, hyp.size() - tp, ref.size() - tp};
  }
  return report;
}

LevelReport segment_f1(const EventList& reference, const EventList& hypothesis,
                       double clip_len_s, std::size_t num_classes, const EvalConfig& config) {
  check_classes(reference, num_classes, "reference");
  check_classes(hypothesis, num_classes, "hypothesis");
  const double seg = config.segment_len_s;
  const auto segments = static_cast<std::size_t>(std::max(0.0, std::ceil(clip_len_s / seg - kTimeTol)));

  auto activity = [&](const EventList& events) {
    std::vector<std::vector<bool>> active(num_classes, std::vector<bool>(segments, false));
    for (const Event& e : events) {
      if (!(e.offset_s > e.onset_s)) continue;
      const double first = std::floor(std::max(0.0, e.onset_s) / seg + kTimeTol);
      const double last = std::ceil(e.offset_s / seg - kTimeTol);
      for (auto k = static_cast<std::size_t>(first);
           k < std::min(segments, static_cast<std::size_t>(std::max(0.0, last))); ++k) {
        active[e.class_id][k] = true;
      }
    }
    return active;
  };
  const auto ref = activity(reference);
  const auto hyp = activity(hypothesis);

  LevelReport report = LevelReport::zeros(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t k = 0; k < segments; ++k) {
      Counts& counts = report.per_class[c];
      if (ref[c][k] && hyp[c][k]) {
        ++counts.tp;
      } else if (hyp[c][k]) {
        ++counts.fp;
      } else if (ref[c][k]) {
        ++counts.fn;
      }
    }
  }
  return report;
}

LevelReport clip_f1(const Eigen::MatrixXi& weak_labels, const Eigen::MatrixXd& clip_probs,
                    const EvalConfig& config) {
  if (weak_labels.rows() != clip_probs.rows() || weak_labels.cols() != clip_probs.cols()) {
    throw StructuralError("clip metrics: label and probability matrices differ in shape");
  }
  LevelReport report = LevelReport::zeros(static_cast<std::size_t>(clip_probs.cols()));
  for (Eigen::Index c = 0; c < clip_probs.cols(); ++c) {
    Counts& counts = report.per_class[static_cast<std::size_t>(c)];
    for (Eigen::Index i = 0; i < clip_probs.rows(); ++i) {
      const bool predicted = clip_probs(i, c) > config.binarize_threshold;
      const bool actual = weak_labels(i, c) != 0;
      if (predicted && actual) {
        ++counts.tp;
      } else if (predicted) {
        ++counts.fp;
      } else if (actual) {
        ++counts.fn;
      }
    }
  }
  return report;
}

Eigen::MatrixXi weak_label_matrix(const std::vector<Bag>& bags, std::size_t num_classes) {
  Eigen::MatrixXi labels = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(bags.size()),
                                                 static_cast<Eigen::Index>(num_classes));
  for (std::size_t i = 0; i < bags.size(); ++i) {
    if (bags[i].weak_labels.size() != num_classes) {
      throw StructuralError("weak labels: clip " + std::to_string(bags[i].clip_id) +
                            " has the wrong number of classes");
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      labels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = bags[i].weak_labels[c];
    }
  }
  return labels;
}

MetricsReport evaluate_dataset(const Dataset& dataset, const std::vector<FrameProbs>& frame_probs,
                               const Eigen::MatrixXd& clip_probs,
                               const std::vector<std::size_t>& class_windows,
                               const EvalConfig& config) {
  config.validate();
  const std::size_t classes = dataset.num_classes;
  if (frame_probs.size() != dataset.bags.size() ||
      static_cast<std::size_t>(clip_probs.rows()) != dataset.bags.size()) {
    throw StructuralError("evaluation: one prediction per clip required");
  }
  MetricsReport report;
  report.clip = clip_f1(weak_label_matrix(dataset.bags, classes), clip_probs, config);
  report.segment = LevelReport::zeros(classes);
  report.event = LevelReport::zeros(classes);
  for (std::size_t i = 0; i < dataset.bags.size(); ++i) {
    if (static_cast<std::size_t>(frame_probs[i].cols()) != classes) {
      throw StructuralError("evaluation: prediction class count differs from the dataset");
    }
    const FrameProbs smoothed = median_filter(frame_probs[i], class_windows);
    const EventList hyp = decode_events(smoothed, config, dataset.frame_hop_s);
    const EventList& ref = dataset.bags[i].reference_events;
    report.event += event_f1(ref, hyp, classes, config);
    report.segment += segment_f1(ref, hyp, dataset.clip_len_s, classes, config);
  }
  return report;
}

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw StructuralError("spearman: inputs differ in length");
  if (x.size() < 2) return 0.0;
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace powerpool
