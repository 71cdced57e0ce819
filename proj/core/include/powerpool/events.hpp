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

#include <cmath>
#include <cstddef>
#include <vector>

namespace powerpool {

/// One labelled interval [onset_s, offset_s) of class `class_id`.
struct Event {
  std::size_t class_id = 0;
  double onset_s = 0.0;
  double offset_s = 0.0;

  double duration() const { return offset_s - onset_s; }
  friend bool operator==(const Event&, const Event&) = default;
};

using EventList = std::vector<Event>;

/// Sorts by onset, then class, then offset.
void sort_events(EventList& events);

/// Round to the millisecond grid used by the event file format.
inline double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

}  // namespace powerpool
