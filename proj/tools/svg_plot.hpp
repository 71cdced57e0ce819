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

#include <string>
#include <vector>

namespace powerpool::cli {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> y;
  bool dashed = false;
  bool markers = false;  // scatter points instead of a line
};

/// Standalone SVG with shared x values, fixed y range, and a legend.
std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<double>& x,
                            const std::vector<PlotSeries>& series, double y_min, double y_max);

}  // namespace powerpool::cli
