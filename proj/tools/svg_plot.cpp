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

#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace powerpool::cli {

namespace {

constexpr double kWidth = 640, kHeight = 360;
constexpr double kLeft = 60, kRight = 150, kTop = 30, kBottom = 45;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<double>& x,
                            const std::vector<PlotSeries>& series, double y_min, double y_max) {
  double x_min = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
  double x_max = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double v) { return kLeft + (v - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double v) { return kTop + (1.0 - (v - y_min) / (y_max - y_min)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"18\" font-size=\"13\">" << escape(title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = y_min + (y_max - y_min) * t / 4.0;
    const double xv = x_min + (x_max - x_min) * t / 4.0;
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
    svg << "<text x=\"" << num(sx(xv)) << "\" y=\"" << kTop + ph + 15 << "\" text-anchor=\"middle\">"
        << num(xv) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << kHeight - 8 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  svg << "<text x=\"14\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << num(kTop + ph / 2) << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const PlotSeries& ps = series[s];
    const std::size_t n = std::min(x.size(), ps.y.size());
    if (ps.markers) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ps.y[i])) continue;
        svg << "<circle cx=\"" << num(sx(x[i])) << "\" cy=\"" << num(sy(ps.y[i])) << "\" r=\"4\" fill=\""
            << ps.color << "\"/>\n";
      }
    } else {
      svg << "<polyline fill=\"none\" stroke=\"" << ps.color << "\" stroke-width=\"1.5\"";
      if (ps.dashed) svg << " stroke-dasharray=\"5,3\"";
      svg << " points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ps.y[i])) continue;
        svg << num(sx(x[i])) << ',' << num(sy(ps.y[i])) << ' ';
      }
      svg << "\"/>\n";
    }
    const double ly = kTop + 12 + 16 * static_cast<double>(s);
    svg << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 30 << "\" y2=\""
        << ly << "\" stroke=\"" << ps.color << "\" stroke-width=\"2\"" << (ps.dashed ? " stroke-dasharray=\"5,3\"" : "")
        << "/>\n";
    svg << "<text x=\"" << kLeft + pw + 35 << "\" y=\"" << ly + 4 << "\">" << escape(ps.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace powerpool::cli
