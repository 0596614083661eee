// Copyright 2026 The Restless Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "restless/errors.hpp"

namespace restless::plot {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 56.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish(bool pad) {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo <= 0.0) {
      const double w = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= w;
      hi += w;
    } else if (pad) {
      const double w = 0.04 * (hi - lo);
      lo -= w;
      hi += w;
    }
  }
};

// Ticks at 1, 2 or 5 times a power of ten, about five per axis.
std::vector<double> linear_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {2.0, 5.0, 10.0}) {
    if (raw > step) step = m * mag;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

}  // namespace

Chart::Chart(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

std::string Chart::render() const {
  auto tx = [this](double v) { return log_x_ ? (v > 0 ? std::log10(v) : NAN) : v; };
  auto ty = [this](double v) { return log_y_ ? (v > 0 ? std::log10(v) : NAN) : v; };

  Range rx, ry;
  if (has_heatmap_) {
    rx.include(heatmap_.x_min), rx.include(heatmap_.x_max);
    ry.include(heatmap_.y_min), ry.include(heatmap_.y_max);
  }
  for (const auto& s : series_) {
    for (std::size_t n = 0; n < s.x.size() && n < s.y.size(); ++n) {
      if (!std::isfinite(s.y[n])) continue;
      rx.include(tx(s.x[n]));
      const double e = n < s.y_error.size() && std::isfinite(s.y_error[n]) ? s.y_error[n] : 0.0;
      ry.include(ty(s.y[n] - e));
      ry.include(ty(s.y[n] + e));
    }
  }
  // Heatmaps fill the frame; markers get a margin.
  rx.finish(!has_heatmap_);
  ry.finish(!has_heatmap_);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title_) << "</text>\n";

  if (has_heatmap_ && !heatmap_.counts.empty()) {
    double peak = 0.0;
    for (const auto& row : heatmap_.counts) {
      for (double c : row) peak = std::max(peak, c);
    }
    const std::size_t rows = heatmap_.counts.size();
    const std::size_t cols = heatmap_.counts.front().size();
    const double cw = (px(heatmap_.x_max) - px(heatmap_.x_min)) / static_cast<double>(cols);
    const double ch = (py(heatmap_.y_min) - py(heatmap_.y_max)) / static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double v = heatmap_.counts[r][c];
        if (v <= 0.0 || peak <= 0.0) continue;
        // Log shading so sparse tails stay visible next to dense cores.
        const double t = std::log1p(v) / std::log1p(peak);
        const int shade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
        o << "<rect x=\"" << num(px(heatmap_.x_min) + c * cw) << "\" y=\""
          << num(py(heatmap_.y_min) - (r + 1) * ch) << "\" width=\"" << num(cw) << "\" height=\""
          << num(ch) << "\" fill=\"rgb(" << shade << "," << shade << ",255)\"/>\n";
      }
    }
  }

  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : linear_ticks(rx.lo, rx.hi)) {
    const double x = px(t);
    o << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x) << "\" y2=\""
      << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(log_x_ ? std::pow(10.0, t) : t) << "</text>\n";
  }
  for (double t : linear_ticks(ry.lo, ry.hi)) {
    const double y = py(t);
    o << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft << "\" y2=\""
      << num(y) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
      << tick_label(log_y_ ? std::pow(10.0, t) : t) << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 14) << "\" text-anchor=\"middle\">"
    << escape(x_label_) << "</text>\n";
  o << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label_) << "</text>\n";

  for (const auto& s : series_) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.line) {
      // Gaps in the data break the polyline.
      std::string pts;
      auto flush = [&] {
        if (!pts.empty()) {
          o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << pts
            << "\"/>\n";
        }
        pts.clear();
      };
      for (std::size_t m = 0; m < n; ++m) {
        const double x = tx(s.x[m]);
        const double y = ty(s.y[m]);
        if (!std::isfinite(x) || !std::isfinite(y)) {
          flush();
          continue;
        }
        pts += num(px(x)) + "," + num(py(y)) + " ";
      }
      flush();
    }
    for (std::size_t m = 0; m < n; ++m) {
      const double x = tx(s.x[m]);
      const double y = ty(s.y[m]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (m < s.y_error.size() && std::isfinite(s.y_error[m]) && s.y_error[m] > 0.0) {
        const double lo = ty(s.y[m] - s.y_error[m]);
        const double hi = ty(s.y[m] + s.y_error[m]);
        if (std::isfinite(lo) && std::isfinite(hi)) {
          o << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(x))
            << "\" y2=\"" << num(py(hi)) << "\" stroke=\"" << s.color << "\"/>\n";
        }
      }
      if (s.markers) {
        o << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.5\" fill=\"" << s.color
          << "\"/>\n";
      }
    }
  }

  // Legend on a translucent panel, drawn last so it stays readable.
  std::size_t labeled = 0, widest = 0;
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    ++labeled;
    widest = std::max(widest, s.label.size());
  }
  if (labeled > 0) {
    o << "<rect x=\"" << num(kLeft + 6) << "\" y=\"" << num(kTop + 4) << "\" width=\""
      << num(28.0 + 7.0 * static_cast<double>(widest)) << "\" height=\"" << num(8.0 + 16.0 * labeled)
      << "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#cccccc\"/>\n";
    std::size_t row = 0;
    for (const auto& s : series_) {
      if (s.label.empty()) continue;
      const double ly = kTop + 18.0 + 16.0 * static_cast<double>(row++);
      o << "<rect x=\"" << num(kLeft + 10) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << s.color << "\"/>\n";
      o << "<text x=\"" << num(kLeft + 26) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

void Chart::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << render();
}

Heatmap histogram2d(const std::vector<double>& x, const std::vector<double>& y, std::size_t bins) {
  Heatmap h;
  h.counts.assign(bins, std::vector<double>(bins, 0.0));
  if (x.empty() || bins == 0) return h;
  const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  const auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
  h.x_min = *xlo, h.x_max = *xhi > *xlo ? *xhi : *xlo + 1.0;
  h.y_min = *ylo, h.y_max = *yhi > *ylo ? *yhi : *ylo + 1.0;
  const double sx = static_cast<double>(bins) / (h.x_max - h.x_min);
  const double sy = static_cast<double>(bins) / (h.y_max - h.y_min);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const auto c = std::min(bins - 1, static_cast<std::size_t>((x[n] - h.x_min) * sx));
    const auto r = std::min(bins - 1, static_cast<std::size_t>((y[n] - h.y_min) * sy));
    h.counts[r][c] += 1.0;
  }
  return h;
}

}  // namespace restless::plot
