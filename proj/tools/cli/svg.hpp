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

// Minimal SVG charts: lines, markers with error bars, and a density map.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace restless::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_error;  // optional, same length as y
  std::string color = "#1f77b4";
  bool line = true;
  bool markers = false;
};

struct Heatmap {
  std::vector<std::vector<double>> counts;  // [row = y bin][column = x bin]
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
};

class Chart {
 public:
  Chart(std::string title, std::string x_label, std::string y_label);

  void set_log_x(bool on) { log_x_ = on; }
  void set_log_y(bool on) { log_y_ = on; }
  void add(Series s) { series_.push_back(std::move(s)); }
  void set_heatmap(Heatmap h) { heatmap_ = std::move(h); has_heatmap_ = true; }

  std::string render() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::string title_, x_label_, y_label_;
  bool log_x_ = false, log_y_ = false;
  std::vector<Series> series_;
  Heatmap heatmap_;
  bool has_heatmap_ = false;
};

/// 2-D histogram of points over their bounding box.
Heatmap histogram2d(const std::vector<double>& x, const std::vector<double>& y, std::size_t bins);

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace restless::plot
