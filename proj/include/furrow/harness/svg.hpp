// Copyright 2026 The Furrow Authors
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

#pragma once

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "furrow/harness/metrics.hpp"
#include "furrow/sim/log.hpp"

namespace furrow::harness {

/// Minimal deterministic SVG chart writer: same inputs, identical bytes.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label, int width = 720,
          int height = 420);

  void line(const std::vector<double>& x, const std::vector<double>& y, const std::string& color,
            const std::string& label);
  void scatter(const std::vector<double>& x, const std::vector<double>& y,
               const std::string& color, const std::string& label, double radius = 2.5);
  void hline(double y, const std::string& color);
  void bars(const std::vector<std::pair<double, double>>& center_height, double bar_width,
            const std::string& color);
  void segment(double x0, double y0, double x1, double y1, const std::string& color,
               const std::string& label = "");

  std::string render() const;
  void write(const std::string& path) const;

 private:
  struct Series {
    std::vector<double> x, y;
    std::string color, label;
    bool markers = false;
    double radius = 2.5;
  };
  struct Bar {
    double center, height;
  };

  std::string title_, x_label_, y_label_;
  int width_, height_;
  std::vector<Series> series_;
  std::vector<std::pair<double, std::string>> hlines_;
  std::vector<Bar> bars_;
  double bar_width_ = 1.0;
  std::string bar_color_;
  std::vector<std::tuple<double, double, double, double, std::string, std::string>> segments_;
};

/// Writes the evaluation panels available in the report/log to SVG files in
/// outdir; returns the file names written.
std::vector<std::string> emit_plots(const MetricsReport& report, const sim::SimLog& log,
                                    const std::string& outdir);

}  // namespace furrow::harness
