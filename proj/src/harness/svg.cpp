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

#include "furrow/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "furrow/errors.hpp"

namespace furrow::harness {

namespace {

constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 48;

std::string num(double v, int prec = 2) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double nice_step(double range) {
  if (range <= 0.0 || !std::isfinite(range)) {
    return 1.0;
  }
  const double raw = range / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step = 10.0;
  if (frac <= 1.0) step = 1.0;
  else if (frac <= 2.0) step = 2.0;
  else if (frac <= 5.0) step = 5.0;
  return step * mag;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, int width,
                 int height)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)),
      width_(width), height_(height) {}

void SvgPlot::line(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& color, const std::string& label) {
  series_.push_back({x, y, color, label, false, 0.0});
}

void SvgPlot::scatter(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& color, const std::string& label, double radius) {
  series_.push_back({x, y, color, label, true, radius});
}

void SvgPlot::hline(double y, const std::string& color) { hlines_.emplace_back(y, color); }

void SvgPlot::bars(const std::vector<std::pair<double, double>>& center_height, double bar_width,
                   const std::string& color) {
  for (const auto& [c, h] : center_height) {
    bars_.push_back({c, h});
  }
  bar_width_ = bar_width;
  bar_color_ = color;
}

void SvgPlot::segment(double x0, double y0, double x1, double y1, const std::string& color,
                      const std::string& label) {
  segments_.emplace_back(x0, y0, x1, y1, color, label);
}

std::string SvgPlot::render() const {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool any = false;
  const auto eat = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    if (!any) {
      xmin = xmax = x;
      ymin = ymax = y;
      any = true;
    } else {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  };
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      eat(s.x[i], s.y[i]);
    }
  }
  for (const auto& b : bars_) {
    eat(b.center - bar_width_ / 2, 0.0);
    eat(b.center + bar_width_ / 2, b.height);
  }
  for (const auto& [x0, y0, x1, y1, c, l] : segments_) {
    eat(x0, y0);
    eat(x1, y1);
  }
  for (const auto& [y, c] : hlines_) {
    eat(xmin, y);
  }
  if (xmax - xmin < 1e-12) {
    xmax = xmin + 1.0;
  }
  if (ymax - ymin < 1e-12) {
    ymax = ymin + 1.0;
  }
  const double xpad = 0.03 * (xmax - xmin);
  const double ypad = 0.06 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double px0 = kMarginLeft, px1 = width_ - kMarginRight;
  const double py0 = height_ - kMarginBottom, py1 = kMarginTop;
  const auto sx = [&](double x) { return px0 + (x - xmin) / (xmax - xmin) * (px1 - px0); };
  const auto sy = [&](double y) { return py0 + (y - ymin) / (ymax - ymin) * (py1 - py0); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
      << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
  svg << "<rect width=\"" << width_ << "\" height=\"" << height_ << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width_ / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title_ << "</text>\n";

  // Axes, ticks and grid.
  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  const double xstep = nice_step(xmax - xmin);
  for (double tx = std::ceil(xmin / xstep) * xstep; tx <= xmax + 1e-12; tx += xstep) {
    const double px = sx(tx);
    svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(py0) << "\" x2=\"" << num(px)
        << "\" y2=\"" << num(py1) << "\" stroke=\"#eee\"/>\n";
    svg << "<text x=\"" << num(px) << "\" y=\"" << num(py0 + 16) << "\" text-anchor=\"middle\">"
        << tick_label(tx) << "</text>\n";
  }
  const double ystep = nice_step(ymax - ymin);
  for (double ty = std::ceil(ymin / ystep) * ystep; ty <= ymax + 1e-12; ty += ystep) {
    const double py = sy(ty);
    svg << "<line x1=\"" << num(px0) << "\" y1=\"" << num(py) << "\" x2=\"" << num(px1)
        << "\" y2=\"" << num(py) << "\" stroke=\"#eee\"/>\n";
    svg << "<text x=\"" << num(px0 - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
        << tick_label(ty) << "</text>\n";
  }
  svg << "<line x1=\"" << num(px0) << "\" y1=\"" << num(py0) << "\" x2=\"" << num(px1)
      << "\" y2=\"" << num(py0) << "\" stroke=\"#333\"/>\n";
  svg << "<line x1=\"" << num(px0) << "\" y1=\"" << num(py0) << "\" x2=\"" << num(px0)
      << "\" y2=\"" << num(py1) << "\" stroke=\"#333\"/>\n";
  svg << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << height_ - 10
      << "\" text-anchor=\"middle\">" << x_label_ << "</text>\n";
  svg << "<text x=\"14\" y=\"" << (py0 + py1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << (py0 + py1) / 2 << ")\">" << y_label_ << "</text>\n";
  svg << "</g>\n";

  for (const auto& b : bars_) {
    const double bx0 = sx(b.center - bar_width_ / 2);
    const double bx1 = sx(b.center + bar_width_ / 2);
    const double by0 = sy(0.0);
    const double by1 = sy(b.height);
    svg << "<rect x=\"" << num(bx0) << "\" y=\"" << num(std::min(by0, by1)) << "\" width=\""
        << num(bx1 - bx0) << "\" height=\"" << num(std::abs(by0 - by1))
        << "\" fill=\"" << bar_color_ << "\" stroke=\"#333\"/>\n";
  }

  for (const auto& [y, color] : hlines_) {
    svg << "<line x1=\"" << num(px0) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(px1)
        << "\" y2=\"" << num(sy(y)) << "\" stroke=\"" << color
        << "\" stroke-dasharray=\"6 3\"/>\n";
  }

  for (const auto& [x0, y0, x1, y1, color, label] : segments_) {
    svg << "<line x1=\"" << num(sx(x0)) << "\" y1=\"" << num(sy(y0)) << "\" x2=\"" << num(sx(x1))
        << "\" y2=\"" << num(sy(y1)) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
  }

  for (const auto& s : series_) {
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        svg << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i])) << "\" r=\""
            << num(s.radius, 1) << "\" fill=\"" << s.color << "\"/>\n";
      }
    } else if (!s.x.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        svg << num(sx(s.x[i])) << "," << num(sy(s.y[i])) << " ";
      }
      svg << "\"/>\n";
    }
  }

  // Legend.
  int ly = kMarginTop + 8;
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    svg << "<rect x=\"" << px1 - 150 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"4\" fill=\""
        << s.color << "\"/>\n";
    svg << "<text x=\"" << px1 - 132 << "\" y=\"" << ly - 2 << "\">" << s.label << "</text>\n";
    ly += 16;
  }
  for (const auto& [x0, y0, x1, y1, color, label] : segments_) {
    if (label.empty()) continue;
    svg << "<rect x=\"" << px1 - 150 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"4\" fill=\""
        << color << "\"/>\n";
    svg << "<text x=\"" << px1 - 132 << "\" y=\"" << ly - 2 << "\">" << label << "</text>\n";
    ly += 16;
  }
  svg << "</g>\n";
  svg << "</svg>\n";
  return svg.str();
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out << render();
}

std::vector<std::string> emit_plots(const MetricsReport& report, const sim::SimLog& log,
                                    const std::string& outdir) {
  std::vector<std::string> written;
  const auto save = [&](SvgPlot& plot, const std::string& name) {
    const std::string path = outdir + "/" + name;
    plot.write(path);
    written.push_back(name);
  };

  if (!log.records.empty()) {
    std::vector<double> t, xt, yt, xr, yr, err, ev, eh, mh, kh, mt, kt, zv, vh, va, wc, wz, viol;
    std::vector<double> drop_x, drop_y;
    int violations = 0;
    const std::size_t start =
        report.on_track_index >= 0 ? static_cast<std::size_t>(report.on_track_index) : SIZE_MAX;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
      const auto& r = log.records[i];
      t.push_back(r.t);
      xt.push_back(r.x_true);
      yt.push_back(r.y_true);
      xr.push_back(r.x_ref);
      yr.push_back(r.y_ref);
      const double e = std::hypot(r.x_true - r.x_ref, r.y_true - r.y_ref);
      err.push_back(e);
      if (i >= start && e > report.violation_threshold) {
        ++violations;
      }
      viol.push_back(violations);
      mh.push_back(r.mu_hat);
      kh.push_back(r.kappa_hat);
      mt.push_back(r.mu_true);
      kt.push_back(r.kappa_true);
      zv.push_back(r.z_v);
      vh.push_back(r.v_hat);
      va.push_back(r.v_actual);
      wc.push_back(r.omega_cmd);
      wz.push_back(r.z_omega);
      if (!r.valid_gnss) {
        drop_x.push_back(r.x_true);
        drop_y.push_back(r.y_true);
      }
    }

    SvgPlot traj("Reference and actual trajectory", "x [m]", "y [m]", 560, 560);
    traj.line(xr, yr, "#888888", "reference");
    traj.line(xt, yt, "#1f6fb2", "actual");
    traj.scatter(drop_x, drop_y, "#d62728", "gnss dropout", 3.0);
    save(traj, "trajectory.svg");

    SvgPlot eplot("Euclidean error", "t [s]", "error [m]");
    eplot.line(t, err, "#1f6fb2", "error");
    eplot.hline(report.violation_threshold, "#d62728");
    save(eplot, "error.svg");

    SvgPlot vplot("Violations of the clearance limit", "t [s]", "count");
    vplot.line(t, viol, "#d62728", "cumulative violations");
    save(vplot, "violations.svg");

    SvgPlot tplot("Traction estimates", "t [s]", "coefficient");
    tplot.line(t, mh, "#1f6fb2", "mu estimate");
    tplot.line(t, kh, "#2ca02c", "kappa estimate");
    tplot.line(t, mt, "#9ecae1", "mu true");
    tplot.line(t, kt, "#a1d99b", "kappa true");
    save(tplot, "traction.svg");

    SvgPlot splot("Measured and estimated speed", "t [s]", "v [m/s]");
    splot.line(t, zv, "#bbbbbb", "measured");
    splot.line(t, vh, "#1f6fb2", "estimate");
    splot.line(t, va, "#2ca02c", "actual");
    save(splot, "speed.svg");

    SvgPlot wplot("Yaw rate", "t [s]", "omega [rad/s]");
    wplot.line(t, wz, "#bbbbbb", "measured");
    wplot.line(t, wc, "#1f6fb2", "commanded");
    save(wplot, "yawrate.svg");
  }

  if (report.has_counting) {
    std::vector<double> hx, ry;
    double hmin = 0.0, hmax = 1.0;
    for (std::size_t i = 0; i < report.count_pairs.size(); ++i) {
      hx.push_back(report.count_pairs[i].first);
      ry.push_back(report.count_pairs[i].second);
      if (i == 0) {
        hmin = hmax = hx[0];
      } else {
        hmin = std::min(hmin, hx[i]);
        hmax = std::max(hmax, hx[i]);
      }
    }
    SvgPlot scatter("Robot count vs reference count", "reference count", "robot count", 560, 560);
    scatter.scatter(hx, ry, "#1f6fb2", "plots", 3.0);
    scatter.segment(hmin, report.fit.slope * hmin + report.fit.intercept, hmax,
                    report.fit.slope * hmax + report.fit.intercept, "#d62728", "linear fit");
    save(scatter, "count_scatter.svg");

    SvgPlot hist("Relative counting error", "error [%]", "plots");
    std::vector<std::pair<double, double>> bars;
    bars.reserve(report.rel.histogram.size());
    for (const auto& [center, count] : report.rel.histogram) {
      bars.emplace_back(center, static_cast<double>(count));
    }
    hist.bars(bars, report.rel.bin_width * 0.9, "#9ecae1");
    save(hist, "count_histogram.svg");
  }

  if (log.records.empty() && !report.has_counting) {
    // Nothing to draw; still emit a valid document so downstream tooling
    // never sees a missing artifact.
    SvgPlot empty("No data", "", "");
    save(empty, "empty.svg");
  }
  return written;
}

}  // namespace furrow::harness
