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

#include "furrow/nmpc/reference.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "furrow/errors.hpp"

namespace furrow::nmpc {

namespace {

double unwrap_near(double angle, double anchor) {
  return angle + 2.0 * M_PI * std::round((anchor - angle) / (2.0 * M_PI));
}

// Piecewise line/arc path with arclength parameterization.
struct Segment {
  bool is_arc = false;
  // line
  double x0 = 0, y0 = 0, heading = 0;
  // arc
  double cx = 0, cy = 0, radius = 0, a0 = 0, sign = 1.0;
  double length = 0;

  void sample(double s, double& x, double& y, double& tangent) const {
    if (!is_arc) {
      x = x0 + s * std::cos(heading);
      y = y0 + s * std::sin(heading);
      tangent = heading;
    } else {
      const double a = a0 + sign * s / radius;
      x = cx + radius * std::cos(a);
      y = cy + radius * std::sin(a);
      tangent = a + sign * M_PI / 2.0;
    }
  }
};

struct PathShape {
  std::vector<Segment> segments;
  bool closed = false;
  double winding = 0.0;  // heading gained per lap of a closed path

  double total_length() const {
    double l = 0.0;
    for (const auto& s : segments) l += s.length;
    return l;
  }
};

ReferenceTrajectory sample_shape(const PathShape& shape, double speed, double duration,
                                 double dt, int direction) {
  if (speed <= 0.0 || dt <= 0.0) {
    throw ConfigError("reference: speed and dt must be positive");
  }
  const double total = shape.total_length();
  if (total <= 0.0) {
    throw ConfigError("reference: degenerate path");
  }
  double horizon = duration;
  if (!shape.closed) {
    horizon = std::min(duration, total / speed);
  }
  const int n = static_cast<int>(std::floor(horizon / dt + 1e-9)) + 1;

  std::vector<model::ReferencePoint> pts;
  pts.reserve(n);
  double prev_theta = 0.0;
  for (int k = 0; k < n; ++k) {
    double s = speed * dt * k;
    double lap_heading = 0.0;
    if (shape.closed) {
      const double laps = std::floor(s / total);
      lap_heading = laps * shape.winding;
      s -= laps * total;
    }
    double x = 0, y = 0, tangent = 0;
    double acc = 0.0;
    for (const auto& seg : shape.segments) {
      if (s <= acc + seg.length || &seg == &shape.segments.back()) {
        seg.sample(std::min(s - acc, seg.length), x, y, tangent);
        break;
      }
      acc += seg.length;
    }
    model::ReferencePoint p;
    p.x = x;
    p.y = y;
    p.xdot = speed * std::cos(tangent);
    p.ydot = speed * std::sin(tangent);
    double theta = model::heading_reference(p.xdot, p.ydot, direction) + lap_heading;
    if (k > 0) {
      theta = unwrap_near(theta, prev_theta);
    }
    p.theta = theta;
    prev_theta = theta;
    pts.push_back(p);
  }
  return ReferenceTrajectory(std::move(pts), dt, direction);
}

}  // namespace

ReferenceTrajectory::ReferenceTrajectory(std::vector<model::ReferencePoint> samples, double dt,
                                         int direction)
    : samples_(std::move(samples)), dt_(dt), direction_(direction) {
  if (dt_ <= 0.0) {
    throw ConfigError("reference: dt must be positive");
  }
}

const model::ReferencePoint& ReferenceTrajectory::at_index(std::size_t i) const {
  if (i >= samples_.size()) {
    throw ConfigError("reference: index beyond path end");
  }
  return samples_[i];
}

const model::ReferencePoint& ReferenceTrajectory::at_time(double t) const {
  const auto i = static_cast<std::size_t>(std::llround(t / dt_));
  return at_index(i);
}

std::vector<model::ReferencePoint> ReferenceTrajectory::window(double t, int n) const {
  const auto base = static_cast<std::size_t>(std::llround(t / dt_));
  if (base + static_cast<std::size_t>(n) >= samples_.size()) {
    throw ConfigError("reference: horizon beyond path end");
  }
  std::vector<model::ReferencePoint> out;
  out.reserve(n);
  for (int k = 1; k <= n; ++k) {
    out.push_back(samples_[base + k]);
  }
  return out;
}

std::vector<model::ReferencePoint> build_reference(const ReferenceTrajectory& path, double t,
                                                   int n) {
  return path.window(t, n);
}

ReferenceTrajectory make_straight(double speed, double heading, double duration, double dt,
                                  int direction) {
  PathShape shape;
  Segment line;
  line.heading = heading;
  line.length = speed * duration + speed * dt;
  shape.segments.push_back(line);
  return sample_shape(shape, speed, duration, dt, direction);
}

ReferenceTrajectory make_circle(double radius, double speed, bool ccw, double duration,
                                double dt, int direction) {
  if (radius <= 0.0) {
    throw ConfigError("reference: circle radius must be positive");
  }
  PathShape shape;
  Segment arc;
  arc.is_arc = true;
  arc.radius = radius;
  arc.sign = ccw ? 1.0 : -1.0;
  arc.cx = 0.0;
  arc.cy = ccw ? radius : -radius;
  arc.a0 = ccw ? -M_PI / 2.0 : M_PI / 2.0;
  arc.length = 2.0 * M_PI * radius;
  shape.segments.push_back(arc);
  shape.closed = true;
  shape.winding = ccw ? 2.0 * M_PI : -2.0 * M_PI;
  return sample_shape(shape, speed, duration, dt, direction);
}

ReferenceTrajectory make_rounded_rectangle(double width, double height, double corner_radius,
                                           double speed, double duration, double dt,
                                           int direction) {
  const double r = corner_radius;
  if (width < 2.0 * r || height < 2.0 * r || r <= 0.0) {
    throw ConfigError("reference: rectangle does not fit its corner radius");
  }
  PathShape shape;
  shape.closed = true;
  shape.winding = 2.0 * M_PI;
  const double wl = width - 2.0 * r;
  const double hl = height - 2.0 * r;

  const auto add_line = [&](double x0, double y0, double heading, double length) {
    Segment s;
    s.x0 = x0;
    s.y0 = y0;
    s.heading = heading;
    s.length = length;
    shape.segments.push_back(s);
  };
  const auto add_corner = [&](double cx, double cy, double a0) {
    Segment s;
    s.is_arc = true;
    s.cx = cx;
    s.cy = cy;
    s.radius = r;
    s.a0 = a0;
    s.sign = 1.0;
    s.length = 0.5 * M_PI * r;
    shape.segments.push_back(s);
  };

  add_line(r, 0.0, 0.0, wl);
  add_corner(width - r, r, -M_PI / 2.0);
  add_line(width, r, M_PI / 2.0, hl);
  add_corner(width - r, height - r, 0.0);
  add_line(width - r, height, M_PI, wl);
  add_corner(r, height - r, M_PI / 2.0);
  add_line(0.0, height - r, -M_PI / 2.0, hl);
  add_corner(r, r, M_PI);
  return sample_shape(shape, speed, duration, dt, direction);
}

ReferenceTrajectory make_rows(double row_length, double row_spacing, int rows, double speed,
                              double duration, double dt, int direction) {
  if (rows < 1 || row_length <= 0.0 || row_spacing <= 0.0) {
    throw ConfigError("reference: invalid row pattern");
  }
  PathShape shape;
  const double r = row_spacing / 2.0;
  double y = 0.0;
  bool east = true;
  for (int i = 0; i < rows; ++i) {
    Segment line;
    line.x0 = east ? 0.0 : row_length;
    line.y0 = y;
    line.heading = east ? 0.0 : M_PI;
    line.length = row_length;
    shape.segments.push_back(line);
    if (i + 1 < rows) {
      Segment turn;
      turn.is_arc = true;
      turn.radius = r;
      turn.length = M_PI * r;
      turn.cx = east ? row_length : 0.0;
      turn.cy = y + r;
      // Left half-turn after an eastbound pass, right half-turn after a
      // westbound pass, so passes stay parallel.
      turn.sign = east ? 1.0 : -1.0;
      turn.a0 = east ? -M_PI / 2.0 : -M_PI / 2.0;
      shape.segments.push_back(turn);
      y += row_spacing;
      east = !east;
    }
  }
  return sample_shape(shape, speed, duration, dt, direction);
}

ReferenceTrajectory from_waypoints_csv(const std::string& path, double dt, int direction) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open waypoint file: " + path);
  }
  std::vector<std::array<double, 3>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.find("t") != std::string::npos && line.find("x") != std::string::npos) {
      first = false;
      continue;  // header
    }
    first = false;
    std::stringstream ss(line);
    std::array<double, 3> row{};
    char comma = 0;
    if (!(ss >> row[0] >> comma >> row[1] >> comma >> row[2])) {
      throw IoError("malformed waypoint row: " + line);
    }
    if (!rows.empty() && row[0] <= rows.back()[0]) {
      throw SequencingError("waypoint timestamps must be strictly increasing");
    }
    rows.push_back(row);
  }
  if (rows.size() < 2) {
    throw ConfigError("waypoint file needs at least two rows");
  }

  const double t0 = rows.front()[0];
  const double t_end = rows.back()[0];
  const int n = static_cast<int>(std::floor((t_end - t0) / dt + 1e-9)) + 1;
  std::vector<model::ReferencePoint> pts(n);
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double t = t0 + k * dt;
    while (seg + 2 < rows.size() && rows[seg + 1][0] < t) ++seg;
    const double span = rows[seg + 1][0] - rows[seg][0];
    const double a = (t - rows[seg][0]) / span;
    pts[k].x = (1.0 - a) * rows[seg][1] + a * rows[seg + 1][1];
    pts[k].y = (1.0 - a) * rows[seg][2] + a * rows[seg + 1][2];
  }
  double prev_theta = 0.0;
  for (int k = 0; k < n; ++k) {
    const int lo = std::max(0, k - 1);
    const int hi = std::min(n - 1, k + 1);
    pts[k].xdot = (pts[hi].x - pts[lo].x) / ((hi - lo) * dt);
    pts[k].ydot = (pts[hi].y - pts[lo].y) / ((hi - lo) * dt);
    double theta;
    if (pts[k].xdot == 0.0 && pts[k].ydot == 0.0) {
      if (k == 0) {
        throw ConfigError("waypoint path starts at rest: heading undefined");
      }
      theta = prev_theta;
    } else {
      theta = model::heading_reference(pts[k].xdot, pts[k].ydot, direction);
      if (k > 0) {
        theta = unwrap_near(theta, prev_theta);
      }
    }
    pts[k].theta = theta;
    prev_theta = theta;
  }
  return ReferenceTrajectory(std::move(pts), dt, direction);
}

}  // namespace furrow::nmpc
