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
#include <vector>

#include "furrow/model/model.hpp"

namespace furrow::nmpc {

/// Time-indexed reference path sampled at the controller period. Headings
/// are unwrapped along the whole path so consecutive horizon windows never
/// jump by 2*pi.
class ReferenceTrajectory {
 public:
  ReferenceTrajectory() = default;
  ReferenceTrajectory(std::vector<model::ReferencePoint> samples, double dt, int direction);

  double dt() const { return dt_; }
  int direction() const { return direction_; }
  std::size_t size() const { return samples_.size(); }
  double duration() const { return samples_.empty() ? 0.0 : dt_ * (samples_.size() - 1); }

  const model::ReferencePoint& at_index(std::size_t i) const;
  const model::ReferencePoint& at_time(double t) const;

  /// The horizon window for a solve at time t: n points covering
  /// t + dt ... t + n*dt. Throws ConfigError when the path is exhausted.
  std::vector<model::ReferencePoint> window(double t, int n) const;

 private:
  std::vector<model::ReferencePoint> samples_;
  double dt_ = 0.2;
  int direction_ = 0;
};

/// Spec'd operation name for ReferenceTrajectory::window.
std::vector<model::ReferencePoint> build_reference(const ReferenceTrajectory& path, double t,
                                                   int n);

ReferenceTrajectory make_straight(double speed, double heading, double duration, double dt,
                                  int direction = 0);
ReferenceTrajectory make_circle(double radius, double speed, bool ccw, double duration,
                                double dt, int direction = 0);
/// Closed field-lap: two straights per side joined by quarter-circle corners,
/// traversed counter-clockwise starting on the south edge heading east.
ReferenceTrajectory make_rounded_rectangle(double width, double height, double corner_radius,
                                           double speed, double duration, double dt,
                                           int direction = 0);
/// Serpentine row pattern: parallel passes joined by half-circle headland
/// turns of radius row_spacing / 2. Open path; the duration is capped at its
/// total length.
ReferenceTrajectory make_rows(double row_length, double row_spacing, int rows, double speed,
                              double duration, double dt, int direction = 0);

/// Loads a waypoint CSV with header "t,x,y", resamples onto the dt grid and
/// differentiates for the velocity references.
ReferenceTrajectory from_waypoints_csv(const std::string& path, double dt, int direction = 0);

}  // namespace furrow::nmpc
