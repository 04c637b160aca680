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

#include <cstdint>
#include <string>

#include "furrow/nmhe/estimator.hpp"
#include "furrow/nmpc/controller.hpp"
#include "furrow/nmpc/loop.hpp"
#include "furrow/sim/log.hpp"
#include "furrow/sim/plant.hpp"

namespace furrow::sim {

struct PathSpec {
  enum class Kind { straight, circle, rounded_rectangle, rows, waypoints };
  Kind kind = Kind::rounded_rectangle;
  double speed = 0.425;  // paced to the robot's effective speed mu * v_cmd
  double heading = 0.0;  // straight
  double radius = 10.0;  // circle
  bool ccw = true;
  double rect_width = 40.0, rect_height = 20.0, corner_radius = 6.0;
  double row_length = 30.0, row_spacing = 12.0;
  int row_count = 4;
  std::string waypoint_file;
};

struct ScenarioConfig {
  double duration = 300.0;
  double dt = 0.2;
  std::uint64_t seed = 1;

  double v_cmd = 0.5;
  double actuator_tau = 0.3;
  double start_offset = 0.5;          // lateral offset of the initial pose [m]
  double start_heading_offset = 0.0;  // [rad]
  int direction = 0;                  // reference direction flag
  bool fixed_traction = false;
  bool telemetry = false;

  PathSpec path;
  SensorConfig sensors;
  DropoutSchedule dropouts;
  TractionProfile traction;
  nmhe::MheConfig mhe;
  nmpc::MpcConfig mpc;
  nmpc::MpcWeights mpc_weights;
};

/// Builds the reference trajectory described by the path spec, extended far
/// enough to cover the run plus the prediction horizon.
nmpc::ReferenceTrajectory build_path(const ScenarioConfig& cfg);

/// Runs the full closed loop (sense -> NMHE -> NMPC -> actuate) for the
/// configured duration at the sample rate. Deterministic for a given config
/// and seed.
SimLog run_scenario(const ScenarioConfig& cfg);

/// Open-loop run: the commanded yaw rate follows a fixed profile instead of
/// the controller (the estimator still runs, so the output doubles as an
/// estimation fixture). omega_cmd(t) = omega_amplitude * sin(2*pi*t/omega_period),
/// constant omega_amplitude when omega_period <= 0.
struct OpenLoopSpec {
  double omega_amplitude = 0.0;
  double omega_period = 0.0;
};
SimLog run_open_loop(const ScenarioConfig& cfg, const OpenLoopSpec& spec);

}  // namespace furrow::sim
