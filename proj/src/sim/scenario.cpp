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

#include "furrow/sim/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "furrow/errors.hpp"

namespace furrow::sim {

nmpc::ReferenceTrajectory build_path(const ScenarioConfig& cfg) {
  const double horizon_margin = (cfg.mpc.horizon + 5) * cfg.dt;
  const double duration = cfg.duration + horizon_margin;
  switch (cfg.path.kind) {
    case PathSpec::Kind::straight:
      return nmpc::make_straight(cfg.path.speed, cfg.path.heading, duration, cfg.dt,
                                 cfg.direction);
    case PathSpec::Kind::circle:
      return nmpc::make_circle(cfg.path.radius, cfg.path.speed, cfg.path.ccw, duration, cfg.dt,
                               cfg.direction);
    case PathSpec::Kind::rounded_rectangle:
      return nmpc::make_rounded_rectangle(cfg.path.rect_width, cfg.path.rect_height,
                                          cfg.path.corner_radius, cfg.path.speed, duration,
                                          cfg.dt, cfg.direction);
    case PathSpec::Kind::rows:
      return nmpc::make_rows(cfg.path.row_length, cfg.path.row_spacing, cfg.path.row_count,
                             cfg.path.speed, duration, cfg.dt, cfg.direction);
    case PathSpec::Kind::waypoints:
      return nmpc::from_waypoints_csv(cfg.path.waypoint_file, cfg.dt, cfg.direction);
  }
  throw ConfigError("unknown path kind");
}

namespace {

PlantState initial_plant(const ScenarioConfig& cfg, const nmpc::ReferenceTrajectory& path) {
  const model::ReferencePoint& p0 = path.at_index(0);
  const double tangent = std::atan2(p0.ydot, p0.xdot);
  PlantState s;
  s.xi_true.x = p0.x + cfg.start_offset * std::cos(tangent + M_PI / 2.0);
  s.xi_true.y = p0.y + cfg.start_offset * std::sin(tangent + M_PI / 2.0);
  s.xi_true.theta = tangent + cfg.start_heading_offset;
  s.p_true = model::Params{0.0, cfg.traction.mu(0.0), cfg.traction.kappa(0.0)};
  s.omega_actual = 0.0;
  s.v_actual = 0.0;
  return s;
}

int usable_steps(const ScenarioConfig& cfg, const nmpc::ReferenceTrajectory& path) {
  const int requested = static_cast<int>(std::floor(cfg.duration / cfg.dt + 1e-9));
  const double needed_tail = (cfg.mpc.horizon + 1) * cfg.dt;
  const int available =
      static_cast<int>(std::floor((path.duration() - needed_tail) / cfg.dt + 1e-9));
  return std::max(0, std::min(requested, available));
}

}  // namespace

SimLog run_scenario(const ScenarioConfig& cfg) {
  if (cfg.dt <= 0.0 || cfg.duration <= 0.0) {
    throw ConfigError("scenario: dt and duration must be positive");
  }
  auto path = build_path(cfg);
  const int steps = usable_steps(cfg, path);

  nmhe::MheConfig mhe = cfg.mhe;
  mhe.dt = cfg.dt;
  nmpc::MpcConfig mpc = cfg.mpc;
  mpc.dt = cfg.dt;

  nmpc::LoopConfig loop_cfg;
  loop_cfg.dt = cfg.dt;
  loop_cfg.v_cmd = cfg.v_cmd;
  loop_cfg.actuator_tau = cfg.actuator_tau;
  loop_cfg.fixed_traction = cfg.fixed_traction;
  loop_cfg.telemetry = cfg.telemetry;

  const PlantState init = initial_plant(cfg, path);
  nmpc::ClosedLoop loop(loop_cfg, init, cfg.sensors, cfg.dropouts, cfg.traction, cfg.seed, mhe,
                        mpc, cfg.mpc_weights, std::move(path));

  SimLog log;
  log.with_telemetry = cfg.telemetry;
  log.records.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    log.records.push_back(loop.step());
  }
  return log;
}

SimLog run_open_loop(const ScenarioConfig& cfg, const OpenLoopSpec& spec) {
  if (cfg.dt <= 0.0 || cfg.duration <= 0.0) {
    throw ConfigError("scenario: dt and duration must be positive");
  }
  auto path = build_path(cfg);
  PlantState plant = initial_plant(cfg, path);
  SensorRig rig(cfg.seed);
  cfg.dropouts.validate();
  cfg.traction.validate();

  const int steps = static_cast<int>(std::floor(cfg.duration / cfg.dt + 1e-9));
  SimLog log;
  log.records.reserve(steps);
  std::optional<model::Measurement> last_valid;
  for (int k = 0; k < steps; ++k) {
    const double t = k * cfg.dt;
    LogRecord rec;
    rec.t = t;
    rec.x_true = plant.xi_true.x;
    rec.y_true = plant.xi_true.y;
    rec.theta_true = plant.xi_true.theta;
    rec.v_actual = plant.v_actual;
    rec.omega_actual = plant.omega_actual;
    rec.mu_true = cfg.traction.mu(t);
    rec.kappa_true = cfg.traction.kappa(t);

    model::Measurement z = rig.sample(plant, cfg.sensors);
    z = apply_dropout(z, t, cfg.dropouts, last_valid);
    if (z.valid_gnss) {
      last_valid = z;
    }
    rec.z_x = z.x;
    rec.z_y = z.y;
    rec.z_v = z.v;
    rec.z_omega = z.omega;
    rec.valid_gnss = z.valid_gnss;

    const double u = spec.omega_period > 0.0
                         ? spec.omega_amplitude * std::sin(2.0 * M_PI * t / spec.omega_period)
                         : spec.omega_amplitude;
    rec.omega_cmd = u;
    if (static_cast<std::size_t>(k) < path.size()) {
      const auto& ref = path.at_index(k);
      rec.x_ref = ref.x;
      rec.y_ref = ref.y;
      rec.theta_ref = ref.theta;
    }

    plant = step_plant(plant, u, cfg.v_cmd, cfg.dt, cfg.actuator_tau, rec.mu_true,
                       rec.kappa_true);
    log.records.push_back(rec);
  }
  return log;
}

}  // namespace furrow::sim
