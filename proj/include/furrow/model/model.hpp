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

#include <Eigen/Dense>
#include <utility>

namespace furrow::model {

/// Planar pose of the robot. The yaw angle is stored unwrapped (unbounded)
/// so that heading differences stay meaningful across multiple laps.
struct State {
  double x = 0.0;      // position east [m]
  double y = 0.0;      // position north [m]
  double theta = 0.0;  // yaw angle [rad], unwrapped

  Eigen::Vector3d vec() const { return {x, y, theta}; }
  static State from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// Slowly varying model parameters: wheel speed and the traction
/// coefficients that map commanded motion into effective motion.
/// mu and kappa live in [0, 1]; 1 - mu and 1 - kappa are the
/// longitudinal and lateral slip fractions.
struct Params {
  double v = 0.0;      // wheel speed [m/s], >= 0
  double mu = 1.0;     // longitudinal traction coefficient
  double kappa = 1.0;  // lateral/rotational traction coefficient

  Eigen::Vector3d vec() const { return {v, mu, kappa}; }
  static Params from_vec(const Eigen::Vector3d& p) { return {p[0], p[1], p[2]}; }
  bool valid() const {
    return std::isfinite(v) && v >= 0.0 && mu >= 0.0 && mu <= 1.0 && kappa >= 0.0 &&
           kappa <= 1.0;
  }
};

/// Control input: commanded yaw rate.
struct Control {
  double omega = 0.0;  // [rad/s]
};

/// Sensor snapshot: GNSS position, encoder wheel speed, gyro yaw rate.
/// valid_gnss is false while the (x, y) pair is a held previous fix.
struct Measurement {
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double omega = 0.0;
  bool valid_gnss = true;

  Eigen::Vector4d vec() const { return {x, y, v, omega}; }
};

/// One sample of the reference trajectory fed to the controller.
struct ReferencePoint {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // unwrapped heading reference [rad]
  double xdot = 0.0;   // reference velocity east [m/s]
  double ydot = 0.0;   // reference velocity north [m/s]
};

struct ModelConfig {
  double dt = 0.2;    // sample period [s]
  int direction = 0;  // 0 forward, 1 backward
};

/// Continuous-time kinematics: (mu v cos(theta), mu v sin(theta), kappa omega).
State dynamics(const State& xi, const Control& u, const Params& p);

/// Analytic Jacobians of dynamics, exported for sensitivity propagation.
Eigen::Matrix3d dynamics_jacobian_state(const State& xi, const Control& u, const Params& p);
Eigen::Vector3d dynamics_jacobian_control(const State& xi, const Control& u, const Params& p);
Eigen::Matrix3d dynamics_jacobian_params(const State& xi, const Control& u, const Params& p);

/// Classical fixed-step RK4 integration of the dynamics over dt.
State integrate_step(const State& xi, const Control& u, const Params& p, double dt);

/// RK4 step together with exact discrete sensitivities obtained by forward
/// chain rule on the analytic stage Jacobians:
///   d x_next / d xi -> a,  d x_next / d u -> b,  d x_next / d p -> c.
State integrate_step_sensitivity(const State& xi, const Control& u, const Params& p, double dt,
                                 Eigen::Matrix3d& a, Eigen::Vector3d& b, Eigen::Matrix3d& c);

/// Noiseless measurement map z = (x, y, v, omega).
Measurement measurement(const State& xi, const Control& u, const Params& p);

/// Reference heading atan2(ydot, xdot) + direction * pi.
/// Throws ConfigError on a zero velocity vector.
double heading_reference(double xdot, double ydot, int direction);

/// (longitudinal, lateral) slip fractions (1 - mu, 1 - kappa).
std::pair<double, double> slip_percentages(const Params& p);

}  // namespace furrow::model
