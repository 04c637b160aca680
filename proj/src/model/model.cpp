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

#include "furrow/model/model.hpp"

#include <cmath>

#include "furrow/errors.hpp"

namespace furrow::model {

State dynamics(const State& xi, const Control& u, const Params& p) {
  const double speed = p.mu * p.v;
  return {speed * std::cos(xi.theta), speed * std::sin(xi.theta), p.kappa * u.omega};
}

Eigen::Matrix3d dynamics_jacobian_state(const State& xi, const Control& /*u*/, const Params& p) {
  const double speed = p.mu * p.v;
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
  j(0, 2) = -speed * std::sin(xi.theta);
  j(1, 2) = speed * std::cos(xi.theta);
  return j;
}

Eigen::Vector3d dynamics_jacobian_control(const State& /*xi*/, const Control& /*u*/,
                                          const Params& p) {
  return {0.0, 0.0, p.kappa};
}

Eigen::Matrix3d dynamics_jacobian_params(const State& xi, const Control& u, const Params& p) {
  const double c = std::cos(xi.theta);
  const double s = std::sin(xi.theta);
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
  // columns: d/dv, d/dmu, d/dkappa
  j(0, 0) = p.mu * c;
  j(0, 1) = p.v * c;
  j(1, 0) = p.mu * s;
  j(1, 1) = p.v * s;
  j(2, 2) = u.omega;
  return j;
}

State integrate_step(const State& xi, const Control& u, const Params& p, double dt) {
  const Eigen::Vector3d x0 = xi.vec();
  const auto f = [&](const Eigen::Vector3d& x) {
    return dynamics(State::from_vec(x), u, p).vec();
  };
  const Eigen::Vector3d k1 = f(x0);
  const Eigen::Vector3d k2 = f(x0 + 0.5 * dt * k1);
  const Eigen::Vector3d k3 = f(x0 + 0.5 * dt * k2);
  const Eigen::Vector3d k4 = f(x0 + dt * k3);
  return State::from_vec(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

State integrate_step_sensitivity(const State& xi, const Control& u, const Params& p, double dt,
                                 Eigen::Matrix3d& a, Eigen::Vector3d& b, Eigen::Matrix3d& c) {
  const Eigen::Vector3d x0 = xi.vec();

  // Stage values and stage sensitivities (chain rule through each RK4 stage).
  Eigen::Vector3d k[4];
  Eigen::Matrix3d kx[4];  // d k_i / d x0
  Eigen::Vector3d ku[4];  // d k_i / d u
  Eigen::Matrix3d kp[4];  // d k_i / d p
  const double stage_scale[4] = {0.0, 0.5, 0.5, 1.0};

  Eigen::Vector3d x_stage = x0;
  Eigen::Matrix3d x_stage_dx = Eigen::Matrix3d::Identity();
  Eigen::Vector3d x_stage_du = Eigen::Vector3d::Zero();
  Eigen::Matrix3d x_stage_dp = Eigen::Matrix3d::Zero();

  for (int i = 0; i < 4; ++i) {
    if (i > 0) {
      const double h = stage_scale[i] * dt;
      x_stage = x0 + h * k[i - 1];
      x_stage_dx = Eigen::Matrix3d::Identity() + h * kx[i - 1];
      x_stage_du = h * ku[i - 1];
      x_stage_dp = h * kp[i - 1];
    }
    const State s = State::from_vec(x_stage);
    k[i] = dynamics(s, u, p).vec();
    const Eigen::Matrix3d fx = dynamics_jacobian_state(s, u, p);
    kx[i] = fx * x_stage_dx;
    ku[i] = fx * x_stage_du + dynamics_jacobian_control(s, u, p);
    kp[i] = fx * x_stage_dp + dynamics_jacobian_params(s, u, p);
  }

  const double w = dt / 6.0;
  a = Eigen::Matrix3d::Identity() + w * (kx[0] + 2.0 * kx[1] + 2.0 * kx[2] + kx[3]);
  b = w * (ku[0] + 2.0 * ku[1] + 2.0 * ku[2] + ku[3]);
  c = w * (kp[0] + 2.0 * kp[1] + 2.0 * kp[2] + kp[3]);
  return State::from_vec(x0 + w * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]));
}

Measurement measurement(const State& xi, const Control& u, const Params& p) {
  return {xi.x, xi.y, p.v, u.omega, true};
}

double heading_reference(double xdot, double ydot, int direction) {
  if (xdot == 0.0 && ydot == 0.0) {
    throw ConfigError("heading_reference: zero reference velocity vector");
  }
  return std::atan2(ydot, xdot) + static_cast<double>(direction) * M_PI;
}

std::pair<double, double> slip_percentages(const Params& p) {
  return {1.0 - p.mu, 1.0 - p.kappa};
}

}  // namespace furrow::model
