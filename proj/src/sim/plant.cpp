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

#include "furrow/sim/plant.hpp"

#include <cmath>
#include <limits>

#include "furrow/errors.hpp"

namespace furrow::sim {

void DropoutSchedule::validate() const {
  double prev_end = -std::numeric_limits<double>::infinity();
  for (const auto& [start, end] : intervals) {
    if (start >= end) {
      throw ConfigError("dropout interval must have start < end");
    }
    if (start < prev_end) {
      throw ConfigError("dropout intervals must be non-overlapping and sorted");
    }
    prev_end = end;
  }
}

bool DropoutSchedule::active(double t) const {
  for (const auto& [start, end] : intervals) {
    if (t >= start && t < end) {
      return true;
    }
  }
  return false;
}

namespace {
double step_value(const std::vector<std::pair<double, double>>& steps, double t,
                  double fallback) {
  double v = fallback;
  for (const auto& [time, value] : steps) {
    if (time > t) break;
    v = value;
  }
  return v;
}
}  // namespace

double TractionProfile::mu(double t) const { return step_value(mu_steps, t, 1.0); }
double TractionProfile::kappa(double t) const { return step_value(kappa_steps, t, 1.0); }

void TractionProfile::validate() const {
  for (const auto* steps : {&mu_steps, &kappa_steps}) {
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [time, value] : *steps) {
      if (time <= prev) {
        throw ConfigError("traction step times must be strictly increasing");
      }
      if (value < 0.0 || value > 1.0) {
        throw ConfigError("traction values must lie in [0, 1]");
      }
      prev = time;
    }
  }
}

PlantState step_plant(const PlantState& s, double cmd_omega, double cmd_v, double dt,
                      double tau, double mu_true, double kappa_true) {
  if (dt <= 0.0) {
    throw ConfigError("step_plant: dt must be positive");
  }
  PlantState next = s;
  next.p_true.mu = mu_true;
  next.p_true.kappa = kappa_true;

  if (tau <= 0.0) {
    next.omega_actual = cmd_omega;
    next.v_actual = cmd_v;
    next.p_true.v = next.v_actual;
    next.xi_true = model::integrate_step(s.xi_true, model::Control{cmd_omega},
                                         model::Params{cmd_v, mu_true, kappa_true}, dt);
    return next;
  }

  // Exact first-order responses over the interval, sampled inside RK4.
  const auto omega_at = [&](double h) {
    return cmd_omega + (s.omega_actual - cmd_omega) * std::exp(-h / tau);
  };
  const auto v_at = [&](double h) {
    return cmd_v + (s.v_actual - cmd_v) * std::exp(-h / tau);
  };
  const auto f = [&](const Eigen::Vector3d& x, double h) {
    return model::dynamics(model::State::from_vec(x), model::Control{omega_at(h)},
                           model::Params{v_at(h), mu_true, kappa_true})
        .vec();
  };
  const Eigen::Vector3d x0 = s.xi_true.vec();
  const Eigen::Vector3d k1 = f(x0, 0.0);
  const Eigen::Vector3d k2 = f(x0 + 0.5 * dt * k1, 0.5 * dt);
  const Eigen::Vector3d k3 = f(x0 + 0.5 * dt * k2, 0.5 * dt);
  const Eigen::Vector3d k4 = f(x0 + dt * k3, dt);
  next.xi_true = model::State::from_vec(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  next.omega_actual = omega_at(dt);
  next.v_actual = v_at(dt);
  next.p_true.v = next.v_actual;
  return next;
}

SensorRig::SensorRig(std::uint64_t seed)
    : ex_(substream(seed, 1)), ey_(substream(seed, 2)), ev_(substream(seed, 3)),
      eomega_(substream(seed, 4)) {}

model::Measurement SensorRig::sample(const PlantState& s, const SensorConfig& cfg) {
  if (!cfg.valid()) {
    throw ConfigError("sensor config: sigmas must be non-negative and rate positive");
  }
  model::Measurement z;
  z.x = gaussian(ex_, s.xi_true.x, cfg.sigma_x);
  z.y = gaussian(ey_, s.xi_true.y, cfg.sigma_y);
  z.v = gaussian(ev_, s.v_actual, cfg.sigma_v);
  z.omega = gaussian(eomega_, s.omega_actual, cfg.sigma_omega);
  z.valid_gnss = true;
  return z;
}

model::Measurement sample_sensors(const PlantState& s, const SensorConfig& cfg, SensorRig& rig) {
  return rig.sample(s, cfg);
}

model::Measurement apply_dropout(const model::Measurement& m, double t,
                                 const DropoutSchedule& sched,
                                 const std::optional<model::Measurement>& last_valid) {
  if (!sched.active(t)) {
    return m;
  }
  if (!last_valid.has_value()) {
    throw ConfigError("gnss dropout at start of run: no previous fix to hold");
  }
  model::Measurement held = m;
  held.x = last_valid->x;
  held.y = last_valid->y;
  held.valid_gnss = false;
  return held;
}

}  // namespace furrow::sim
