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
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "furrow/model/model.hpp"
#include "furrow/rng.hpp"

namespace furrow::sim {

/// Ground-truth simulator state. p_true.v mirrors the post-lag wheel speed.
struct PlantState {
  model::State xi_true;
  model::Params p_true{0.0, 0.85, 0.9};
  double omega_actual = 0.0;  // post-lag yaw rate [rad/s]
  double v_actual = 0.0;      // post-lag wheel speed [m/s]
};

struct SensorConfig {
  double sigma_x = 0.03;       // [m]
  double sigma_y = 0.03;       // [m]
  double sigma_v = 0.05;       // [m/s]
  double sigma_omega = 0.0175; // [rad/s]
  double rate_hz = 5.0;

  bool valid() const {
    return sigma_x >= 0 && sigma_y >= 0 && sigma_v >= 0 && sigma_omega >= 0 && rate_hz > 0;
  }
};

/// Time intervals with no fresh GNSS fix.
struct DropoutSchedule {
  std::vector<std::pair<double, double>> intervals;  // [start, end)

  void validate() const;  // non-overlapping, start < end
  bool active(double t) const;
};

/// Piecewise-constant ground-truth traction schedules.
struct TractionProfile {
  std::vector<std::pair<double, double>> mu_steps{{0.0, 0.85}};     // (time, value)
  std::vector<std::pair<double, double>> kappa_steps{{0.0, 0.9}};

  double mu(double t) const;
  double kappa(double t) const;
  void validate() const;  // values within [0, 1], times increasing
};

/// Advances the plant one sample: first-order actuator lags toward the
/// commands (exact exponential response), true kinematics integrated with
/// the lagged inputs and the true traction. tau <= 0 selects the ideal
/// actuator and reduces to a plain model integration step.
PlantState step_plant(const PlantState& s, double cmd_omega, double cmd_v, double dt,
                      double tau, double mu_true, double kappa_true);

/// Per-sensor noise substreams from one master seed; stream assignments are
/// stable so adding a sensor does not shift the existing sequences.
class SensorRig {
 public:
  explicit SensorRig(std::uint64_t seed);
  model::Measurement sample(const PlantState& s, const SensorConfig& cfg);

 private:
  std::mt19937_64 ex_, ey_, ev_, eomega_;
};

model::Measurement sample_sensors(const PlantState& s, const SensorConfig& cfg, SensorRig& rig);

/// During a dropout interval the previous valid fix is fed through and the
/// flag is cleared; speed and yaw rate pass unchanged. Throws ConfigError if
/// a dropout covers the very first sample (no fix to hold).
model::Measurement apply_dropout(const model::Measurement& m, double t,
                                 const DropoutSchedule& sched,
                                 const std::optional<model::Measurement>& last_valid);

}  // namespace furrow::sim
