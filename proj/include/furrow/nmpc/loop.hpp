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

#include "furrow/nmhe/estimator.hpp"
#include "furrow/nmpc/controller.hpp"
#include "furrow/sim/log.hpp"
#include "furrow/sim/plant.hpp"

namespace furrow::nmpc {

struct LoopConfig {
  double dt = 0.2;
  double v_cmd = 0.5;          // commanded wheel speed, constant over the run
  double actuator_tau = 0.3;   // first-order actuator lag [s]; <= 0 is ideal
  bool fixed_traction = false; // feed mu = kappa = 1 to the controller (ablation)
  bool telemetry = false;
};

/// One simulated sense -> estimate -> control -> actuate loop. Per sample:
/// the estimator and controller complete their feedback phases on the fresh
/// measurement/estimate, the command is applied to the plant, and both
/// solvers run their preparation phase for the next sample. Before the
/// estimation window has filled, a dead-reckoned estimate stands in.
class ClosedLoop {
 public:
  ClosedLoop(const LoopConfig& cfg, const sim::PlantState& init, const sim::SensorConfig& sensors,
             const sim::DropoutSchedule& dropouts, const sim::TractionProfile& traction,
             std::uint64_t seed, const nmhe::MheConfig& mhe_cfg, const MpcConfig& mpc_cfg,
             const MpcWeights& mpc_weights, ReferenceTrajectory path);

  /// Runs one sample and returns its log record.
  sim::LogRecord step();

  int step_index() const { return k_; }
  const sim::PlantState& plant() const { return plant_; }

  /// Makes the next step's estimator feedback report a failure (test hook
  /// for the hold-last-control fallback).
  void inject_estimator_failure_once() { inject_failure_ = true; }

 private:
  LoopConfig cfg_;
  sim::PlantState plant_;
  sim::SensorConfig sensors_;
  sim::DropoutSchedule dropouts_;
  sim::TractionProfile traction_;
  sim::SensorRig rig_;
  nmhe::MovingHorizonEstimator mhe_;
  Controller mpc_;

  int k_ = 0;
  std::optional<model::Measurement> last_valid_;
  model::State est_state_;
  model::Params est_params_;
  bool have_heading_ = false;
  std::optional<model::Measurement> first_fix_;
  double u_prev_ = 0.0;
  bool inject_failure_ = false;
};

}  // namespace furrow::nmpc
