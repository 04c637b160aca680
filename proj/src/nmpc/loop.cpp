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

#include "furrow/nmpc/loop.hpp"

#include <cmath>

namespace furrow::nmpc {

ClosedLoop::ClosedLoop(const LoopConfig& cfg, const sim::PlantState& init,
                       const sim::SensorConfig& sensors, const sim::DropoutSchedule& dropouts,
                       const sim::TractionProfile& traction, std::uint64_t seed,
                       const nmhe::MheConfig& mhe_cfg, const MpcConfig& mpc_cfg,
                       const MpcWeights& mpc_weights, ReferenceTrajectory path)
    : cfg_(cfg), plant_(init), sensors_(sensors), dropouts_(dropouts), traction_(traction),
      rig_(seed), mhe_(mhe_cfg), mpc_(mpc_cfg, mpc_weights, std::move(path)) {
  dropouts_.validate();
  traction_.validate();
  est_params_ = model::Params{0.0, mhe_cfg.initial_traction, mhe_cfg.initial_traction};
}

sim::LogRecord ClosedLoop::step() {
  const double t = k_ * cfg_.dt;
  sim::LogRecord rec;
  rec.t = t;
  rec.x_true = plant_.xi_true.x;
  rec.y_true = plant_.xi_true.y;
  rec.theta_true = plant_.xi_true.theta;
  rec.v_actual = plant_.v_actual;
  rec.omega_actual = plant_.omega_actual;
  rec.mu_true = traction_.mu(t);
  rec.kappa_true = traction_.kappa(t);

  // Sense.
  model::Measurement z = rig_.sample(plant_, sensors_);
  z = sim::apply_dropout(z, t, dropouts_, last_valid_);
  if (z.valid_gnss) {
    last_valid_ = z;
  }
  rec.z_x = z.x;
  rec.z_y = z.y;
  rec.z_v = z.v;
  rec.z_omega = z.omega;
  rec.valid_gnss = z.valid_gnss;

  // Estimate. NMHE feedback once the window has filled; dead reckoning from
  // the raw measurements during warm-up (heading from the first two fixes,
  // then integrated from the gyro).
  const bool warmup = !mhe_.prepared();
  bool estimate_fresh = false;
  if (inject_failure_) {
    rec.mhe_status = static_cast<int>(rti::SolveStatus::iteration_limit);
  } else if (!warmup) {
    const auto est = mhe_.feedback(z);
    rec.mhe_status = static_cast<int>(est.status);
    if (est.status == rti::SolveStatus::ok) {
      est_state_ = est.state;
      est_params_ = est.params;
      mhe_.update_arrival_prior(est);
      estimate_fresh = true;
      rec.estimator_ready = true;
      if (cfg_.telemetry) {
        rec.mhe_kkt = est.kkt_residual;
        rec.mhe_qp_iters = est.qp_iterations;
        rec.mhe_prep_ms = est.prep_seconds * 1e3;
        rec.mhe_fb_ms = est.feedback_seconds * 1e3;
      }
    }
  } else {
    if (!first_fix_) {
      first_fix_ = z;
      est_state_ = model::State{z.x, z.y, 0.0};
    } else if (!have_heading_) {
      const double dx = z.x - first_fix_->x;
      const double dy = z.y - first_fix_->y;
      if (dx != 0.0 || dy != 0.0) {
        est_state_.theta = std::atan2(dy, dx);
        have_heading_ = true;
      }
      est_state_.x = z.x;
      est_state_.y = z.y;
    } else {
      est_state_.x = z.x;
      est_state_.y = z.y;
      est_state_.theta += est_params_.kappa * z.omega * cfg_.dt;
    }
    est_params_.v = std::max(z.v, 0.0);
    estimate_fresh = have_heading_;
  }

  rec.x_hat = est_state_.x;
  rec.y_hat = est_state_.y;
  rec.theta_hat = est_state_.theta;
  rec.v_hat = est_params_.v;
  rec.mu_hat = est_params_.mu;
  rec.kappa_hat = est_params_.kappa;

  const model::ReferencePoint ref = mpc_.path().at_time(t);
  rec.x_ref = ref.x;
  rec.y_ref = ref.y;
  rec.theta_ref = ref.theta;

  // Control: feedback on the fresh estimate; hold the previous command when
  // either solver reported a failure this sample.
  double u = u_prev_;
  model::Params p_ctrl = est_params_;
  if (cfg_.fixed_traction) {
    p_ctrl.mu = 1.0;
    p_ctrl.kappa = 1.0;
  }
  if (estimate_fresh) {
    model::State xi = est_state_;
    // Map the heading estimate onto the reference's 2*pi branch.
    xi.theta += 2.0 * M_PI * std::round((ref.theta - xi.theta) / (2.0 * M_PI));
    ControlResult ctl;
    if (mpc_.prepared()) {
      ctl = mpc_.feedback(xi);
    } else {
      const double u_ref0 =
          mpc_.config().input_reference == InputReference::zero ? 0.0 : z.omega;
      ctl = mpc_.solve(xi, p_ctrl, t, u_ref0);
    }
    rec.mpc_status = static_cast<int>(ctl.status);
    if (ctl.status == rti::SolveStatus::ok) {
      u = ctl.u_apply.omega;
      if (cfg_.telemetry) {
        rec.mpc_kkt = ctl.kkt_residual;
        rec.mpc_qp_iters = ctl.qp_iterations;
        rec.mpc_prep_ms = ctl.prep_seconds * 1e3;
        rec.mpc_fb_ms = ctl.feedback_seconds * 1e3;
      }
    }
  }
  rec.omega_cmd = u;
  u_prev_ = u;
  inject_failure_ = false;

  // Actuate.
  plant_ = sim::step_plant(plant_, u, cfg_.v_cmd, cfg_.dt, cfg_.actuator_tau, rec.mu_true,
                           rec.kappa_true);

  // Preparation phase for the next sample.
  mhe_.push_measurement(t, z, model::Control{u});
  if (static_cast<int>(mhe_.window().buffer.size()) >= mhe_.config().horizon - 1) {
    mhe_.prepare_next();
  }
  if (estimate_fresh) {
    const double u_ref = mpc_.config().input_reference == InputReference::zero ? 0.0 : z.omega;
    mpc_.prepare(t + cfg_.dt, p_ctrl, u_ref);
  }

  ++k_;
  return rec;
}

}  // namespace furrow::nmpc
