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

#include "furrow/nmpc/controller.hpp"

#include <cmath>

#include "furrow/errors.hpp"

namespace furrow::nmpc {

namespace {
constexpr double kTimeTol = 1e-6;
}

MpcProblem::MpcProblem(const MpcConfig& cfg, const MpcWeights& weights,
                       std::vector<model::ReferencePoint> refs, const model::Params& params,
                       double input_ref)
    : cfg_(cfg), weights_(weights), refs_(std::move(refs)), params_(params),
      input_ref_(input_ref) {
  if (static_cast<int>(refs_.size()) != cfg_.horizon) {
    throw ConfigError("nmpc: reference window must have horizon entries");
  }
  if (!weights_.valid() || cfg_.horizon < 2 || cfg_.omega_bound <= 0.0) {
    throw ConfigError("nmpc: invalid weights or configuration");
  }
  if (!params_.valid()) {
    throw ConfigError("nmpc: parameter estimate outside its bounds");
  }
}

rti::GridDims MpcProblem::dims() const {
  rti::GridDims d;
  d.intervals = cfg_.horizon;
  d.nx = 3;
  d.nu = 1;
  d.np = 0;
  return d;
}

void MpcProblem::integrate(int /*k*/, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& /*p*/, Eigen::VectorXd& x_next,
                           Eigen::MatrixXd& a, Eigen::MatrixXd& b,
                           Eigen::MatrixXd& /*c*/) const {
  Eigen::Matrix3d aa, cc;
  Eigen::Vector3d bb;
  const model::State next = model::integrate_step_sensitivity(
      model::State::from_vec(x), model::Control{u[0]}, params_, cfg_.dt, aa, bb, cc);
  x_next = next.vec();
  a = aa;
  b = bb;
}

int MpcProblem::residual_dim(int node) const {
  if (node == 0) return 1;                 // input cost only; the state is pinned
  if (node == cfg_.horizon) return 3;      // terminal penalty
  return 4;                                // stage state + input costs
}

void MpcProblem::residual(int node, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& /*p*/, Eigen::VectorXd& r, Eigen::MatrixXd& jx,
                          Eigen::MatrixXd& ju, Eigen::MatrixXd& /*jp*/) const {
  int row = 0;
  if (node > 0) {
    const Eigen::Vector3d q =
        (node == cfg_.horizon ? weights_.terminal : weights_.stage).cwiseSqrt();
    const model::ReferencePoint& ref = refs_[node - 1];
    const Eigen::Vector3d target{ref.x, ref.y, ref.theta};
    for (int i = 0; i < 3; ++i) {
      r[row] = q[i] * (x[i] - target[i]);
      jx(row, i) = q[i];
      ++row;
    }
  }
  if (node < cfg_.horizon) {
    const double w = std::sqrt(weights_.input);
    r[row] = w * (u[0] - input_ref_);
    ju(row, 0) = w;
  }
}

void MpcProblem::control_bounds(int /*k*/, Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
  lo[0] = -cfg_.omega_bound;
  hi[0] = cfg_.omega_bound;
}

Controller::Controller(const MpcConfig& cfg, const MpcWeights& weights, ReferenceTrajectory path)
    : cfg_(cfg), weights_(weights), path_(std::move(path)) {
  if (cfg_.horizon < 2) {
    throw ConfigError("nmpc: horizon must be at least 2");
  }
  if (std::abs(path_.dt() - cfg_.dt) > kTimeTol) {
    throw ConfigError("nmpc: reference sampling must match the controller period");
  }
}

rti::ShootingGrid Controller::initial_grid(const std::vector<model::ReferencePoint>& refs) const {
  auto grid = rti::ShootingGrid::zero(MpcProblem(cfg_, weights_, refs, model::Params{0, 1, 1}, 0)
                                          .dims());
  // Seed the nodes on the reference itself.
  grid.states[0] << refs[0].x, refs[0].y, refs[0].theta;
  for (int k = 1; k <= cfg_.horizon; ++k) {
    grid.states[k] << refs[k - 1].x, refs[k - 1].y, refs[k - 1].theta;
  }
  return grid;
}

ControlResult Controller::package(const rti::RtiSolution& sol) {
  ControlResult res;
  res.status = sol.status;
  res.prep_seconds = sol.prep_seconds;
  res.feedback_seconds = sol.feedback_seconds;
  if (sol.status != rti::SolveStatus::ok) {
    return res;
  }
  res.u_apply = model::Control{sol.grid.controls[0][0]};
  res.predicted.reserve(sol.grid.states.size());
  for (const auto& s : sol.grid.states) {
    res.predicted.push_back(model::State::from_vec(s));
  }
  res.objective = sol.objective;
  res.kkt_residual = sol.kkt_residual;
  res.qp_iterations = sol.qp_iterations;
  res.bound_active = std::abs(std::abs(res.u_apply.omega) - cfg_.omega_bound) == 0.0;
  warm_ = sol.grid;
  return res;
}

void Controller::prepare(double t, const model::Params& p_hat, double input_ref) {
  auto refs = path_.window(t, cfg_.horizon);
  const double u_ref = cfg_.input_reference == InputReference::zero ? 0.0 : input_ref;

  if (warm_ && std::abs(t - (last_prepared_t_ + cfg_.dt)) < kTimeTol) {
    // Shift against the previous problem's dynamics (parameters may differ
    // slightly; the shift only seeds the linearization point).
    MpcProblem shift_problem(cfg_, weights_, refs, p_hat, u_ref);
    warm_ = rti::shift_warm_start(shift_problem, *warm_);
  } else if (warm_ && std::abs(t - last_prepared_t_) > kTimeTol) {
    warm_.reset();
  }
  if (!warm_) {
    warm_ = initial_grid(refs);
  }

  // Keep the heading column of the reference on the same 2*pi branch as the
  // current linearization point.
  const double anchor = (*warm_).states[0][2];
  const double shift = 2.0 * M_PI * std::round((anchor - refs[0].theta) / (2.0 * M_PI));
  if (shift != 0.0) {
    for (auto& ref : refs) {
      ref.theta += shift;
    }
  }

  problem_.emplace(cfg_, weights_, refs, p_hat, u_ref);
  qp_ = rti::prepare(*problem_, *warm_);
  last_prepared_t_ = t;
}

ControlResult Controller::feedback(const model::State& xi_hat) {
  if (!qp_ || !problem_) {
    throw ConfigError("nmpc: feedback without a prepared subproblem");
  }
  const auto sol = rti::feedback(*problem_, *qp_, xi_hat.vec());
  qp_.reset();
  return package(sol);
}

ControlResult Controller::solve(const model::State& xi_hat, const model::Params& p_hat, double t,
                                double input_ref) {
  prepare(t, p_hat, input_ref);
  return feedback(xi_hat);
}

}  // namespace furrow::nmpc
