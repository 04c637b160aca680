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

#include "furrow/nmhe/estimator.hpp"

#include <cmath>

#include "furrow/errors.hpp"

namespace furrow::nmhe {

namespace {
constexpr double kTimeTol = 1e-6;
}

MheProblem::MheProblem(const MheConfig& cfg, const EstimationWindow& window) : cfg_(cfg) {
  if (!cfg.weights.valid()) {
    throw ConfigError("nmhe: weighting sigmas must be positive");
  }
  if (static_cast<int>(window.buffer.size()) != cfg.horizon - 1) {
    throw ConfigError("nmhe: problem construction needs horizon-1 known samples");
  }
  known_outputs_.reserve(window.buffer.size());
  for (const auto& s : window.buffer) {
    known_outputs_.push_back(s.z.vec());
  }
  prior_state_ = window.prior_state.vec();
  prior_params_ = window.prior_params.vec();
}

rti::GridDims MheProblem::dims() const {
  rti::GridDims d;
  d.intervals = cfg_.horizon - 1;
  d.nx = 3;
  d.nu = 1;
  d.np = 3;
  d.control_at_last_node = true;
  return d;
}

void MheProblem::integrate(int /*k*/, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& p, Eigen::VectorXd& x_next, Eigen::MatrixXd& a,
                           Eigen::MatrixXd& b, Eigen::MatrixXd& c) const {
  Eigen::Matrix3d aa, cc;
  Eigen::Vector3d bb;
  const model::State next = model::integrate_step_sensitivity(
      model::State::from_vec(x), model::Control{u[0]}, model::Params::from_vec(p), cfg_.dt, aa,
      bb, cc);
  x_next = next.vec();
  a = aa;
  b = bb;
  c = cc;
}

int MheProblem::residual_dim(int node) const { return node == 0 ? 10 : 4; }

void MheProblem::residual(int node, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& jx,
                          Eigen::MatrixXd& ju, Eigen::MatrixXd& jp) const {
  const Eigen::Vector4d w = cfg_.weights.output_sigma.cwiseInverse();
  const int base = node == 0 ? 6 : 0;

  if (node == 0) {
    // Arrival cost on the window-head state and the parameter block.
    const Eigen::Matrix<double, 6, 1> aw = cfg_.weights.arrival_sigma.cwiseInverse();
    for (int i = 0; i < 3; ++i) {
      r[i] = aw[i] * (x[i] - prior_state_[i]);
      jx(i, i) = aw[i];
    }
    for (int i = 0; i < 3; ++i) {
      r[3 + i] = aw[3 + i] * (p[i] - prior_params_[i]);
      jp(3 + i, i) = aw[3 + i];
    }
  }

  // Output residual (x, y, v, omega). The newest node's measurement is the
  // fresh data: its rows are evaluated here as if that vector were zero.
  const bool newest = node == cfg_.horizon - 1;
  const Eigen::Vector4d z = newest ? Eigen::Vector4d::Zero() : known_outputs_[node];
  r[base + 0] = w[0] * (x[0] - z[0]);
  r[base + 1] = w[1] * (x[1] - z[1]);
  r[base + 2] = w[2] * (p[0] - z[2]);
  r[base + 3] = w[3] * (u[0] - z[3]);
  jx(base + 0, 0) = w[0];
  jx(base + 1, 1) = w[1];
  jp(base + 2, 0) = w[2];
  ju(base + 3, 0) = w[3];
}

Eigen::MatrixXd MheProblem::fresh_residual_map() const {
  const Eigen::Vector4d w = cfg_.weights.output_sigma.cwiseInverse();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
  d.diagonal() = -w;
  return d;
}

void MheProblem::param_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
  lo[0] = 0.0;
  hi[0] = cfg_.max_speed;
  lo[1] = 0.0;
  hi[1] = 1.0;
  lo[2] = 0.0;
  hi[2] = 1.0;
}

MovingHorizonEstimator::MovingHorizonEstimator(const MheConfig& cfg) : cfg_(cfg) {
  if (cfg.horizon < 2) {
    throw ConfigError("nmhe: horizon must be at least 2 samples");
  }
  if (cfg.dt <= 0.0) {
    throw ConfigError("nmhe: dt must be positive");
  }
  window_.horizon = cfg.horizon;
  window_.dt = cfg.dt;
  window_.prior_params = model::Params{0.0, cfg.initial_traction, cfg.initial_traction};
}

void MovingHorizonEstimator::push_measurement(double t, const model::Measurement& z,
                                              const model::Control& u) {
  Sample s{t, z, u};
  if (!window_.buffer.empty()) {
    const double gap = t - window_.buffer.back().t;
    if (gap <= 0.0) {
      throw SequencingError("nmhe: non-monotone measurement timestamp");
    }
    if (std::abs(gap - cfg_.dt) > kTimeTol) {
      throw SequencingError("nmhe: window timestamps must be equispaced at dt");
    }
    if (!z.valid_gnss) {
      // Dropout: keep the held position actually stored last.
      s.z.x = window_.buffer.back().z.x;
      s.z.y = window_.buffer.back().z.y;
    }
  }
  window_.buffer.push_back(s);
  while (static_cast<int>(window_.buffer.size()) > cfg_.horizon) {
    window_.buffer.pop_front();
  }
}

rti::ShootingGrid MovingHorizonEstimator::initial_grid(const std::vector<Sample>& known,
                                                       double pending_t) const {
  rti::GridDims dims;
  dims.intervals = cfg_.horizon - 1;
  dims.nx = 3;
  dims.nu = 1;
  dims.np = 3;
  dims.control_at_last_node = true;
  auto grid = rti::ShootingGrid::zero(dims);

  const int n_known = static_cast<int>(known.size());
  double v_sum = 0.0;
  for (int i = 0; i < cfg_.horizon; ++i) {
    const Sample& s = known[std::min(i, n_known - 1)];
    grid.states[i][0] = s.z.x;
    grid.states[i][1] = s.z.y;
    grid.controls[i][0] = s.u.omega;
    v_sum += s.z.v;
  }
  // Headings from consecutive position fixes, unwrapped.
  double prev = 0.0;
  for (int i = 0; i < cfg_.horizon; ++i) {
    const int a = std::min(i, cfg_.horizon - 2);
    const double dx = grid.states[a + 1][0] - grid.states[a][0];
    const double dy = grid.states[a + 1][1] - grid.states[a][1];
    double th = (dx == 0.0 && dy == 0.0) ? prev : std::atan2(dy, dx);
    if (i > 0) {
      th += 2.0 * M_PI * std::round((prev - th) / (2.0 * M_PI));
    }
    grid.states[i][2] = th;
    prev = th;
  }
  grid.params << std::max(v_sum / cfg_.horizon, 0.0), cfg_.initial_traction,
      cfg_.initial_traction;
  (void)pending_t;
  return grid;
}

EstimateResult MovingHorizonEstimator::package(const rti::RtiSolution& sol) {
  EstimateResult r;
  r.status = sol.status;
  if (sol.status != rti::SolveStatus::ok) {
    return r;
  }
  const int last = static_cast<int>(sol.grid.states.size()) - 1;
  r.state = model::State::from_vec(sol.grid.states[last]);
  r.params = model::Params::from_vec(sol.grid.params);
  r.window_states.reserve(sol.grid.states.size());
  for (const auto& s : sol.grid.states) {
    r.window_states.push_back(model::State::from_vec(s));
  }
  r.window_controls.reserve(sol.grid.controls.size());
  for (const auto& u : sol.grid.controls) {
    r.window_controls.push_back(u[0]);
  }
  r.objective = sol.objective;
  r.kkt_residual = sol.kkt_residual;
  r.qp_iterations = sol.qp_iterations;
  if (!sol.param_active.empty()) {
    r.mu_at_bound = sol.param_active[1] != 0;
    r.kappa_at_bound = sol.param_active[2] != 0;
  }
  r.prep_seconds = sol.prep_seconds;
  r.feedback_seconds = sol.feedback_seconds;
  warm_ = sol.grid;
  return r;
}

EstimateResult MovingHorizonEstimator::run_step(const std::vector<Sample>& known,
                                                double pending_t,
                                                const model::Measurement& newest) {
  EstimationWindow view = window_;
  view.buffer.assign(known.begin(), known.end());
  if (!prior_initialized_) {
    // Prior from the first fix; heading from the first two positions.
    const auto g = initial_grid(known, pending_t);
    window_.prior_state = model::State::from_vec(g.states[0]);
    window_.prior_params = model::Params::from_vec(g.params);
    view.prior_state = window_.prior_state;
    view.prior_params = window_.prior_params;
    prior_initialized_ = true;
  }
  MheProblem problem(cfg_, view);
  const rti::ShootingGrid guess = warm_ ? *warm_ : initial_grid(known, pending_t);
  const auto qp = rti::prepare(problem, guess);
  const auto sol = rti::feedback(problem, qp, newest.vec());
  return package(sol);
}

EstimateResult MovingHorizonEstimator::solve() {
  if (!window_.full()) {
    throw ConfigError("nmhe: solve requires a full window");
  }
  std::vector<Sample> known(window_.buffer.begin(), window_.buffer.end() - 1);
  const Sample& newest = window_.buffer.back();

  // Reuse the previous solution when the window advanced by exactly one
  // sample since it was produced.
  if (warm_ && std::abs(newest.t - (last_prepared_t_ + cfg_.dt)) < kTimeTol) {
    warm_ = rti::shift_warm_start(MheProblem(cfg_, [&] {
                                    EstimationWindow v = window_;
                                    v.buffer.assign(known.begin(), known.end());
                                    return v;
                                  }()),
                                  *warm_);
  } else if (warm_ && std::abs(newest.t - last_prepared_t_) > kTimeTol) {
    warm_.reset();
  }
  last_prepared_t_ = newest.t;
  return run_step(known, newest.t, newest.z);
}

void MovingHorizonEstimator::prepare_next() {
  if (static_cast<int>(window_.buffer.size()) < cfg_.horizon - 1) {
    throw ConfigError("nmhe: prepare_next requires at least horizon-1 samples");
  }
  std::vector<Sample> known(window_.buffer.end() - (cfg_.horizon - 1), window_.buffer.end());
  const double pending_t = known.back().t + cfg_.dt;

  EstimationWindow view = window_;
  view.buffer.assign(known.begin(), known.end());
  if (!prior_initialized_) {
    const auto g = initial_grid(known, pending_t);
    window_.prior_state = model::State::from_vec(g.states[0]);
    window_.prior_params = model::Params::from_vec(g.params);
    view.prior_state = window_.prior_state;
    view.prior_params = window_.prior_params;
    prior_initialized_ = true;
  }
  problem_.emplace(cfg_, view);
  if (warm_ && std::abs(pending_t - (last_prepared_t_ + cfg_.dt)) < kTimeTol) {
    warm_ = rti::shift_warm_start(*problem_, *warm_);
  } else if (warm_ && std::abs(pending_t - last_prepared_t_) > kTimeTol) {
    warm_.reset();
  }
  if (!warm_) {
    warm_ = initial_grid(known, pending_t);
  }
  qp_ = rti::prepare(*problem_, *warm_);
  last_prepared_t_ = pending_t;
}

EstimateResult MovingHorizonEstimator::feedback(const model::Measurement& newest) {
  if (!qp_ || !problem_) {
    throw ConfigError("nmhe: feedback without a prepared subproblem");
  }
  const auto sol = rti::feedback(*problem_, *qp_, newest.vec());
  qp_.reset();
  return package(sol);
}

void MovingHorizonEstimator::set_prior(const model::State& state, const model::Params& params) {
  window_.prior_state = state;
  window_.prior_params = params;
  prior_initialized_ = true;
}

void MovingHorizonEstimator::update_arrival_prior(const EstimateResult& r) {
  if (r.status != rti::SolveStatus::ok || r.window_states.size() < 2) {
    return;
  }
  window_.prior_state = r.window_states[1];
  window_.prior_params = r.params;
}

}  // namespace furrow::nmhe
