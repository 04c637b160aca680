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

#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "furrow/model/model.hpp"
#include "furrow/rti/solver.hpp"

namespace furrow::nmhe {

/// Output and arrival weights, stored as the standard deviations whose
/// inverse squares form the diagonal weighting matrices. Output order
/// (x, y, v, omega); arrival order (x, y, theta, v, mu, kappa).
struct MheWeights {
  Eigen::Vector4d output_sigma{0.03, 0.03, 0.5, 0.35};
  Eigen::Matrix<double, 6, 1> arrival_sigma{10.0, 10.0, 0.1, 1.0, 0.25, 0.25};

  bool valid() const {
    return (output_sigma.array() > 0.0).all() && (arrival_sigma.array() > 0.0).all();
  }
};

struct MheConfig {
  int horizon = 30;  // window length N_e in samples
  double dt = 0.2;
  MheWeights weights;
  double initial_traction = 0.75;  // mu/kappa prior before any solve
  double max_speed = std::numeric_limits<double>::infinity();  // upper bound on v estimate
};

/// One buffered sample: measurement plus the commanded yaw rate, used only
/// as the warm-start guess for the estimated input trajectory.
struct Sample {
  double t = 0.0;
  model::Measurement z;
  model::Control u;
};

/// Sliding buffer plus the arrival-cost prior at the window head.
struct EstimationWindow {
  int horizon = 30;
  double dt = 0.2;
  std::deque<Sample> buffer;
  model::State prior_state;
  model::Params prior_params{0.0, 0.75, 0.75};

  bool full() const { return static_cast<int>(buffer.size()) >= horizon; }
};

struct EstimateResult {
  rti::SolveStatus status = rti::SolveStatus::ok;
  model::State state;   // estimate at the newest node
  model::Params params; // (v, mu, kappa) over the window
  std::vector<model::State> window_states;
  std::vector<double> window_controls;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int qp_iterations = 0;
  bool mu_at_bound = false;
  bool kappa_at_bound = false;
  double prep_seconds = 0.0;
  double feedback_seconds = 0.0;
};

/// Estimation NLP over the window: node states, one yaw-rate input per node
/// and a window-constant (v, mu, kappa) block with 0 <= mu, kappa <= 1.
/// The newest node's measurement is the fresh data of the feedback phase.
class MheProblem : public rti::ShootingProblem {
 public:
  MheProblem(const MheConfig& cfg, const EstimationWindow& window);

  rti::GridDims dims() const override;
  rti::FreshData fresh_mode() const override { return rti::FreshData::newest_residual; }
  int fresh_dim() const override { return 4; }
  void integrate(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                 const Eigen::VectorXd& p, Eigen::VectorXd& x_next, Eigen::MatrixXd& a,
                 Eigen::MatrixXd& b, Eigen::MatrixXd& c) const override;
  int residual_dim(int node) const override;
  void residual(int node, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& jx,
                Eigen::MatrixXd& ju, Eigen::MatrixXd& jp) const override;
  Eigen::MatrixXd fresh_residual_map() const override;
  void param_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const override;

 private:
  MheConfig cfg_;
  std::vector<Eigen::Vector4d> known_outputs_;  // horizon-1 known measurement vectors
  Eigen::Vector3d prior_state_;
  Eigen::Vector3d prior_params_;
};

/// Moving horizon estimator with the real-time-iteration pipeline split.
///
/// Offline use: push_measurement() until the window is full, then solve().
/// Closed-loop use: after each sample k, push_measurement(k) and
/// prepare_next(); at sample k+1 call feedback(z) before pushing it.
class MovingHorizonEstimator {
 public:
  explicit MovingHorizonEstimator(const MheConfig& cfg);

  /// Appends a sample; evicts the oldest when the buffer holds N_e.
  /// Holds the previous stored (x, y) when z.valid_gnss is false.
  /// Throws SequencingError on a non-monotone or non-equispaced timestamp.
  void push_measurement(double t, const model::Measurement& z, const model::Control& u);

  bool window_full() const { return window_.full(); }
  const EstimationWindow& window() const { return window_; }

  /// One RTI step (prepare + feedback) on the full window.
  EstimateResult solve();

  /// Builds the QP for the window advanced by one pending sample.
  void prepare_next();
  bool prepared() const { return qp_.has_value(); }

  /// Completes the prepared step with the fresh measurement of the pending
  /// sample. The caller pushes that sample afterwards.
  EstimateResult feedback(const model::Measurement& newest);

  /// Shifts the arrival-cost prior to the node that becomes the next window
  /// head (the previous solve's node-1 estimate).
  void update_arrival_prior(const EstimateResult& r);

  /// Overrides the arrival-cost prior (otherwise initialized from the first
  /// fix, with the heading taken from the first two positions).
  void set_prior(const model::State& state, const model::Params& params);

  const MheConfig& config() const { return cfg_; }

 private:
  EstimateResult run_step(const std::vector<Sample>& known, double pending_t,
                          const model::Measurement& newest);
  rti::ShootingGrid initial_grid(const std::vector<Sample>& known, double pending_t) const;
  EstimateResult package(const rti::RtiSolution& sol);

  MheConfig cfg_;
  EstimationWindow window_;
  std::optional<rti::ShootingGrid> warm_;  // solution grid of the previous step
  std::optional<MheProblem> problem_;      // problem of the prepared pending window
  std::optional<rti::QpSubproblem> qp_;
  double last_prepared_t_ = 0.0;
  bool prior_initialized_ = false;
};

}  // namespace furrow::nmhe
