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

#include <optional>
#include <vector>

#include "furrow/model/model.hpp"
#include "furrow/nmpc/reference.hpp"
#include "furrow/rti/solver.hpp"

namespace furrow::nmpc {

struct MpcWeights {
  Eigen::Vector3d stage{1.0, 1.0, 1.0};      // Q_k diagonal
  double input = 1.0;                        // R
  Eigen::Vector3d terminal{10.0, 10.0, 10.0};  // Q_N diagonal

  bool valid() const {
    return (stage.array() >= 0.0).all() && input >= 0.0 && (terminal.array() >= 0.0).all();
  }
};

enum class InputReference {
  zero,           // penalize the raw input, as in the nominal formulation
  last_measured,  // penalize deviation from the recent measured yaw rate
};

struct MpcConfig {
  int horizon = 20;  // N_c in samples
  double dt = 0.2;
  double omega_bound = 0.1;  // [rad/s]
  InputReference input_reference = InputReference::last_measured;
};

struct ControlResult {
  rti::SolveStatus status = rti::SolveStatus::ok;
  model::Control u_apply;
  std::vector<model::State> predicted;  // horizon + 1 states, first equals the estimate
  double objective = 0.0;
  double kkt_residual = 0.0;
  int qp_iterations = 0;
  bool bound_active = false;
  double prep_seconds = 0.0;
  double feedback_seconds = 0.0;
};

/// Tracking problem over the prediction horizon: yaw-rate inputs under a box
/// bound, with the state estimate embedded as the fixed initial node.
class MpcProblem : public rti::ShootingProblem {
 public:
  MpcProblem(const MpcConfig& cfg, const MpcWeights& weights,
             std::vector<model::ReferencePoint> refs, const model::Params& params,
             double input_ref);

  rti::GridDims dims() const override;
  rti::FreshData fresh_mode() const override { return rti::FreshData::initial_state; }
  int fresh_dim() const override { return 3; }
  void integrate(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                 const Eigen::VectorXd& p, Eigen::VectorXd& x_next, Eigen::MatrixXd& a,
                 Eigen::MatrixXd& b, Eigen::MatrixXd& c) const override;
  int residual_dim(int node) const override;
  void residual(int node, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& jx,
                Eigen::MatrixXd& ju, Eigen::MatrixXd& jp) const override;
  void control_bounds(int k, Eigen::VectorXd& lo, Eigen::VectorXd& hi) const override;

  const std::vector<model::ReferencePoint>& refs() const { return refs_; }

 private:
  MpcConfig cfg_;
  MpcWeights weights_;
  std::vector<model::ReferencePoint> refs_;  // nodes 1..N_c
  model::Params params_;
  double input_ref_ = 0.0;
};

/// Receding-horizon controller with the preparation/feedback split. The
/// applied command is the first element of the optimal input sequence.
class Controller {
 public:
  Controller(const MpcConfig& cfg, const MpcWeights& weights, ReferenceTrajectory path);

  /// Linearize for the sample at time t using the current parameter estimate
  /// and input reference; runs before the state estimate exists.
  void prepare(double t, const model::Params& p_hat, double input_ref);
  bool prepared() const { return qp_.has_value(); }

  /// Solve the prepared QP with the fresh state estimate.
  ControlResult feedback(const model::State& xi_hat);

  /// Convenience: prepare + feedback in one call.
  ControlResult solve(const model::State& xi_hat, const model::Params& p_hat, double t,
                      double input_ref);

  const ReferenceTrajectory& path() const { return path_; }
  const MpcConfig& config() const { return cfg_; }

 private:
  rti::ShootingGrid initial_grid(const std::vector<model::ReferencePoint>& refs) const;
  ControlResult package(const rti::RtiSolution& sol);

  MpcConfig cfg_;
  MpcWeights weights_;
  ReferenceTrajectory path_;
  std::optional<MpcProblem> problem_;
  std::optional<rti::QpSubproblem> qp_;
  std::optional<rti::ShootingGrid> warm_;
  double last_prepared_t_ = 0.0;
};

}  // namespace furrow::nmpc
