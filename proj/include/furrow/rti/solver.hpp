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
#include <vector>

#include "furrow/rti/problem.hpp"
#include "furrow/rti/qp.hpp"

namespace furrow::rti {

/// Gauss-Newton quadratic subproblem produced by the preparation phase.
/// Shooting continuity is eliminated by condensing: z stacks the node-0
/// state step (when free), control steps and the parameter step; state steps
/// are recovered from the stored propagation rows. Nothing in here depends
/// on the fresh data of the current sample.
struct QpSubproblem {
  SolveStatus status = SolveStatus::ok;
  int failed_node = -1;  // set on linearization_failure

  GridDims dims;
  FreshData fresh_mode = FreshData::initial_state;
  int n_free = 0;   // condensed decision variables
  int n_full = 0;   // including the node-0 state columns in initial_state mode

  // Condensed residual model: r(z_full) = r0 + jac * z_full, with the fresh
  // contribution added during feedback.
  Eigen::MatrixXd jac;        // rows x n_full
  Eigen::VectorXd r0;
  Eigen::MatrixXd fresh_map;  // rows(last node) x fresh_dim, newest_residual mode
  int last_residual_offset = 0;

  Eigen::MatrixXd hessian;    // free block of jac^T jac + regularization
  Eigen::VectorXd lower;      // step bounds for the free block
  Eigen::VectorXd upper;

  // Affine state recovery: dx_k = prop[k] * z_full + offset[k].
  std::vector<Eigen::MatrixXd> prop;
  std::vector<Eigen::VectorXd> offset;
  double defect_norm = 0.0;  // infinity norm of the shooting defects

  ShootingGrid guess;  // linearization point
  double prep_seconds = 0.0;
};

/// Result of one feedback phase: the full Gauss-Newton step applied to the
/// linearization point.
struct RtiSolution {
  SolveStatus status = SolveStatus::ok;
  ShootingGrid grid;
  double objective = 0.0;     // 1/2 ||r||^2 at the linearization point
  double kkt_residual = 0.0;  // max(projected gradient, shooting defect)
  int qp_iterations = 0;
  double prep_seconds = 0.0;
  double feedback_seconds = 0.0;
  std::vector<int> param_active;  // bound activity of the parameter block
};

/// Preparation phase: integrate the guess, evaluate residuals/sensitivities,
/// condense. Never touches the sample's fresh data.
QpSubproblem prepare(const ShootingProblem& problem, const ShootingGrid& guess);

/// Feedback phase: embed the fresh data, solve a single QP, take the full
/// Gauss-Newton step. Bounds are QP constraints; the result is never clipped.
RtiSolution feedback(const ShootingProblem& problem, const QpSubproblem& qp,
                     const Eigen::VectorXd& fresh);

/// Warm-start shift: drop node 0, duplicate the last control, integrate the
/// last state forward one interval, carry the parameters over.
ShootingGrid shift_warm_start(const ShootingProblem& problem, const ShootingGrid& solution);

/// Regularization added to the condensed Hessian diagonal.
inline constexpr double kHessianRegularization = 1e-9;

}  // namespace furrow::rti
