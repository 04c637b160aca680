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
#include <limits>
#include <vector>

namespace furrow::rti {

/// Variable layout of a multiple-shooting grid.
struct GridDims {
  int intervals = 0;                  // N shooting intervals
  int nx = 0;                         // state dimension
  int nu = 0;                         // control dimension
  int np = 0;                         // global parameter block (0 if none)
  bool control_at_last_node = false;  // estimation grids carry a control on the final node

  int nodes() const { return intervals + 1; }
  int controls() const { return intervals + (control_at_last_node ? 1 : 0); }
};

/// Decision-variable iterate over the shooting grid: one state per node, one
/// control per interval (plus optionally the last node), one parameter block.
struct ShootingGrid {
  GridDims dims;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> controls;
  Eigen::VectorXd params;

  static ShootingGrid zero(const GridDims& dims);
  bool consistent() const;
};

/// How the per-sample fresh data enters the feedback phase.
enum class FreshData {
  initial_state,    // node-0 state pinned to the fresh vector (control problems)
  newest_residual,  // fresh vector enters the last node's residual (estimation)
};

/// Nonlinear least-squares problem over a shooting grid:
///
///   min 1/2 sum_k || r_k(x_k, u_k, p) ||^2
///   s.t. x_{k+1} = F_k(x_k, u_k, p)        (shooting continuity)
///        bounds on controls and parameters
///
/// Residuals are weighted by the problem itself (W^{1/2} folded in). The
/// Jacobians of r_k must not depend on the fresh data so the preparation
/// phase can linearize everything before the data exists.
class ShootingProblem {
 public:
  virtual ~ShootingProblem() = default;

  virtual GridDims dims() const = 0;
  virtual FreshData fresh_mode() const = 0;
  virtual int fresh_dim() const = 0;

  /// Integrates interval k and its sensitivities: x_next = F_k(x, u, p),
  /// a = dF/dx, b = dF/du, c = dF/dp.
  virtual void integrate(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& p, Eigen::VectorXd& x_next, Eigen::MatrixXd& a,
                         Eigen::MatrixXd& b, Eigen::MatrixXd& c) const = 0;

  virtual int residual_dim(int node) const = 0;

  /// Weighted residual and Jacobians at a node. For nodes without a control
  /// variable u is empty and ju must be left with zero columns untouched.
  virtual void residual(int node, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& jx,
                        Eigen::MatrixXd& ju, Eigen::MatrixXd& jp) const = 0;

  /// newest_residual mode: linear map D with r_last += D * fresh.
  virtual Eigen::MatrixXd fresh_residual_map() const { return {}; }

  /// Absolute bounds on the control at interval k. Default unbounded.
  virtual void control_bounds(int /*k*/, Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
    lo.setConstant(-std::numeric_limits<double>::infinity());
    hi.setConstant(std::numeric_limits<double>::infinity());
  }

  /// Absolute bounds on the parameter block. Default unbounded.
  virtual void param_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
    lo.setConstant(-std::numeric_limits<double>::infinity());
    hi.setConstant(std::numeric_limits<double>::infinity());
  }
};

}  // namespace furrow::rti
