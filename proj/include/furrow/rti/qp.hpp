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

namespace furrow::rti {

enum class SolveStatus {
  ok,
  linearization_failure,  // non-finite residual/Jacobian during prepare
  infeasible,             // inconsistent bounds (lower > upper)
  iteration_limit,        // active-set iteration budget exhausted
};

/// Dense convex QP with elementwise bounds:
///   min 1/2 x^T H x + g^T x   s.t.  lo <= x <= hi
/// H must be symmetric positive definite (the RTI condensing adds a small
/// regularization before handing the problem over). Unbounded components
/// use +/- infinity.
struct BoxQp {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct BoxQpResult {
  Eigen::VectorXd x;
  std::vector<int> active;  // per variable: -1 at lower, +1 at upper, 0 free
  int iterations = 0;
  SolveStatus status = SolveStatus::ok;
};

/// Primal active-set solver. Deterministic: the blocking bound closest along
/// the step direction enters the working set (smallest index on ties) and the
/// most negative multiplier leaves it. Bound components of the solution are
/// exact, not clipped.
BoxQpResult solve_qp(const BoxQp& qp, int max_iterations = 0);

/// Infinity norm of the projected-gradient KKT residual at x.
double qp_kkt_residual(const BoxQp& qp, const Eigen::VectorXd& x);

}  // namespace furrow::rti
