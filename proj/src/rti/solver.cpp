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

#include "furrow/rti/solver.hpp"

#include <chrono>
#include <cmath>

#include "furrow/errors.hpp"

namespace furrow::rti {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ShootingGrid ShootingGrid::zero(const GridDims& dims) {
  ShootingGrid g;
  g.dims = dims;
  g.states.assign(dims.nodes(), Eigen::VectorXd::Zero(dims.nx));
  g.controls.assign(dims.controls(), Eigen::VectorXd::Zero(dims.nu));
  g.params = Eigen::VectorXd::Zero(dims.np);
  return g;
}

bool ShootingGrid::consistent() const {
  if (static_cast<int>(states.size()) != dims.nodes()) return false;
  if (static_cast<int>(controls.size()) != dims.controls()) return false;
  if (params.size() != dims.np) return false;
  for (const auto& s : states) {
    if (s.size() != dims.nx) return false;
  }
  for (const auto& u : controls) {
    if (u.size() != dims.nu) return false;
  }
  return true;
}

QpSubproblem prepare(const ShootingProblem& problem, const ShootingGrid& guess) {
  const auto t0 = std::chrono::steady_clock::now();
  const GridDims dims = problem.dims();
  if (!guess.consistent() || guess.dims.intervals != dims.intervals ||
      guess.dims.nx != dims.nx || guess.dims.nu != dims.nu || guess.dims.np != dims.np) {
    throw ConfigError("rti::prepare: guess does not match problem dimensions");
  }

  QpSubproblem qp;
  qp.dims = dims;
  qp.fresh_mode = problem.fresh_mode();
  qp.guess = guess;

  const int nx = dims.nx;
  const int nu = dims.nu;
  const int np = dims.np;
  const int nc = dims.controls();
  qp.n_full = nx + nc * nu + np;
  qp.n_free = qp.fresh_mode == FreshData::initial_state ? qp.n_full - nx : qp.n_full;
  const int free_begin = qp.n_full - qp.n_free;
  const auto ucol = [&](int k) { return nx + k * nu; };
  const int pcol = nx + nc * nu;

  // Forward propagation of the linearized dynamics through the grid.
  qp.prop.assign(dims.nodes(), Eigen::MatrixXd::Zero(nx, qp.n_full));
  qp.offset.assign(dims.nodes(), Eigen::VectorXd::Zero(nx));
  qp.prop[0].leftCols(nx) = Eigen::MatrixXd::Identity(nx, nx);

  Eigen::VectorXd x_next(nx);
  Eigen::MatrixXd a(nx, nx), b(nx, nu), c(nx, np);
  qp.defect_norm = 0.0;
  for (int k = 0; k < dims.intervals; ++k) {
    problem.integrate(k, guess.states[k], guess.controls[k], guess.params, x_next, a, b, c);
    const Eigen::VectorXd defect = x_next - guess.states[k + 1];
    if (!defect.allFinite() || !a.allFinite() || !b.allFinite() || (np > 0 && !c.allFinite())) {
      qp.status = SolveStatus::linearization_failure;
      qp.failed_node = k;
      return qp;
    }
    qp.defect_norm = std::max(qp.defect_norm, defect.lpNorm<Eigen::Infinity>());
    qp.prop[k + 1] = a * qp.prop[k];
    qp.prop[k + 1].middleCols(ucol(k), nu) += b;
    if (np > 0) {
      qp.prop[k + 1].rightCols(np) += c;
    }
    qp.offset[k + 1] = a * qp.offset[k] + defect;
  }

  // Stack the condensed residual rows.
  int rows = 0;
  for (int node = 0; node < dims.nodes(); ++node) {
    rows += problem.residual_dim(node);
  }
  qp.jac = Eigen::MatrixXd::Zero(rows, qp.n_full);
  qp.r0 = Eigen::VectorXd::Zero(rows);

  int row = 0;
  const Eigen::VectorXd no_control;
  for (int node = 0; node < dims.nodes(); ++node) {
    const int m = problem.residual_dim(node);
    if (m == 0) continue;
    const bool has_control = node < nc;
    Eigen::VectorXd r(m);
    Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(m, nx);
    Eigen::MatrixXd ju = Eigen::MatrixXd::Zero(m, nu);
    Eigen::MatrixXd jp = Eigen::MatrixXd::Zero(m, np);
    problem.residual(node, guess.states[node], has_control ? guess.controls[node] : no_control,
                     guess.params, r, jx, ju, jp);
    if (!r.allFinite() || !jx.allFinite()) {
      qp.status = SolveStatus::linearization_failure;
      qp.failed_node = node;
      return qp;
    }
    qp.jac.middleRows(row, m) = jx * qp.prop[node];
    if (has_control) {
      qp.jac.block(row, ucol(node), m, nu) += ju;
    }
    if (np > 0) {
      qp.jac.block(row, pcol, m, np) += jp;
    }
    qp.r0.segment(row, m) = r + jx * qp.offset[node];
    if (node == dims.nodes() - 1) {
      qp.last_residual_offset = row;
    }
    row += m;
  }

  if (qp.fresh_mode == FreshData::newest_residual) {
    qp.fresh_map = problem.fresh_residual_map();
  }

  // Condensed Gauss-Newton Hessian over the free block.
  const Eigen::MatrixXd jac_free = qp.jac.rightCols(qp.n_free);
  qp.hessian = jac_free.transpose() * jac_free;
  qp.hessian.diagonal().array() += kHessianRegularization;

  // Step bounds relative to the linearization point.
  qp.lower = Eigen::VectorXd::Constant(qp.n_free, -std::numeric_limits<double>::infinity());
  qp.upper = Eigen::VectorXd::Constant(qp.n_free, std::numeric_limits<double>::infinity());
  Eigen::VectorXd lo_u(nu), hi_u(nu);
  for (int k = 0; k < nc; ++k) {
    problem.control_bounds(k, lo_u, hi_u);
    const int col = ucol(k) - free_begin;
    qp.lower.segment(col, nu) = lo_u - guess.controls[k];
    qp.upper.segment(col, nu) = hi_u - guess.controls[k];
  }
  if (np > 0) {
    Eigen::VectorXd lo_p(np), hi_p(np);
    problem.param_bounds(lo_p, hi_p);
    qp.lower.tail(np) = lo_p - guess.params;
    qp.upper.tail(np) = hi_p - guess.params;
  }

  qp.prep_seconds = seconds_since(t0);
  return qp;
}

RtiSolution feedback(const ShootingProblem& problem, const QpSubproblem& qp,
                     const Eigen::VectorXd& fresh) {
  const auto t0 = std::chrono::steady_clock::now();
  RtiSolution sol;
  sol.grid = qp.guess;
  sol.prep_seconds = qp.prep_seconds;
  if (qp.status != SolveStatus::ok) {
    sol.status = qp.status;
    return sol;
  }
  if (fresh.size() != problem.fresh_dim()) {
    throw ConfigError("rti::feedback: fresh data dimension mismatch");
  }

  const GridDims& dims = qp.dims;
  const int nx = dims.nx;
  const int nu = dims.nu;
  const int np = dims.np;
  const int nc = dims.controls();
  const int free_begin = qp.n_full - qp.n_free;

  // Embed the fresh data into the residual vector.
  Eigen::VectorXd r = qp.r0;
  Eigen::VectorXd dx0 = Eigen::VectorXd::Zero(nx);
  if (qp.fresh_mode == FreshData::initial_state) {
    dx0 = fresh - qp.guess.states[0];
    r += qp.jac.leftCols(nx) * dx0;
  } else {
    r.segment(qp.last_residual_offset, qp.fresh_map.rows()) += qp.fresh_map * fresh;
  }

  const Eigen::MatrixXd jac_free = qp.jac.rightCols(qp.n_free);
  BoxQp box{qp.hessian, jac_free.transpose() * r, qp.lower, qp.upper};
  const BoxQpResult step = solve_qp(box);
  sol.qp_iterations = step.iterations;
  if (step.status != SolveStatus::ok) {
    sol.status = step.status;
    return sol;
  }

  sol.objective = 0.5 * r.squaredNorm();
  // Stationarity measured at the linearization point, primal feasibility by
  // the shooting defects; both vanish as repeated RTI converges.
  BoxQp at_origin = box;
  sol.kkt_residual = std::max(qp_kkt_residual(at_origin, Eigen::VectorXd::Zero(qp.n_free)),
                              qp.defect_norm);

  Eigen::VectorXd z_full(qp.n_full);
  if (qp.fresh_mode == FreshData::initial_state) {
    z_full.head(nx) = dx0;
    z_full.tail(qp.n_free) = step.x;
  } else {
    z_full = step.x;
  }

  for (int node = 0; node < dims.nodes(); ++node) {
    sol.grid.states[node] = qp.guess.states[node] + qp.prop[node] * z_full + qp.offset[node];
  }
  if (qp.fresh_mode == FreshData::initial_state) {
    sol.grid.states[0] = fresh;  // exact initial-value embedding
  }
  for (int k = 0; k < nc; ++k) {
    const int col = nx + k * nu - free_begin;
    for (int j = 0; j < nu; ++j) {
      const int idx = col + j;
      if (step.active[idx] != 0) {
        // Report active bounds exactly, without round-off from the step sum.
        Eigen::VectorXd lo_u(nu), hi_u(nu);
        problem.control_bounds(k, lo_u, hi_u);
        sol.grid.controls[k][j] = step.active[idx] < 0 ? lo_u[j] : hi_u[j];
      } else {
        sol.grid.controls[k][j] = qp.guess.controls[k][j] + step.x[idx];
      }
    }
  }
  if (np > 0) {
    Eigen::VectorXd lo_p(np), hi_p(np);
    problem.param_bounds(lo_p, hi_p);
    sol.param_active.assign(np, 0);
    const int pcol = qp.n_free - np;
    for (int j = 0; j < np; ++j) {
      const int idx = pcol + j;
      sol.param_active[j] = step.active[idx];
      if (step.active[idx] < 0) {
        sol.grid.params[j] = lo_p[j];
      } else if (step.active[idx] > 0) {
        sol.grid.params[j] = hi_p[j];
      } else {
        sol.grid.params[j] = qp.guess.params[j] + step.x[idx];
      }
    }
  }

  sol.feedback_seconds = seconds_since(t0);
  return sol;
}

ShootingGrid shift_warm_start(const ShootingProblem& problem, const ShootingGrid& solution) {
  ShootingGrid next = solution;
  const GridDims dims = solution.dims;
  const int n_nodes = dims.nodes();
  const int nc = dims.controls();

  for (int k = 0; k + 1 < nc; ++k) {
    next.controls[k] = solution.controls[k + 1];
  }
  for (int node = 0; node + 1 < n_nodes; ++node) {
    next.states[node] = solution.states[node + 1];
  }
  // Extend the tail by integrating the duplicated last control forward.
  Eigen::VectorXd x_next(dims.nx);
  Eigen::MatrixXd a(dims.nx, dims.nx), b(dims.nx, dims.nu), c(dims.nx, dims.np);
  problem.integrate(dims.intervals - 1, solution.states[n_nodes - 1], next.controls[nc - 1],
                    solution.params, x_next, a, b, c);
  next.states[n_nodes - 1] = x_next;
  return next;
}

}  // namespace furrow::rti
