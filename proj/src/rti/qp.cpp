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

#include "furrow/rti/qp.hpp"

#include <cmath>
#include <limits>

#include "furrow/errors.hpp"

namespace furrow::rti {

namespace {
constexpr double kStepTol = 1e-13;
constexpr double kMultiplierTol = 1e-11;
}  // namespace

BoxQpResult solve_qp(const BoxQp& qp, int max_iterations) {
  const int n = static_cast<int>(qp.gradient.size());
  if (qp.hessian.rows() != n || qp.hessian.cols() != n || qp.lower.size() != n ||
      qp.upper.size() != n) {
    throw ConfigError("solve_qp: inconsistent dimensions");
  }

  BoxQpResult res;
  res.x = Eigen::VectorXd::Zero(n);
  res.active.assign(n, 0);
  if (n == 0) {
    return res;
  }
  if (max_iterations <= 0) {
    max_iterations = 50 * n + 50;
  }

  for (int i = 0; i < n; ++i) {
    if (qp.lower[i] > qp.upper[i]) {
      res.status = SolveStatus::infeasible;
      return res;
    }
  }

  // Feasible start: project the origin onto the box.
  Eigen::VectorXd& x = res.x;
  for (int i = 0; i < n; ++i) {
    if (x[i] < qp.lower[i]) {
      x[i] = qp.lower[i];
      res.active[i] = -1;
    } else if (x[i] > qp.upper[i]) {
      x[i] = qp.upper[i];
      res.active[i] = +1;
    }
  }

  std::vector<int> free_idx;
  free_idx.reserve(n);

  for (int iter = 0; iter < max_iterations; ++iter) {
    res.iterations = iter + 1;

    free_idx.clear();
    for (int i = 0; i < n; ++i) {
      if (res.active[i] == 0) {
        free_idx.push_back(i);
      }
    }
    const int nf = static_cast<int>(free_idx.size());

    // Equality-constrained subproblem: active variables pinned at their
    // bounds, Newton step in the free block.
    Eigen::VectorXd direction = Eigen::VectorXd::Zero(n);
    if (nf > 0) {
      Eigen::MatrixXd hf(nf, nf);
      Eigen::VectorXd rf(nf);
      const Eigen::VectorXd grad_now = qp.hessian * x + qp.gradient;
      for (int a = 0; a < nf; ++a) {
        rf[a] = -grad_now[free_idx[a]];
        for (int b = 0; b < nf; ++b) {
          hf(a, b) = qp.hessian(free_idx[a], free_idx[b]);
        }
      }
      const Eigen::VectorXd df = hf.ldlt().solve(rf);
      for (int a = 0; a < nf; ++a) {
        direction[free_idx[a]] = df[a];
      }
    }

    const double step_norm = direction.lpNorm<Eigen::Infinity>();
    if (step_norm <= kStepTol) {
      // Candidate optimum for the current working set; check multipliers.
      const Eigen::VectorXd grad_now = qp.hessian * x + qp.gradient;
      int release = -1;
      double worst = kMultiplierTol;
      for (int i = 0; i < n; ++i) {
        double violation = 0.0;
        if (res.active[i] == -1) {
          violation = -grad_now[i];  // lower bound wants grad >= 0
        } else if (res.active[i] == +1) {
          violation = grad_now[i];  // upper bound wants grad <= 0
        }
        if (violation > worst) {
          worst = violation;
          release = i;
        }
      }
      if (release < 0) {
        res.status = SolveStatus::ok;
        return res;
      }
      res.active[release] = 0;
      continue;
    }

    // Ratio test against the inactive bounds.
    double alpha = 1.0;
    int blocking = -1;
    int blocking_side = 0;
    for (int i : free_idx) {
      const double d = direction[i];
      if (d > 0.0 && std::isfinite(qp.upper[i])) {
        const double a = (qp.upper[i] - x[i]) / d;
        if (a < alpha - 1e-15 || (a < alpha + 1e-15 && blocking >= 0 && i < blocking)) {
          alpha = std::max(a, 0.0);
          blocking = i;
          blocking_side = +1;
        }
      } else if (d < 0.0 && std::isfinite(qp.lower[i])) {
        const double a = (qp.lower[i] - x[i]) / d;
        if (a < alpha - 1e-15 || (a < alpha + 1e-15 && blocking >= 0 && i < blocking)) {
          alpha = std::max(a, 0.0);
          blocking = i;
          blocking_side = -1;
        }
      }
    }

    x += alpha * direction;
    if (blocking >= 0) {
      // Pin exactly on the bound to avoid drift.
      x[blocking] = blocking_side > 0 ? qp.upper[blocking] : qp.lower[blocking];
      res.active[blocking] = blocking_side;
    }
  }

  res.status = SolveStatus::iteration_limit;
  return res;
}

double qp_kkt_residual(const BoxQp& qp, const Eigen::VectorXd& x) {
  const Eigen::VectorXd grad = qp.hessian * x + qp.gradient;
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    const double projected =
        std::min(std::max(x[i] - grad[i], qp.lower[i]), qp.upper[i]) - x[i];
    worst = std::max(worst, std::abs(projected));
  }
  return worst;
}

}  // namespace furrow::rti
