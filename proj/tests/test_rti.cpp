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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "furrow/model/model.hpp"
#include "furrow/nmpc/controller.hpp"
#include "furrow/nmpc/reference.hpp"
#include "furrow/rti/solver.hpp"

using namespace furrow;
using namespace furrow::rti;

namespace {

// Linear dynamics, quadratic cost: the NLP itself is a convex QP, so a
// single full Gauss-Newton step from any guess must land on the optimum.
class LinearProblem : public ShootingProblem {
 public:
  LinearProblem(int intervals, Eigen::Matrix2d a, Eigen::Vector2d b,
                std::vector<Eigen::Vector2d> refs)
      : n_(intervals), a_(a), b_(b), refs_(std::move(refs)) {}

  GridDims dims() const override {
    GridDims d;
    d.intervals = n_;
    d.nx = 2;
    d.nu = 1;
    d.np = 0;
    return d;
  }
  FreshData fresh_mode() const override { return FreshData::initial_state; }
  int fresh_dim() const override { return 2; }

  void integrate(int, const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd&,
                 Eigen::VectorXd& x_next, Eigen::MatrixXd& a, Eigen::MatrixXd& b,
                 Eigen::MatrixXd&) const override {
    x_next = a_ * x + b_ * u[0];
    a = a_;
    b = b_;
  }

  int residual_dim(int node) const override { return node == 0 ? 1 : (node == n_ ? 2 : 3); }

  void residual(int node, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                const Eigen::VectorXd&, Eigen::VectorXd& r, Eigen::MatrixXd& jx,
                Eigen::MatrixXd& ju, Eigen::MatrixXd&) const override {
    int row = 0;
    if (node > 0) {
      for (int i = 0; i < 2; ++i) {
        r[row] = x[i] - refs_[node][i];
        jx(row, i) = 1.0;
        ++row;
      }
    }
    if (node < n_) {
      r[row] = 0.3 * u[0];
      ju(row, 0) = 0.3;
    }
  }

  int horizon() const { return n_; }
  const Eigen::Matrix2d& a() const { return a_; }
  const Eigen::Vector2d& b() const { return b_; }
  const std::vector<Eigen::Vector2d>& refs() const { return refs_; }

 private:
  int n_;
  Eigen::Matrix2d a_;
  Eigen::Vector2d b_;
  std::vector<Eigen::Vector2d> refs_;
};

LinearProblem make_linear(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Matrix2d a;
  a << 1.0, 0.1, 0.05 * u(rng), 0.95;
  Eigen::Vector2d b{0.02 * u(rng), 0.1};
  std::vector<Eigen::Vector2d> refs(n + 1);
  for (auto& r : refs) {
    r = Eigen::Vector2d{u(rng), u(rng)};
  }
  return LinearProblem(n, a, b, refs);
}

// Dense least-squares oracle over the condensed control variables.
Eigen::VectorXd linear_optimum(const LinearProblem& p, const Eigen::Vector2d& x0) {
  const int n = p.horizon();
  // States as affine functions of the controls.
  std::vector<Eigen::MatrixXd> gain(n + 1, Eigen::MatrixXd::Zero(2, n));
  std::vector<Eigen::Vector2d> off(n + 1);
  off[0] = x0;
  for (int k = 0; k < n; ++k) {
    gain[k + 1] = p.a() * gain[k];
    gain[k + 1].col(k) += p.b();
    off[k + 1] = p.a() * off[k];
  }
  const int rows = 2 * n + n;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  int row = 0;
  for (int node = 1; node <= n; ++node) {
    jac.middleRows(row, 2) = gain[node];
    rhs.segment(row, 2) = p.refs()[node] - off[node];
    row += 2;
  }
  for (int k = 0; k < n; ++k) {
    jac(row, k) = 0.3;
    ++row;
  }
  return jac.colPivHouseholderQr().solve(rhs);
}

// Bound-constrained single-parameter fit used for the exact-bound check.
class BoundedParamProblem : public ShootingProblem {
 public:
  GridDims dims() const override {
    GridDims d;
    d.intervals = 1;
    d.nx = 1;
    d.nu = 1;
    d.np = 1;
    return d;
  }
  FreshData fresh_mode() const override { return FreshData::newest_residual; }
  int fresh_dim() const override { return 1; }
  void integrate(int, const Eigen::VectorXd& x, const Eigen::VectorXd&, const Eigen::VectorXd&,
                 Eigen::VectorXd& x_next, Eigen::MatrixXd& a, Eigen::MatrixXd& b,
                 Eigen::MatrixXd& c) const override {
    x_next = x;
    a = Eigen::MatrixXd::Identity(1, 1);
    b = Eigen::MatrixXd::Zero(1, 1);
    c = Eigen::MatrixXd::Zero(1, 1);
  }
  int residual_dim(int node) const override { return node == 1 ? 1 : 0; }
  void residual(int node, const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd& p,
                Eigen::VectorXd& r, Eigen::MatrixXd&, Eigen::MatrixXd&,
                Eigen::MatrixXd& jp) const override {
    if (node == 1) {
      r[0] = p[0];
      jp(0, 0) = 1.0;
    }
  }
  Eigen::MatrixXd fresh_residual_map() const override {
    return Eigen::MatrixXd::Constant(1, 1, -1.0);
  }
  void param_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const override {
    lo[0] = 0.0;
    hi[0] = 1.0;
  }
};

nmpc::MpcProblem curved_instance(double u_ref = 0.0) {
  nmpc::MpcConfig cfg;
  cfg.horizon = 12;
  cfg.dt = 0.2;
  auto path = nmpc::make_circle(8.0, 0.45, true, 60.0, 0.2);
  return nmpc::MpcProblem(cfg, nmpc::MpcWeights{}, path.window(1.0, cfg.horizon),
                          model::Params{0.5, 0.85, 0.9}, u_ref);
}

ShootingGrid reference_seeded_grid(const nmpc::MpcProblem& prob) {
  auto grid = ShootingGrid::zero(prob.dims());
  const auto& refs = prob.refs();
  grid.states[0] << refs[0].x, refs[0].y, refs[0].theta;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    grid.states[k + 1] << refs[k].x, refs[k].y, refs[k].theta;
  }
  return grid;
}

}  // namespace

TEST_CASE("continuity defects vanish on an exact open-loop trajectory") {
  auto prob = curved_instance();
  auto grid = reference_seeded_grid(prob);
  // Make the guess dynamically feasible by integrating the controls forward.
  for (int k = 0; k < prob.dims().intervals; ++k) {
    grid.controls[k][0] = 0.05;
    Eigen::VectorXd xn(3);
    Eigen::MatrixXd a(3, 3), b(3, 1), c(3, 0);
    prob.integrate(k, grid.states[k], grid.controls[k], grid.params, xn, a, b, c);
    grid.states[k + 1] = xn;
  }
  const auto qp = prepare(prob, grid);
  REQUIRE(qp.status == SolveStatus::ok);
  CHECK(qp.defect_norm < 1e-14);

  // Breaking one node must surface in exactly that defect.
  grid.states[4][1] += 0.37;
  const auto qp2 = prepare(prob, grid);
  CHECK(qp2.defect_norm == doctest::Approx(0.37).epsilon(1e-9));
}

TEST_CASE("one feedback call solves a linear-dynamics quadratic-cost instance") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const LinearProblem prob = make_linear(rng, 6);
    auto guess = ShootingGrid::zero(prob.dims());
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& s : guess.states) {
      s = Eigen::Vector2d{u(rng), u(rng)};
    }
    for (auto& c : guess.controls) {
      c[0] = u(rng);
    }
    const Eigen::Vector2d x0{u(rng), u(rng)};
    const auto qp = prepare(prob, guess);
    REQUIRE(qp.status == SolveStatus::ok);
    const auto sol = feedback(prob, qp, x0);
    REQUIRE(sol.status == SolveStatus::ok);

    const Eigen::VectorXd expected = linear_optimum(prob, x0);
    for (int k = 0; k < prob.horizon(); ++k) {
      CHECK(sol.grid.controls[k][0] == doctest::Approx(expected[k]).epsilon(1e-7));
    }
    CHECK((sol.grid.states[0] - x0).norm() == 0.0);
  }
}

TEST_CASE("feedback with no active bounds matches the dense least-squares solve") {
  auto prob = curved_instance();
  auto grid = reference_seeded_grid(prob);
  const auto qp = prepare(prob, grid);
  REQUIRE(qp.status == SolveStatus::ok);

  Eigen::Vector3d fresh = grid.states[0];
  fresh += Eigen::Vector3d{0.02, -0.03, 0.01};
  const auto sol = feedback(prob, qp, fresh);
  REQUIRE(sol.status == SolveStatus::ok);

  const Eigen::VectorXd r = qp.r0 + qp.jac.leftCols(3) * (fresh - grid.states[0]);
  const Eigen::MatrixXd jf = qp.jac.rightCols(qp.n_free);
  const Eigen::VectorXd lsq = jf.colPivHouseholderQr().solve(-r);
  bool any_active = false;
  for (int k = 0; k < prob.dims().intervals; ++k) {
    any_active = any_active || std::abs(sol.grid.controls[k][0]) >= 0.1 - 1e-12;
  }
  REQUIRE(!any_active);
  for (int k = 0; k < prob.dims().intervals; ++k) {
    CHECK(sol.grid.controls[k][0] ==
          doctest::Approx(grid.controls[k][0] + lsq[k]).epsilon(1e-8));
  }
}

TEST_CASE("parameter pushed past its bound comes back exactly on it") {
  BoundedParamProblem prob;
  auto grid = ShootingGrid::zero(prob.dims());
  grid.params[0] = 0.6;
  const auto qp = prepare(prob, grid);
  REQUIRE(qp.status == SolveStatus::ok);
  // Fresh observation far above the upper bound.
  const auto sol = feedback(prob, qp, Eigen::VectorXd::Constant(1, 3.0));
  REQUIRE(sol.status == SolveStatus::ok);
  CHECK(sol.grid.params[0] == 1.0);
  CHECK(sol.param_active[0] == +1);
}

TEST_CASE("prepare is built before the fresh data exists") {
  auto prob = curved_instance();
  const auto grid = reference_seeded_grid(prob);
  const auto qp = prepare(prob, grid);
  // Only now is the "measurement" decided; two different embeddings reuse the
  // same subproblem.
  const auto sol_a = feedback(prob, qp, grid.states[0] + Eigen::Vector3d{0.05, 0.0, 0.0});
  const auto sol_b = feedback(prob, qp, grid.states[0] - Eigen::Vector3d{0.05, 0.0, 0.0});
  REQUIRE(sol_a.status == SolveStatus::ok);
  REQUIRE(sol_b.status == SolveStatus::ok);
  CHECK(sol_a.grid.controls[0][0] != sol_b.grid.controls[0][0]);
  // Identical call repeats identically (sequential mode is deterministic).
  const auto sol_c = feedback(prob, qp, grid.states[0] + Eigen::Vector3d{0.05, 0.0, 0.0});
  CHECK(sol_a.grid.controls[0][0] == sol_c.grid.controls[0][0]);
}

TEST_CASE("condensed hessian is positive semi-definite") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    auto prob = curved_instance(0.01 * trial);
    auto grid = reference_seeded_grid(prob);
    for (auto& s : grid.states) {
      s += Eigen::Vector3d{u(rng), u(rng), u(rng)};
    }
    for (auto& c : grid.controls) {
      c[0] = u(rng);
    }
    const auto qp = prepare(prob, grid);
    REQUIRE(qp.status == SolveStatus::ok);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qp.hessian);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("repeated rti on a frozen instance converges with monotone kkt") {
  auto prob = curved_instance();
  auto grid = reference_seeded_grid(prob);
  Eigen::Vector3d fresh = grid.states[0] + Eigen::Vector3d{0.1, -0.1, 0.05};

  double prev_kkt = std::numeric_limits<double>::infinity();
  double final_kkt = prev_kkt;
  for (int iter = 0; iter < 10; ++iter) {
    const auto qp = prepare(prob, grid);
    REQUIRE(qp.status == SolveStatus::ok);
    const auto sol = feedback(prob, qp, fresh);
    REQUIRE(sol.status == SolveStatus::ok);
    if (iter >= 1) {
      CHECK(sol.kkt_residual <= prev_kkt * (1.0 + 1e-9));
    }
    prev_kkt = sol.kkt_residual;
    final_kkt = sol.kkt_residual;
    grid = sol.grid;
  }
  CHECK(final_kkt < 1e-8);
}

TEST_CASE("shift_warm_start is a fixed point on a constant solution") {
  // Straight east reference tracked exactly with zero controls.
  nmpc::MpcConfig cfg;
  cfg.horizon = 8;
  cfg.dt = 0.2;
  auto path = nmpc::make_straight(0.425, 0.0, 30.0, 0.2);
  nmpc::MpcProblem prob(cfg, nmpc::MpcWeights{}, path.window(2.0, cfg.horizon),
                        model::Params{0.5, 0.85, 1.0}, 0.0);
  auto grid = ShootingGrid::zero(prob.dims());
  for (int k = 0; k <= cfg.horizon; ++k) {
    grid.states[k] << 0.425 * (2.0 + 0.2 * k), 0.0, 0.0;
  }
  const auto shifted = shift_warm_start(prob, grid);
  // Every interior segment keeps zero defects; the tail is integrated.
  for (int k = 0; k + 1 < cfg.horizon; ++k) {
    Eigen::VectorXd xn(3);
    Eigen::MatrixXd a(3, 3), b(3, 1), c(3, 0);
    prob.integrate(k, shifted.states[k], shifted.controls[k], shifted.params, xn, a, b, c);
    CHECK((xn - shifted.states[k + 1]).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  CHECK(shifted.states[0][0] == doctest::Approx(0.425 * 2.2));
}

TEST_CASE("warm-started single iterations stay close to the converged solution") {
  // Receding-horizon walk along a curve; each step compares the single
  // warm-started iteration to the fully converged solution of the same
  // frozen instance.
  nmpc::MpcConfig cfg;
  cfg.horizon = 15;
  cfg.dt = 0.2;
  auto path = nmpc::make_circle(8.0, 0.45, true, 120.0, 0.2);
  const model::Params params{0.5, 0.85, 0.9};
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);

  ShootingGrid warm;
  bool have_warm = false;
  for (int step = 0; step < 40; ++step) {
    const double t = 2.0 + 0.2 * step;
    nmpc::MpcProblem prob(cfg, nmpc::MpcWeights{}, path.window(t, cfg.horizon), params, 0.0);
    if (!have_warm) {
      warm = ShootingGrid::zero(prob.dims());
      const auto& refs = prob.refs();
      warm.states[0] << refs[0].x, refs[0].y, refs[0].theta;
      for (int k = 1; k <= cfg.horizon; ++k) {
        warm.states[k] << refs[k - 1].x, refs[k - 1].y, refs[k - 1].theta;
      }
      have_warm = true;
    }
    const auto& ref0 = path.at_time(t);
    Eigen::Vector3d fresh{ref0.x + 2.0 * noise(rng), ref0.y + 2.0 * noise(rng),
                          ref0.theta + noise(rng)};

    const auto qp = prepare(prob, warm);
    const auto rti_sol = feedback(prob, qp, fresh);
    REQUIRE(rti_sol.status == SolveStatus::ok);

    ShootingGrid converged = rti_sol.grid;
    for (int it = 0; it < 50; ++it) {
      const auto q = prepare(prob, converged);
      const auto s = feedback(prob, q, fresh);
      REQUIRE(s.status == SolveStatus::ok);
      converged = s.grid;
      if (s.kkt_residual < 1e-12) break;
    }
    CHECK(std::abs(rti_sol.grid.controls[0][0] - converged.controls[0][0]) < 1e-3);
    warm = shift_warm_start(prob, rti_sol.grid);
  }
}
