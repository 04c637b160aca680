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

#include <algorithm>
#include <numeric>
#include <random>

#include "furrow/rti/qp.hpp"

using namespace furrow::rti;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Oracle: enumerate every lower/upper/free pattern over the bounded
// variables, solve the equality-constrained system, keep the feasible
// candidate with the smallest objective.
Eigen::VectorXd enumerate_qp(const BoxQp& qp) {
  const int n = static_cast<int>(qp.gradient.size());
  std::vector<int> bounded;
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(qp.lower[i]) || std::isfinite(qp.upper[i])) {
      bounded.push_back(i);
    }
  }
  const int nb = static_cast<int>(bounded.size());
  long best_pattern = -1;
  double best_obj = kInf;
  Eigen::VectorXd best_x;

  long patterns = 1;
  for (int i = 0; i < nb; ++i) patterns *= 3;
  for (long pat = 0; pat < patterns; ++pat) {
    std::vector<int> mode(n, 0);
    long rem = pat;
    bool valid = true;
    for (int b = 0; b < nb; ++b) {
      const int m = static_cast<int>(rem % 3);
      rem /= 3;
      mode[bounded[b]] = m;  // 0 free, 1 lower, 2 upper
      if (m == 1 && !std::isfinite(qp.lower[bounded[b]])) valid = false;
      if (m == 2 && !std::isfinite(qp.upper[bounded[b]])) valid = false;
    }
    if (!valid) continue;

    std::vector<int> free_idx;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (mode[i] == 0) {
        free_idx.push_back(i);
      } else {
        x[i] = mode[i] == 1 ? qp.lower[i] : qp.upper[i];
      }
    }
    const int nf = static_cast<int>(free_idx.size());
    if (nf > 0) {
      Eigen::MatrixXd hf(nf, nf);
      Eigen::VectorXd rf(nf);
      for (int a = 0; a < nf; ++a) {
        double fixed = 0.0;
        for (int i = 0; i < n; ++i) {
          if (mode[i] != 0) fixed += qp.hessian(free_idx[a], i) * x[i];
        }
        rf[a] = -(qp.gradient[free_idx[a]] + fixed);
        for (int b = 0; b < nf; ++b) {
          hf(a, b) = qp.hessian(free_idx[a], free_idx[b]);
        }
      }
      const Eigen::VectorXd xf = hf.ldlt().solve(rf);
      for (int a = 0; a < nf; ++a) {
        x[free_idx[a]] = xf[a];
      }
    }
    // primal feasibility
    bool feasible = true;
    for (int i = 0; i < n && feasible; ++i) {
      feasible = x[i] >= qp.lower[i] - 1e-9 && x[i] <= qp.upper[i] + 1e-9;
    }
    if (!feasible) continue;
    const double obj = 0.5 * x.dot(qp.hessian * x) + qp.gradient.dot(x);
    if (obj < best_obj - 1e-12) {
      best_obj = obj;
      best_x = x;
      best_pattern = pat;
    }
  }
  REQUIRE(best_pattern >= 0);
  return best_x;
}

BoxQp random_qp(std::mt19937& rng, int n, int n_bounded) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = u(rng);
    }
  }
  BoxQp qp;
  qp.hessian = m * m.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
  qp.gradient = Eigen::VectorXd::NullaryExpr(n, [&]() { return 2.0 * u(rng); });
  qp.lower = Eigen::VectorXd::Constant(n, -kInf);
  qp.upper = Eigen::VectorXd::Constant(n, kInf);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  for (int b = 0; b < n_bounded; ++b) {
    const double a = u(rng), c = u(rng);
    qp.lower[idx[b]] = std::min(a, c);
    qp.upper[idx[b]] = std::max(a, c);
  }
  return qp;
}

}  // namespace

TEST_CASE("single variable clipped at its bound") {
  BoxQp qp;
  qp.hessian = Eigen::MatrixXd::Constant(1, 1, 1.0);
  qp.gradient = Eigen::VectorXd::Constant(1, -2.0);  // min 1/2 (u - 2)^2
  qp.lower = Eigen::VectorXd::Constant(1, -kInf);
  qp.upper = Eigen::VectorXd::Constant(1, 0.1);
  const auto res = solve_qp(qp);
  REQUIRE(res.status == SolveStatus::ok);
  CHECK(res.x[0] == 0.1);
  CHECK(res.active[0] == +1);
}

TEST_CASE("unconstrained quadratic reduces to the Newton step") {
  std::mt19937 rng(13);
  const BoxQp qp = random_qp(rng, 8, 0);
  const auto res = solve_qp(qp);
  REQUIRE(res.status == SolveStatus::ok);
  const Eigen::VectorXd newton = qp.hessian.ldlt().solve(-qp.gradient);
  CHECK((res.x - newton).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("reversed bounds are rejected") {
  BoxQp qp;
  qp.hessian = Eigen::MatrixXd::Identity(2, 2);
  qp.gradient = Eigen::VectorXd::Zero(2);
  qp.lower = Eigen::VectorXd::Constant(2, 1.0);
  qp.upper = Eigen::VectorXd::Constant(2, -1.0);
  CHECK(solve_qp(qp).status == SolveStatus::infeasible);
}

TEST_CASE("matches bound-pattern enumeration on random instances") {
  std::mt19937 rng(101);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim(rng);
    std::uniform_int_distribution<int> nb(0, std::min(n, 3));
    const BoxQp qp = random_qp(rng, n, nb(rng));
    const auto res = solve_qp(qp);
    REQUIRE(res.status == SolveStatus::ok);
    const Eigen::VectorXd oracle = enumerate_qp(qp);
    CHECK((res.x - oracle).lpNorm<Eigen::Infinity>() < 1e-7);
    CHECK(qp_kkt_residual(qp, res.x) < 1e-8);
  }
}

TEST_CASE("12-variable instances with 3 boxes match enumeration") {
  std::mt19937 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const BoxQp qp = random_qp(rng, 12, 3);
    const auto res = solve_qp(qp);
    REQUIRE(res.status == SolveStatus::ok);
    const Eigen::VectorXd oracle = enumerate_qp(qp);
    CHECK((res.x - oracle).lpNorm<Eigen::Infinity>() < 1e-7);
  }
}

TEST_CASE("solver is deterministic") {
  std::mt19937 rng(55);
  const BoxQp qp = random_qp(rng, 10, 3);
  const auto a = solve_qp(qp);
  const auto b = solve_qp(qp);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}
