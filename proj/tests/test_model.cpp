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

#include "furrow/errors.hpp"
#include "furrow/model/model.hpp"

using namespace furrow;
using model::Control;
using model::Params;
using model::State;

namespace {

// Closed-form constant-rate turn: radius mu*v / (kappa*omega).
State arc_solution(const State& s0, double omega, const Params& p, double t) {
  const double rate = p.kappa * omega;
  const double speed = p.mu * p.v;
  State s;
  s.theta = s0.theta + rate * t;
  if (rate == 0.0) {
    s.x = s0.x + speed * t * std::cos(s0.theta);
    s.y = s0.y + speed * t * std::sin(s0.theta);
    return s;
  }
  const double r = speed / rate;
  s.x = s0.x + r * (std::sin(s.theta) - std::sin(s0.theta));
  s.y = s0.y - r * (std::cos(s.theta) - std::cos(s0.theta));
  return s;
}

// Traction-free unicycle integrated with its own RK4, used as the oracle for
// the mu = kappa = 1 equivalence.
Eigen::Vector3d unicycle_rk4(const Eigen::Vector3d& x0, double v, double omega, double dt) {
  const auto f = [&](const Eigen::Vector3d& x) {
    return Eigen::Vector3d{v * std::cos(x[2]), v * std::sin(x[2]), omega};
  };
  const Eigen::Vector3d k1 = f(x0);
  const Eigen::Vector3d k2 = f(x0 + 0.5 * dt * k1);
  const Eigen::Vector3d k3 = f(x0 + 0.5 * dt * k2);
  const Eigen::Vector3d k4 = f(x0 + dt * k3);
  return x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

TEST_CASE("dynamics matches direct substitution") {
  const State d1 = model::dynamics({0, 0, 0}, Control{0.0}, Params{1, 1, 1});
  CHECK(d1.x == doctest::Approx(1.0));
  CHECK(d1.y == doctest::Approx(0.0));
  CHECK(d1.theta == doctest::Approx(0.0));

  const State d2 = model::dynamics({0, 0, M_PI / 2}, Control{0.1}, Params{1, 0.5, 0.5});
  CHECK(d2.x == doctest::Approx(0.0));
  CHECK(d2.y == doctest::Approx(0.5));
  CHECK(d2.theta == doctest::Approx(0.05));

  const State d3 = model::dynamics({3, -2, 0.7}, Control{0.08}, Params{0.6, 0.9, 0.8});
  CHECK(d3.x == doctest::Approx(0.54 * std::cos(0.7)).epsilon(1e-12));
  CHECK(d3.y == doctest::Approx(0.54 * std::sin(0.7)).epsilon(1e-12));
  CHECK(d3.theta == doctest::Approx(0.064).epsilon(1e-12));
}

TEST_CASE("dynamics is homogeneous in v*mu") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < 50; ++i) {
    const State s{u(rng), u(rng), 4.0 * u(rng)};
    const Control c{u(rng)};
    const double v = u(rng) + 0.2;
    const double mu = 0.5 * u(rng) + 0.1;
    const double a = 1.0 + u(rng);  // scale v up, mu down, both stay in range
    const State d1 = model::dynamics(s, c, Params{v, mu, 0.7});
    const State d2 = model::dynamics(s, c, Params{v * a, mu / a, 0.7});
    CHECK(d1.x == doctest::Approx(d2.x).epsilon(1e-12));
    CHECK(d1.y == doctest::Approx(d2.y).epsilon(1e-12));
    CHECK(d1.theta == doctest::Approx(d2.theta).epsilon(1e-12));
  }
}

TEST_CASE("integrate_step is exact on constant derivatives") {
  const State s = model::integrate_step({0, 0, 0}, Control{0.0}, Params{1, 1, 1}, 1.0);
  CHECK(s.x == 1.0);
  CHECK(s.y == 0.0);
  CHECK(s.theta == 0.0);
}

TEST_CASE("integrate_step matches the closed-form arc") {
  const State s0{0.2, -0.1, 0.3};
  const Params p{1.0, 0.9, 0.8};
  const double omega = 0.5;

  State s = s0;
  const double dt = 0.01;
  for (int k = 0; k < 100; ++k) {
    s = model::integrate_step(s, Control{omega}, p, dt);
  }
  const State ref = arc_solution(s0, omega, p, 1.0);
  CHECK(std::abs(s.x - ref.x) < 1e-6);
  CHECK(std::abs(s.y - ref.y) < 1e-6);
  CHECK(std::abs(s.theta - ref.theta) < 1e-9);
}

TEST_CASE("integrate_step converges at fourth order") {
  const State s0{0, 0, 0};
  const Params p{1.0, 1.0, 1.0};
  const double omega = 0.9;  // strong turn so the truncation error is visible
  const double horizon = 1.0;

  const auto global_error = [&](int steps) {
    State s = s0;
    const double dt = horizon / steps;
    for (int k = 0; k < steps; ++k) {
      s = model::integrate_step(s, Control{omega}, p, dt);
    }
    const State ref = arc_solution(s0, omega, p, horizon);
    return std::hypot(s.x - ref.x, s.y - ref.y);
  };
  const double e1 = global_error(8);
  const double e2 = global_error(16);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("integrate_step with full traction equals the plain unicycle") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d x0{u(rng), u(rng), 2.0 * u(rng)};
    const double v = 0.5 + 0.5 * std::abs(u(rng));
    const double omega = 0.4 * u(rng);
    const State s = model::integrate_step(State::from_vec(x0), Control{omega},
                                          Params{v, 1.0, 1.0}, 0.2);
    const Eigen::Vector3d ref = unicycle_rk4(x0, v, omega, 0.2);
    CHECK(s.x == doctest::Approx(ref[0]).epsilon(1e-14));
    CHECK(s.y == doctest::Approx(ref[1]).epsilon(1e-14));
    CHECK(s.theta == doctest::Approx(ref[2]).epsilon(1e-14));
  }
}

TEST_CASE("analytic jacobians match central finite differences") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const State s{u(rng), u(rng), 3.0 * u(rng)};
    const Control c{0.3 * u(rng)};
    const Params p{1.0 + 0.5 * u(rng), 0.5 + 0.4 * u(rng), 0.5 + 0.4 * u(rng)};

    const Eigen::Matrix3d jx = model::dynamics_jacobian_state(s, c, p);
    const Eigen::Vector3d ju = model::dynamics_jacobian_control(s, c, p);
    const Eigen::Matrix3d jp = model::dynamics_jacobian_params(s, c, p);

    for (int col = 0; col < 3; ++col) {
      Eigen::Vector3d lo = s.vec(), hi = s.vec();
      lo[col] -= h;
      hi[col] += h;
      const Eigen::Vector3d fd = (model::dynamics(State::from_vec(hi), c, p).vec() -
                                  model::dynamics(State::from_vec(lo), c, p).vec()) /
                                 (2.0 * h);
      CHECK((jx.col(col) - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    }
    {
      const Eigen::Vector3d fd = (model::dynamics(s, Control{c.omega + h}, p).vec() -
                                  model::dynamics(s, Control{c.omega - h}, p).vec()) /
                                 (2.0 * h);
      CHECK((ju - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    }
    for (int col = 0; col < 3; ++col) {
      Eigen::Vector3d lo = p.vec(), hi = p.vec();
      lo[col] -= h;
      hi[col] += h;
      const Eigen::Vector3d fd = (model::dynamics(s, c, Params::from_vec(hi)).vec() -
                                  model::dynamics(s, c, Params::from_vec(lo)).vec()) /
                                 (2.0 * h);
      CHECK((jp.col(col) - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    }
  }
}

TEST_CASE("rk4 sensitivities match finite differences of the integrated step") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-6;
  const double dt = 0.2;
  for (int i = 0; i < 30; ++i) {
    const State s{u(rng), u(rng), 2.0 * u(rng)};
    const Control c{0.3 * u(rng)};
    const Params p{1.0 + 0.4 * u(rng), 0.6 + 0.3 * u(rng), 0.6 + 0.3 * u(rng)};
    Eigen::Matrix3d a, jp;
    Eigen::Vector3d b;
    model::integrate_step_sensitivity(s, c, p, dt, a, b, jp);

    for (int col = 0; col < 3; ++col) {
      Eigen::Vector3d lo = s.vec(), hi = s.vec();
      lo[col] -= h;
      hi[col] += h;
      const Eigen::Vector3d fd = (model::integrate_step(State::from_vec(hi), c, p, dt).vec() -
                                  model::integrate_step(State::from_vec(lo), c, p, dt).vec()) /
                                 (2.0 * h);
      CHECK((a.col(col) - fd).norm() < 1e-5);
    }
    const Eigen::Vector3d fdu = (model::integrate_step(s, Control{c.omega + h}, p, dt).vec() -
                                 model::integrate_step(s, Control{c.omega - h}, p, dt).vec()) /
                                (2.0 * h);
    CHECK((b - fdu).norm() < 1e-5);
    for (int col = 0; col < 3; ++col) {
      Eigen::Vector3d lo = p.vec(), hi = p.vec();
      lo[col] -= h;
      hi[col] += h;
      const Eigen::Vector3d fd =
          (model::integrate_step(s, c, Params::from_vec(hi), dt).vec() -
           model::integrate_step(s, c, Params::from_vec(lo), dt).vec()) /
          (2.0 * h);
      CHECK((jp.col(col) - fd).norm() < 1e-5);
    }
  }
}

TEST_CASE("measurement projects exactly and ignores theta, mu, kappa") {
  const auto z = model::measurement({1, 2, 0.5}, Control{0.1}, Params{0.4, 0.9, 0.9});
  CHECK(z.x == 1.0);
  CHECK(z.y == 2.0);
  CHECK(z.v == 0.4);
  CHECK(z.omega == 0.1);
  CHECK(z.valid_gnss);

  const auto z0 = model::measurement({0, 0, 0}, Control{0.0}, Params{0, 1, 1});
  CHECK(z0.vec().norm() == 0.0);

  const auto za = model::measurement({3, 4, 0.1}, Control{0.2}, Params{1.0, 0.3, 0.4});
  const auto zb = model::measurement({3, 4, -2.7}, Control{0.2}, Params{1.0, 0.9, 0.1});
  CHECK(za.vec() == zb.vec());
}

TEST_CASE("heading_reference quadrants and direction flag") {
  CHECK(model::heading_reference(1.0, 0.0, 0) == doctest::Approx(0.0));
  CHECK(model::heading_reference(1.0, 0.0, 1) == doctest::Approx(M_PI));
  CHECK(model::heading_reference(0.0, -1.0, 0) == doctest::Approx(-M_PI / 2));
  CHECK_THROWS_AS(model::heading_reference(0.0, 0.0, 0), ConfigError);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng), y = u(rng);
    if (x == 0.0 && y == 0.0) continue;
    CHECK(model::heading_reference(x, y, 0) + M_PI ==
          doctest::Approx(model::heading_reference(x, y, 1)));
  }
}

TEST_CASE("slip percentages") {
  const auto [lon0, lat0] = model::slip_percentages(Params{1.0, 1.0, 1.0});
  CHECK(lon0 == 0.0);
  CHECK(lat0 == 0.0);
  const auto [lon1, lat1] = model::slip_percentages(Params{1.0, 0.85, 0.9});
  CHECK(lon1 == doctest::Approx(0.15));
  CHECK(lat1 == doctest::Approx(0.10));
  const auto [lon2, lat2] = model::slip_percentages(Params{1.0, 0.0, 0.0});
  CHECK(lon2 == 1.0);
  CHECK(lat2 == 1.0);
}
