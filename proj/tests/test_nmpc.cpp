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

#include "furrow/errors.hpp"
#include "furrow/harness/metrics.hpp"
#include "furrow/nmpc/controller.hpp"
#include "furrow/nmpc/loop.hpp"
#include "furrow/sim/scenario.hpp"

using namespace furrow;
using nmpc::Controller;
using nmpc::MpcConfig;
using nmpc::MpcWeights;

namespace {

MpcConfig default_cfg() {
  MpcConfig cfg;
  cfg.horizon = 20;
  cfg.dt = 0.2;
  return cfg;
}

// Converged solution of the frozen instance the controller would solve.
nmpc::ControlResult converged(Controller& ctl, const model::State& xi, const model::Params& p,
                              double t) {
  nmpc::ControlResult res;
  for (int it = 0; it < 40; ++it) {
    res = ctl.solve(xi, p, t, 0.0);
    REQUIRE(res.status == rti::SolveStatus::ok);
    if (res.kkt_residual < 1e-11) break;
  }
  return res;
}

}  // namespace

TEST_CASE("reference windows on a straight path") {
  auto path = nmpc::make_straight(0.5, 0.0, 30.0, 0.2);
  const auto refs = nmpc::build_reference(path, 2.0, 10);
  REQUIRE(refs.size() == 10);
  for (const auto& r : refs) {
    CHECK(r.theta == doctest::Approx(0.0));
    CHECK(r.ydot == doctest::Approx(0.0));
    CHECK(r.xdot == doctest::Approx(0.5));
  }

  auto back = nmpc::make_straight(0.5, 0.0, 30.0, 0.2, 1);
  for (const auto& r : nmpc::build_reference(back, 2.0, 10)) {
    CHECK(r.theta == doctest::Approx(M_PI));
  }
}

TEST_CASE("circle reference advances the heading linearly") {
  // radius 10 at 1 m/s: the heading advances 0.1 * dt per sample.
  auto path = nmpc::make_circle(10.0, 1.0, true, 60.0, 0.2);
  const auto refs = nmpc::build_reference(path, 5.0, 25);
  for (std::size_t k = 1; k < refs.size(); ++k) {
    CHECK(refs[k].theta - refs[k - 1].theta == doctest::Approx(0.1 * 0.2).epsilon(1e-9));
  }
}

TEST_CASE("headings unwrap across laps") {
  auto path = nmpc::make_circle(3.0, 1.0, true, 60.0, 0.2);  // > 3 laps
  double prev = -1e9;
  bool first = true;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double th = path.at_index(i).theta;
    if (!first) {
      CHECK(std::abs(th - prev) < 0.5);  // no 2*pi jumps
      CHECK(th >= prev);                 // ccw: heading only grows
    }
    prev = th;
    first = false;
  }
  CHECK(path.at_index(path.size() - 1).theta > 2.0 * M_PI);
}

TEST_CASE("window beyond the path end raises") {
  auto path = nmpc::make_straight(0.5, 0.0, 4.0, 0.2);
  CHECK_THROWS_AS(nmpc::build_reference(path, 3.8, 10), ConfigError);
}

TEST_CASE("on-reference straight tracking needs no steering") {
  auto cfg = default_cfg();
  cfg.input_reference = nmpc::InputReference::zero;
  Controller ctl(cfg, MpcWeights{}, nmpc::make_straight(0.425, 0.0, 60.0, 0.2));
  const model::State xi{0.425 * 2.0, 0.0, 0.0};  // exactly on the timed reference
  const auto res = converged(ctl, xi, model::Params{0.5, 0.85, 0.9}, 2.0);
  CHECK(std::abs(res.u_apply.omega) < 1e-6);
}

TEST_CASE("offset to the left steers right") {
  auto cfg = default_cfg();
  Controller ctl(cfg, MpcWeights{}, nmpc::make_straight(0.425, 0.0, 60.0, 0.2));
  const model::State xi{0.425 * 2.0, 1.0, 0.0};  // 1 m left of the path
  const auto res = converged(ctl, xi, model::Params{0.5, 0.85, 0.9}, 2.0);
  CHECK(res.u_apply.omega < 0.0);
  CHECK(std::abs(res.u_apply.omega) <= 0.1);
}

TEST_CASE("large offsets saturate exactly at the bound") {
  auto cfg = default_cfg();
  Controller ctl(cfg, MpcWeights{}, nmpc::make_straight(0.425, 0.0, 60.0, 0.2));
  const model::State xi{0.425 * 2.0, 8.0, 0.0};
  const auto res = ctl.solve(xi, model::Params{0.5, 0.85, 0.9}, 2.0, 0.0);
  REQUIRE(res.status == rti::SolveStatus::ok);
  CHECK(std::abs(res.u_apply.omega) == 0.1);
  CHECK(res.bound_active);
}

TEST_CASE("scaling all weights by a common factor leaves the control unchanged") {
  auto cfg = default_cfg();
  const model::State xi{0.425 * 2.0, 0.35, 0.1};
  const model::Params p{0.5, 0.85, 0.9};

  Controller a(cfg, MpcWeights{}, nmpc::make_straight(0.425, 0.0, 60.0, 0.2));
  MpcWeights scaled;
  scaled.stage *= 7.0;
  scaled.input *= 7.0;
  scaled.terminal *= 7.0;
  Controller b(cfg, scaled, nmpc::make_straight(0.425, 0.0, 60.0, 0.2));

  const auto ra = a.solve(xi, p, 2.0, 0.0);
  const auto rb = b.solve(xi, p, 2.0, 0.0);
  REQUIRE(ra.status == rti::SolveStatus::ok);
  REQUIRE(rb.status == rti::SolveStatus::ok);
  CHECK(std::abs(ra.u_apply.omega - rb.u_apply.omega) < 1e-8);
}

TEST_CASE("the predicted trajectory starts exactly at the estimate") {
  auto cfg = default_cfg();
  Controller ctl(cfg, MpcWeights{}, nmpc::make_circle(8.0, 0.425, true, 60.0, 0.2));
  const model::State xi{0.31, -0.12, 0.04};
  const auto res = ctl.solve(xi, model::Params{0.5, 0.85, 0.9}, 2.0, 0.0);
  REQUIRE(res.status == rti::SolveStatus::ok);
  CHECK(res.predicted.front().x == xi.x);
  CHECK(res.predicted.front().y == xi.y);
  CHECK(res.predicted.front().theta == xi.theta);
  CHECK(res.predicted.size() == static_cast<std::size_t>(cfg.horizon) + 1);
}

TEST_CASE("exact model with no noise stays on track to a millimeter") {
  sim::ScenarioConfig sc;
  sc.duration = 40.0;
  sc.seed = 3;
  sc.path.kind = sim::PathSpec::Kind::straight;
  sc.path.speed = 0.5;
  sc.v_cmd = 0.5;
  sc.actuator_tau = 0.0;
  sc.start_offset = 0.0;
  sc.sensors = sim::SensorConfig{0, 0, 0, 0, 5.0};
  sc.traction.mu_steps = {{0.0, 1.0}};
  sc.traction.kappa_steps = {{0.0, 1.0}};
  const auto log = sim::run_scenario(sc);
  REQUIRE(log.records.size() > 150);
  for (const auto& r : log.records) {
    CHECK(std::hypot(r.x_true - r.x_ref, r.y_true - r.y_ref) < 1e-3);
  }
}

TEST_CASE("applied commands respect the bound at every step of a noisy run") {
  sim::ScenarioConfig sc;
  sc.duration = 60.0;
  sc.seed = 11;
  sc.path.kind = sim::PathSpec::Kind::circle;
  sc.path.radius = 8.0;
  sc.path.speed = 0.425;
  const auto log = sim::run_scenario(sc);
  for (const auto& r : log.records) {
    CHECK(std::abs(r.omega_cmd) <= 0.1 + 1e-15);
  }
}

TEST_CASE("an injected estimator failure holds the previous control") {
  sim::ScenarioConfig sc;
  sc.duration = 60.0;
  sc.seed = 5;
  sc.path.kind = sim::PathSpec::Kind::circle;
  sc.path.radius = 8.0;
  sc.path.speed = 0.425;

  auto path = sim::build_path(sc);
  nmpc::LoopConfig lc;
  lc.dt = sc.dt;
  lc.v_cmd = sc.v_cmd;
  lc.actuator_tau = sc.actuator_tau;
  nmpc::ClosedLoop loop(lc, sim::PlantState{{8.0, 0.0, M_PI / 2}, {0, 0.85, 0.9}, 0, 0},
                        sc.sensors, sc.dropouts, sc.traction, sc.seed, sc.mhe, sc.mpc,
                        sc.mpc_weights, path);
  sim::LogRecord prev{};
  for (int k = 0; k < 220; ++k) {
    if (k == 200) {
      loop.inject_estimator_failure_once();
    }
    const auto rec = loop.step();
    if (k == 200) {
      CHECK(rec.mhe_status != 0);
      CHECK(rec.omega_cmd == prev.omega_cmd);  // held
    }
    if (k == 205) {
      CHECK(rec.mhe_status == 0);  // loop recovered
    }
    prev = rec;
  }
}

TEST_CASE("traction learning beats a fixed full-traction model on a curve") {
  sim::ScenarioConfig base;
  base.duration = 120.0;
  base.path.kind = sim::PathSpec::Kind::circle;
  base.path.radius = 8.0;
  base.path.speed = 0.425;  // effective speed of mu_true * v_cmd
  base.v_cmd = 0.5;
  base.start_offset = 0.3;

  double learned_sum = 0.0, fixed_sum = 0.0;
  int learned_ok = 0, fixed_ok = 0;
  const harness::TrackingOptions opts;
  for (int seed = 0; seed < 20; ++seed) {
    sim::ScenarioConfig cfg = base;
    cfg.seed = 100 + seed;
    cfg.fixed_traction = false;
    const auto m1 = harness::tracking_metrics(sim::run_scenario(cfg), opts);
    cfg.fixed_traction = true;
    const auto m2 = harness::tracking_metrics(sim::run_scenario(cfg), opts);
    if (m1.on_track_index >= 0) {
      learned_sum += m1.mean_after_on_track;
      ++learned_ok;
    }
    if (m2.on_track_index >= 0) {
      fixed_sum += m2.mean_after_on_track;
      ++fixed_ok;
    }
  }
  REQUIRE(learned_ok == 20);
  const double learned_mean = learned_sum / learned_ok;
  // Either the fixed-model loop never settles into the on-track band on some
  // seeds, or its settled error is strictly worse.
  if (fixed_ok == 20) {
    CHECK(fixed_sum / fixed_ok > learned_mean);
  } else {
    CHECK(fixed_ok < 20);
  }
  CHECK(learned_mean < 0.05);
}
