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
#include "furrow/nmhe/estimator.hpp"

using namespace furrow;
using nmhe::MheConfig;
using nmhe::MovingHorizonEstimator;

namespace {

struct SimSample {
  double t;
  model::Measurement z;
  model::Control u;
};

// Noise-free open-loop trajectory of the true model.
std::vector<SimSample> simulate(const model::Params& p, double omega, int samples, double dt) {
  std::vector<SimSample> out;
  model::State s{0.0, 0.0, 0.2};
  for (int k = 0; k < samples; ++k) {
    SimSample rec;
    rec.t = k * dt;
    rec.z = model::measurement(s, model::Control{omega}, p);
    rec.u = model::Control{omega};
    out.push_back(rec);
    s = model::integrate_step(s, model::Control{omega}, p, dt);
  }
  return out;
}

}  // namespace

TEST_CASE("default weights follow the published matrices") {
  nmhe::MheWeights w;
  CHECK(w.output_sigma == Eigen::Vector4d{0.03, 0.03, 0.5, 0.35});
  Eigen::Matrix<double, 6, 1> expected;
  expected << 10.0, 10.0, 0.1, 1.0, 0.25, 0.25;
  CHECK(w.arrival_sigma == expected);
}

TEST_CASE("window buffering and eviction") {
  MheConfig cfg;
  cfg.horizon = 5;
  cfg.dt = 0.2;
  MovingHorizonEstimator est(cfg);

  est.push_measurement(0.0, model::Measurement{1, 2, 0.5, 0.0, true}, model::Control{0.0});
  CHECK(est.window().buffer.size() == 1);
  for (int k = 1; k < 5; ++k) {
    est.push_measurement(0.2 * k, model::Measurement{1, 2, 0.5, 0.0, true}, model::Control{0.0});
  }
  CHECK(est.window().buffer.size() == 5);
  CHECK(est.window_full());
  est.push_measurement(1.0, model::Measurement{9, 9, 0.5, 0.0, true}, model::Control{0.0});
  CHECK(est.window().buffer.size() == 5);
  CHECK(est.window().buffer.front().t == doctest::Approx(0.2));

  SUBCASE("non-monotone timestamps are rejected") {
    CHECK_THROWS_AS(est.push_measurement(0.9, model::Measurement{}, model::Control{}),
                    SequencingError);
  }
  SUBCASE("gapped timestamps are rejected") {
    CHECK_THROWS_AS(est.push_measurement(1.6, model::Measurement{}, model::Control{}),
                    SequencingError);
  }
}

TEST_CASE("dropout samples keep the held position in the window") {
  MheConfig cfg;
  cfg.horizon = 4;
  cfg.dt = 0.2;
  MovingHorizonEstimator est(cfg);
  est.push_measurement(0.0, model::Measurement{1.0, 2.0, 0.5, 0.0, true}, model::Control{});
  model::Measurement dropped{55.0, 66.0, 0.5, 0.0, false};
  est.push_measurement(0.2, dropped, model::Control{});
  CHECK(est.window().buffer.back().z.x == 1.0);
  CHECK(est.window().buffer.back().z.y == 2.0);
  CHECK_FALSE(est.window().buffer.back().z.valid_gnss);
}

TEST_CASE("solve requires a full window") {
  MheConfig cfg;
  cfg.horizon = 10;
  MovingHorizonEstimator est(cfg);
  est.push_measurement(0.0, model::Measurement{}, model::Control{});
  CHECK_THROWS_AS(est.solve(), ConfigError);
}

TEST_CASE("exact data with full traction stays on the bound") {
  MheConfig cfg;
  cfg.horizon = 20;
  cfg.dt = 0.2;
  MovingHorizonEstimator est(cfg);

  const model::Params truth{1.0, 1.0, 1.0};
  est.set_prior(model::State{0.0, 0.0, 0.2}, truth);  // exact prior
  const auto data = simulate(truth, 0.05, 20, cfg.dt);
  for (const auto& s : data) {
    est.push_measurement(s.t, s.z, s.u);
  }
  REQUIRE(est.window_full());

  // Exact data and an exact prior make the truth the fixed point; iterating
  // the frozen window drives the single-iteration estimate onto it.
  nmhe::EstimateResult last;
  for (int iter = 0; iter < 15; ++iter) {
    last = est.solve();
    REQUIRE(last.status == rti::SolveStatus::ok);
  }
  CHECK(last.params.mu == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(last.params.kappa == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(last.params.mu <= 1.0);
  CHECK(last.params.kappa <= 1.0);

  // State estimate at the newest node agrees with the simulated truth.
  const int newest_sample = cfg.horizon - 1;
  model::State s_true{0.0, 0.0, 0.2};
  for (int k = 0; k < newest_sample; ++k) {
    s_true = model::integrate_step(s_true, model::Control{0.05}, truth, cfg.dt);
  }
  CHECK(std::abs(last.state.x - s_true.x) < 1e-6);
  CHECK(std::abs(last.state.y - s_true.y) < 1e-6);
  CHECK(std::abs(last.state.theta - s_true.theta) < 1e-6);
}

TEST_CASE("noiseless traction identification converges within 20 sliding solves") {
  MheConfig cfg;
  cfg.horizon = 30;
  cfg.dt = 0.2;
  MovingHorizonEstimator est(cfg);

  const model::Params truth{1.0, 0.7, 0.8};
  const auto data = simulate(truth, 0.08, 60, cfg.dt);
  int solves = 0;
  nmhe::EstimateResult last;
  for (const auto& s : data) {
    est.push_measurement(s.t, s.z, s.u);
    if (est.window_full() && solves < 20) {
      last = est.solve();
      REQUIRE(last.status == rti::SolveStatus::ok);
      est.update_arrival_prior(last);
      ++solves;
    }
  }
  REQUIRE(solves == 20);
  CHECK(std::abs(last.params.mu - 0.7) < 0.01);
  CHECK(std::abs(last.params.kappa - 0.8) < 0.01);
  CHECK(std::abs(last.params.v - 1.0) < 0.01);
}

TEST_CASE("arrival prior tracks the node-1 estimate") {
  MheConfig cfg;
  cfg.horizon = 12;
  cfg.dt = 0.2;
  MovingHorizonEstimator est(cfg);
  const auto data = simulate(model::Params{1.0, 0.9, 0.9}, 0.03, 30, cfg.dt);
  for (const auto& s : data) {
    est.push_measurement(s.t, s.z, s.u);
    if (est.window_full()) {
      const auto r = est.solve();
      REQUIRE(r.status == rti::SolveStatus::ok);
      est.update_arrival_prior(r);
      CHECK(est.window().prior_state.x == r.window_states[1].x);
      CHECK(est.window().prior_state.theta == r.window_states[1].theta);
      CHECK(est.window().prior_params.mu == r.params.mu);
    }
  }
}

TEST_CASE("with a flat arrival cost the estimate is prior independent") {
  const model::Params truth{1.0, 0.7, 0.8};
  const auto data = simulate(truth, 0.08, 45, 0.2);

  const auto run = [&](double prior_traction) {
    MheConfig cfg;
    cfg.horizon = 30;
    cfg.dt = 0.2;
    cfg.initial_traction = prior_traction;
    cfg.weights.arrival_sigma.setConstant(1e6);  // arrival cost switched off
    MovingHorizonEstimator est(cfg);
    nmhe::EstimateResult last;
    for (const auto& s : data) {
      est.push_measurement(s.t, s.z, s.u);
      if (est.window_full()) {
        last = est.solve();
        est.update_arrival_prior(last);
      }
    }
    return last;
  };
  const auto a = run(0.3);
  const auto b = run(0.95);
  CHECK(std::abs(a.params.mu - b.params.mu) < 1e-4);
  CHECK(std::abs(a.params.kappa - b.params.kappa) < 1e-4);
}

TEST_CASE("speed estimate tracks a step change within two windows") {
  MheConfig cfg;
  cfg.horizon = 15;
  cfg.dt = 0.2;
  MovingHorizonEstimator est(cfg);

  const model::Params p1{1.0, 0.9, 0.9};
  const model::Params p2{1.6, 0.9, 0.9};
  std::vector<SimSample> data = simulate(p1, 0.05, 30, cfg.dt);
  // Continue the trajectory with the faster wheel speed.
  model::State s{data.back().z.x, data.back().z.y, 0.0};
  {
    // Rebuild the true state at the end of the first phase.
    s = model::State{0.0, 0.0, 0.2};
    for (int k = 0; k < 30; ++k) {
      s = model::integrate_step(s, model::Control{0.05}, p1, cfg.dt);
    }
  }
  for (int k = 0; k < 2 * cfg.horizon; ++k) {
    SimSample rec;
    rec.t = (30 + k) * cfg.dt;
    rec.z = model::measurement(s, model::Control{0.05}, p2);
    rec.u = model::Control{0.05};
    data.push_back(rec);
    s = model::integrate_step(s, model::Control{0.05}, p2, cfg.dt);
  }

  double v_final = 0.0;
  for (const auto& rec : data) {
    est.push_measurement(rec.t, rec.z, rec.u);
    if (est.window_full()) {
      const auto r = est.solve();
      REQUIRE(r.status == rti::SolveStatus::ok);
      est.update_arrival_prior(r);
      v_final = r.params.v;
    }
  }
  CHECK(std::abs(v_final - 1.6) < 0.05);
}

TEST_CASE("estimates never leave the traction bounds under noise (fuzz)") {
  std::mt19937 seed_rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    MheConfig cfg;
    cfg.horizon = 15;
    cfg.dt = 0.2;
    MovingHorizonEstimator est(cfg);
    std::mt19937 rng(seed_rng());
    std::normal_distribution<double> nx(0.0, 0.03), nv(0.0, 0.05), nw(0.0, 0.0175);

    const model::Params truth{1.0, 0.95, 0.97};  // near the bound
    model::State s{0, 0, 0};
    for (int k = 0; k < 60; ++k) {
      model::Measurement z = model::measurement(s, model::Control{0.08}, truth);
      z.x += nx(rng);
      z.y += nx(rng);
      z.v += nv(rng);
      z.omega += nw(rng);
      est.push_measurement(k * cfg.dt, z, model::Control{0.08});
      if (est.window_full()) {
        const auto r = est.solve();
        REQUIRE(r.status == rti::SolveStatus::ok);
        est.update_arrival_prior(r);
        CHECK(r.params.mu >= 0.0);
        CHECK(r.params.mu <= 1.0);
        CHECK(r.params.kappa >= 0.0);
        CHECK(r.params.kappa <= 1.0);
        CHECK(r.params.v >= 0.0);
      }
      s = model::integrate_step(s, model::Control{0.08}, truth, cfg.dt);
    }
  }
}

TEST_CASE("pipeline split equals the one-shot solve") {
  MheConfig cfg;
  cfg.horizon = 10;
  cfg.dt = 0.2;
  const auto data = simulate(model::Params{1.0, 0.8, 0.85}, 0.06, 14, cfg.dt);

  MovingHorizonEstimator one_shot(cfg);
  MovingHorizonEstimator split(cfg);
  nmhe::EstimateResult a, b;
  for (int k = 0; k < static_cast<int>(data.size()); ++k) {
    const auto& s = data[k];
    one_shot.push_measurement(s.t, s.z, s.u);
    if (one_shot.window_full()) {
      a = one_shot.solve();
      one_shot.update_arrival_prior(a);
    }

    if (split.prepared()) {
      b = split.feedback(s.z);
      split.update_arrival_prior(b);
    }
    split.push_measurement(s.t, s.z, s.u);
    if (static_cast<int>(split.window().buffer.size()) >= cfg.horizon - 1) {
      split.prepare_next();
    }
  }
  REQUIRE(a.status == rti::SolveStatus::ok);
  REQUIRE(b.status == rti::SolveStatus::ok);
  CHECK(a.params.mu == doctest::Approx(b.params.mu).epsilon(1e-12));
  CHECK(a.params.kappa == doctest::Approx(b.params.kappa).epsilon(1e-12));
  CHECK(a.state.x == doctest::Approx(b.state.x).epsilon(1e-12));
}
