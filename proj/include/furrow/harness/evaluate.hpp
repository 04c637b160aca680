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

#include <cstdint>

#include "furrow/harness/metrics.hpp"
#include "furrow/sim/scenario.hpp"
#include "furrow/track/counter.hpp"
#include "furrow/track/synth.hpp"

namespace furrow::harness {

/// Runs the scenario for `seeds` consecutive seeds starting at
/// base.seed and aggregates the tracking statistics. Seeds that never reach
/// the on-track band report a per-seed mean of -1. The first seed's error
/// series and log are kept for plotting when keep_first_log is set.
struct TrackingEvaluation {
  MetricsReport report;
  sim::SimLog first_log;
};
TrackingEvaluation evaluate_tracking(const sim::ScenarioConfig& base, int seeds,
                                     const TrackingOptions& opts = {},
                                     bool keep_first_log = true);

/// Generates `plots` synthetic streams (object count uniform in
/// [min_objects, max_objects]), counts each with the ground-truth motion
/// provider and reports the count regression statistics.
struct CountingEvalConfig {
  track::SynthConfig base;
  int plots = 53;
  int min_objects = 12;
  int max_objects = 22;
  track::CountingParams params;
  track::KalmanParams kalman;
};
MetricsReport evaluate_counting(const CountingEvalConfig& cfg);

}  // namespace furrow::harness
