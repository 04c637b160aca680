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

#include "furrow/harness/evaluate.hpp"

#include "furrow/errors.hpp"
#include "furrow/rng.hpp"

namespace furrow::harness {

TrackingEvaluation evaluate_tracking(const sim::ScenarioConfig& base, int seeds,
                                     const TrackingOptions& opts, bool keep_first_log) {
  if (seeds < 1) {
    throw ConfigError("evaluate: needs at least one seed");
  }
  TrackingEvaluation eval;
  MetricsReport& rep = eval.report;
  rep.violation_threshold = opts.violation_threshold;

  double mean_sum = 0.0;
  int converged = 0;
  for (int s = 0; s < seeds; ++s) {
    sim::ScenarioConfig cfg = base;
    cfg.seed = base.seed + static_cast<std::uint64_t>(s);
    const sim::SimLog log = sim::run_scenario(cfg);
    const TrackingMetrics m = tracking_metrics(log, opts);
    if (m.on_track_index >= 0) {
      rep.per_seed_mean.push_back(m.mean_after_on_track);
      rep.per_seed_violations.push_back(m.violations);
      mean_sum += m.mean_after_on_track;
      ++converged;
      if (m.violations == 0) {
        ++rep.seeds_without_violation;
      }
    } else {
      rep.per_seed_mean.push_back(-1.0);
      rep.per_seed_violations.push_back(-1);
    }
    if (s == 0) {
      rep.error_series = m.error;
      rep.on_track_index = m.on_track_index;
      rep.mean_after_on_track = m.mean_after_on_track;
      rep.max_after_on_track = m.max_after_on_track;
      rep.violations = m.violations;
      if (keep_first_log) {
        eval.first_log = log;
      }
    }
  }
  rep.seed_mean_of_means = converged > 0 ? mean_sum / converged : -1.0;
  return eval;
}

MetricsReport evaluate_counting(const CountingEvalConfig& cfg) {
  if (cfg.plots < 2 || cfg.min_objects < 1 || cfg.max_objects < cfg.min_objects) {
    throw ConfigError("evaluate: invalid counting configuration");
  }
  MetricsReport rep;
  rep.has_counting = true;

  auto size_rng = substream(cfg.base.seed, 20);
  std::uniform_int_distribution<int> objects(cfg.min_objects, cfg.max_objects);
  for (int p = 0; p < cfg.plots; ++p) {
    track::SynthConfig synth = cfg.base;
    synth.objects = objects(size_rng);
    synth.seed = cfg.base.seed + 1000 + static_cast<std::uint64_t>(p);
    const track::SynthStream stream = track::generate_stream(synth);
    track::TruthMotionProvider motion(stream.truth);
    const track::CountResult res =
        track::count_stream(stream.detections, motion, cfg.params, cfg.kalman);
    rep.count_pairs.emplace_back(static_cast<double>(stream.true_count),
                                 static_cast<double>(res.count));
  }
  rep.fit = linear_fit_and_r(rep.count_pairs);
  rep.rel = relative_error_stats(rep.count_pairs);
  return rep;
}

}  // namespace furrow::harness
