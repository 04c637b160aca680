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

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "furrow/sim/log.hpp"

namespace furrow::harness {

struct TrackingOptions {
  double on_track_threshold = 0.10;  // [m]
  int on_track_consecutive = 10;     // samples below threshold to call it on-track
  double violation_threshold = 0.12; // [m] lateral clearance limit
};

struct TrackingMetrics {
  std::vector<double> error;       // per-sample Euclidean error [m]
  int on_track_index = -1;         // first sample of the on-track stretch; -1 if never
  double mean_after_on_track = 0.0;
  double max_after_on_track = 0.0;
  int violations = 0;              // samples above the violation threshold, after on-track
  double violation_threshold = 0.12;
};

/// Per-sample Euclidean distance between the true position and its
/// time-matched reference. Throws ConfigError on an empty log.
std::vector<double> euclidean_error(const sim::SimLog& log);

/// Number of entries of series[start..] strictly above the threshold.
int count_violations(const std::vector<double>& series, double threshold,
                     std::size_t start = 0);

TrackingMetrics tracking_metrics(const sim::SimLog& log, const TrackingOptions& opts = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double pearson_r = 0.0;
};

/// Ordinary least squares y = slope * x + intercept plus Pearson correlation.
/// Throws ConfigError when the x values are degenerate (< 2 distinct).
LinearFit linear_fit_and_r(const std::vector<std::pair<double, double>>& pairs);

struct RelativeErrorStats {
  std::vector<double> errors;  // percent, one per usable pair
  double mean = 0.0;
  double stddev = 0.0;         // sample standard deviation (n - 1)
  int skipped = 0;             // pairs with a zero human count
  std::vector<std::pair<double, int>> histogram;  // (bin center, count)
  double bin_width = 2.5;
};

/// Relative counting error (robot - human) / human * 100% per pair, with
/// sample statistics and a fixed-width histogram centered at zero.
RelativeErrorStats relative_error_stats(const std::vector<std::pair<double, double>>& pairs,
                                        double bin_width = 2.5);

/// Aggregate report of a scenario evaluation, serializable to JSON.
struct MetricsReport {
  std::vector<double> error_series;
  int on_track_index = -1;
  double mean_after_on_track = 0.0;
  double max_after_on_track = 0.0;
  int violations = 0;
  double violation_threshold = 0.12;

  // Multi-seed aggregation.
  std::vector<double> per_seed_mean;
  std::vector<int> per_seed_violations;
  double seed_mean_of_means = 0.0;
  int seeds_without_violation = 0;

  // Counting evaluation.
  std::vector<std::pair<double, double>> count_pairs;  // (human, robot)
  LinearFit fit;
  RelativeErrorStats rel;
  bool has_counting = false;

  std::string to_json() const;
};

}  // namespace furrow::harness
