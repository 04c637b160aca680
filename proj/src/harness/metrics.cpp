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

#include "furrow/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "furrow/errors.hpp"

namespace furrow::harness {

std::vector<double> euclidean_error(const sim::SimLog& log) {
  if (log.records.empty()) {
    throw ConfigError("euclidean_error: empty log");
  }
  std::vector<double> err;
  err.reserve(log.records.size());
  for (const auto& r : log.records) {
    err.push_back(std::hypot(r.x_true - r.x_ref, r.y_true - r.y_ref));
  }
  return err;
}

int count_violations(const std::vector<double>& series, double threshold, std::size_t start) {
  if (threshold <= 0.0) {
    throw ConfigError("count_violations: threshold must be positive");
  }
  int n = 0;
  for (std::size_t i = start; i < series.size(); ++i) {
    if (series[i] > threshold) {
      ++n;
    }
  }
  return n;
}

TrackingMetrics tracking_metrics(const sim::SimLog& log, const TrackingOptions& opts) {
  TrackingMetrics m;
  m.error = euclidean_error(log);
  m.violation_threshold = opts.violation_threshold;

  int run = 0;
  for (std::size_t i = 0; i < m.error.size(); ++i) {
    run = m.error[i] < opts.on_track_threshold ? run + 1 : 0;
    if (run >= opts.on_track_consecutive) {
      m.on_track_index = static_cast<int>(i) - opts.on_track_consecutive + 1;
      break;
    }
  }
  if (m.on_track_index >= 0) {
    double sum = 0.0;
    double worst = 0.0;
    const std::size_t start = static_cast<std::size_t>(m.on_track_index);
    for (std::size_t i = start; i < m.error.size(); ++i) {
      sum += m.error[i];
      worst = std::max(worst, m.error[i]);
    }
    m.mean_after_on_track = sum / static_cast<double>(m.error.size() - start);
    m.max_after_on_track = worst;
    m.violations = count_violations(m.error, opts.violation_threshold, start);
  }
  return m;
}

LinearFit linear_fit_and_r(const std::vector<std::pair<double, double>>& pairs) {
  const std::size_t n = pairs.size();
  if (n < 2) {
    throw ConfigError("linear_fit_and_r: need at least two pairs");
  }
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pairs) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0) {
    throw ConfigError("linear_fit_and_r: x values are degenerate, fit undefined");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.pearson_r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 1.0;
  return fit;
}

RelativeErrorStats relative_error_stats(const std::vector<std::pair<double, double>>& pairs,
                                        double bin_width) {
  if (bin_width <= 0.0) {
    throw ConfigError("relative_error_stats: bin width must be positive");
  }
  RelativeErrorStats stats;
  stats.bin_width = bin_width;
  for (const auto& [human, robot] : pairs) {
    if (human == 0.0) {
      ++stats.skipped;  // relative error undefined for a zero reference count
      continue;
    }
    stats.errors.push_back((robot - human) / human * 100.0);
  }
  const std::size_t n = stats.errors.size();
  if (n == 0) {
    return stats;
  }
  double sum = 0.0;
  for (double e : stats.errors) sum += e;
  stats.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double e : stats.errors) ss += (e - stats.mean) * (e - stats.mean);
    stats.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }

  // Fixed-width bins centered on zero: bin k covers ((k-1/2)w, (k+1/2)w].
  int lo_bin = 0, hi_bin = 0;
  for (double e : stats.errors) {
    const int b = static_cast<int>(std::lround(e / bin_width));
    lo_bin = std::min(lo_bin, b);
    hi_bin = std::max(hi_bin, b);
  }
  std::vector<int> counts(hi_bin - lo_bin + 1, 0);
  for (double e : stats.errors) {
    counts[static_cast<int>(std::lround(e / bin_width)) - lo_bin]++;
  }
  for (int b = lo_bin; b <= hi_bin; ++b) {
    stats.histogram.emplace_back(b * bin_width, counts[b - lo_bin]);
  }
  return stats;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["on_track_index"] = on_track_index;
  j["mean_after_on_track"] = mean_after_on_track;
  j["max_after_on_track"] = max_after_on_track;
  j["violations"] = violations;
  j["violation_threshold"] = violation_threshold;
  if (!per_seed_mean.empty()) {
    j["per_seed_mean"] = per_seed_mean;
    j["per_seed_violations"] = per_seed_violations;
    j["seed_mean_of_means"] = seed_mean_of_means;
    j["seeds_without_violation"] = seeds_without_violation;
  }
  if (!error_series.empty()) {
    j["error_series"] = error_series;
  }
  if (has_counting) {
    nlohmann::ordered_json counting;
    counting["pairs"] = count_pairs;
    counting["slope"] = fit.slope;
    counting["intercept"] = fit.intercept;
    counting["pearson_r"] = fit.pearson_r;
    counting["rel_mean_percent"] = rel.mean;
    counting["rel_std_percent"] = rel.stddev;
    counting["rel_errors"] = rel.errors;
    nlohmann::ordered_json hist = nlohmann::ordered_json::array();
    for (const auto& [center, count] : rel.histogram) {
      hist.push_back({{"center", center}, {"count", count}});
    }
    counting["histogram"] = hist;
    j["counting"] = counting;
  }
  return j.dump(2) + "\n";
}

}  // namespace furrow::harness
