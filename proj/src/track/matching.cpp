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

#include "furrow/track/matching.hpp"

#include <limits>

#include "furrow/errors.hpp"

namespace furrow::track {

namespace {
// Nudge applied so that, among assignments of equal total weight, lower row
// indices take the higher-weight column. Far below the comparison tolerance
// of any caller.
constexpr double kTieBreak = 1e-12;
}  // namespace

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  const int rows = static_cast<int>(weights.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(weights[0].size());
  if (rows == 0 || cols == 0) {
    return std::vector<int>(rows, -1);
  }
  const int n = std::max(rows, cols);  // padded square size

  // Hungarian algorithm with potentials on the negated (cost) matrix.
  const double inf = std::numeric_limits<double>::infinity();
  const auto cost = [&](int i, int j) -> double {
    if (i < rows && j < cols) {
      return -weights[i][j];
    }
    return 0.0;  // padding
  };

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1, false);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> match(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = p[j] - 1;
    if (i >= 0 && i < rows && j - 1 < cols) {
      match[i] = j - 1;
    }
  }
  return match;
}

MatchSet match_boxes(const std::vector<BoundingBox>& projected,
                     const std::vector<BoundingBox>& detections, double min_score) {
  if (min_score <= 0.0 || min_score >= 1.0) {
    throw ConfigError("match_boxes: min_score must lie in (0, 1)");
  }
  const int nt = static_cast<int>(projected.size());
  const int nd = static_cast<int>(detections.size());

  MatchSet out;
  std::vector<std::vector<double>> scores(nt, std::vector<double>(nd, 0.0));
  std::vector<std::vector<double>> weights(nt, std::vector<double>(nd, 0.0));
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nd; ++j) {
      const double s = jaccard(projected[i], detections[j]);
      scores[i][j] = s;
      weights[i][j] = s * (1.0 + kTieBreak * static_cast<double>(nt - i));
    }
  }

  const std::vector<int> match = max_weight_assignment(weights);
  std::vector<bool> det_taken(nd, false);
  for (int i = 0; i < nt; ++i) {
    const int j = match[i];
    if (j < 0) {
      out.unmatched_tracks.push_back(i);
      continue;
    }
    out.total_score += scores[i][j];
    if (scores[i][j] < min_score) {
      out.unmatched_tracks.push_back(i);  // below-threshold pairs dissolve
      continue;
    }
    out.pairs.push_back({i, j, scores[i][j]});
    det_taken[j] = true;
  }
  for (int j = 0; j < nd; ++j) {
    if (!det_taken[j]) {
      out.unmatched_detections.push_back(j);
    }
  }
  return out;
}

}  // namespace furrow::track
