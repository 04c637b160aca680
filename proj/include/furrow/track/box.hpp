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

#include <optional>
#include <vector>

namespace furrow::track {

/// Axis-aligned detection box in pixel coordinates.
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double score = 1.0;

  double left() const { return cx - 0.5 * w; }
  double right() const { return cx + 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double bottom() const { return cy + 0.5 * h; }
  double area() const { return w * h; }
};

struct FrameDetections {
  int frame = 0;
  double t = 0.0;
  std::vector<BoundingBox> boxes;
};

/// Sparse optical-flow sample: a feature point and its per-frame motion.
struct FeatureMotion {
  double x = 0.0;
  double y = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

/// Intersection over union of two axis-aligned boxes, in [0, 1].
double jaccard(const BoundingBox& a, const BoundingBox& b);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Projected box center: the current center moved by the mean of the feature
/// motions. Empty motions mean no features were found; the caller falls back
/// to the Kalman prediction alone.
std::optional<Point2> project_box(const BoundingBox& box,
                                  const std::vector<FeatureMotion>& motions);

}  // namespace furrow::track
