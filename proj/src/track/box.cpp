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

#include "furrow/track/box.hpp"

#include <algorithm>

namespace furrow::track {

double jaccard(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (ix <= 0.0 || iy <= 0.0) {
    return 0.0;
  }
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::optional<Point2> project_box(const BoundingBox& box,
                                  const std::vector<FeatureMotion>& motions) {
  if (motions.empty()) {
    return std::nullopt;
  }
  double dx = 0.0, dy = 0.0;
  for (const auto& m : motions) {
    dx += m.dx;
    dy += m.dy;
  }
  const double inv = 1.0 / static_cast<double>(motions.size());
  return Point2{box.cx + dx * inv, box.cy + dy * inv};
}

}  // namespace furrow::track
