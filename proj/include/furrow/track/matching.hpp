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

#include <vector>

#include "furrow/track/box.hpp"

namespace furrow::track {

struct MatchPair {
  int track_index = -1;
  int detection_index = -1;
  double score = 0.0;  // Jaccard index of the pair
};

struct MatchSet {
  std::vector<MatchPair> pairs;              // above-threshold matches
  std::vector<int> unmatched_tracks;          // indices into the projected list
  std::vector<int> unmatched_detections;
  double total_score = 0.0;                   // optimal assignment total, pre-threshold
};

/// Maximum-weight assignment for a dense non-negative weight matrix
/// (rows x cols), padded internally to square. Returns col index per row,
/// -1 for unassigned rows. Deterministic.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

/// Global one-to-one matching maximizing the total Jaccard index between the
/// projected track boxes and the frame detections. Pairs below min_score are
/// dropped afterwards and their members reported unmatched. Ties between
/// equal-total assignments are resolved toward giving lower track indices
/// the higher-Jaccard detection.
MatchSet match_boxes(const std::vector<BoundingBox>& projected,
                     const std::vector<BoundingBox>& detections, double min_score);

}  // namespace furrow::track
