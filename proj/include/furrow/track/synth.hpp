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
#include <string>
#include <vector>

#include "furrow/track/counter.hpp"

namespace furrow::track {

/// Synthetic row-pass detection stream: plants spaced along a row slide
/// through a side camera's frame at the traversal speed. Noise knobs inject
/// detection jitter, short dropouts and short-lived spurious detections.
struct SynthConfig {
  int frame_width = 640;
  int frame_height = 480;
  double fps = 30.0;
  double camera_speed = 4.0;  // [px/frame], scene moves right-to-left
  int objects = 17;
  double spacing_mean = 60.0;  // [px] between plant centers
  double spacing_jitter = 0.25;
  double box_w = 48.0;
  double box_h = 64.0;
  double size_jitter = 0.15;
  double y_center = 260.0;
  double y_jitter = 18.0;

  double center_noise = 0.0;  // detection center jitter std [px]
  double size_noise = 0.0;    // detection size jitter std [px]
  int dropout_max_run = 0;    // longest scheduled per-object detection gap [frames]
  double dropout_prob = 0.0;  // chance an object gets one such gap
  int spurious = 0;           // short-lived false detections over the pass
  int spurious_life = 2;      // [frames]

  std::uint64_t seed = 1;
};

struct TruthObject {
  int id = -1;
  BoundingBox box;
  double dx = 0.0;  // true per-frame motion
  double dy = 0.0;
};

struct TruthFrame {
  int frame = 0;
  double t = 0.0;
  std::vector<TruthObject> objects;
};

struct SynthStream {
  std::vector<FrameDetections> detections;
  std::vector<TruthFrame> truth;
  int true_count = 0;
};

SynthStream generate_stream(const SynthConfig& cfg);

/// Ground-truth motion provider: features are the truth object centers that
/// fall inside the query box, moving with the true per-frame displacement.
class TruthMotionProvider : public MotionProvider {
 public:
  explicit TruthMotionProvider(const std::vector<TruthFrame>& truth);
  std::vector<FeatureMotion> motions(int prev_frame, const BoundingBox& box) override;

 private:
  const std::vector<TruthFrame>& truth_;
  int base_frame_ = 0;
};

/// Oracle for tests: true identity of each detection (frame, det index) ->
/// object id, by nearest truth box with significant overlap; -1 for spurious.
std::vector<std::vector<int>> truth_identities(const SynthStream& stream);

}  // namespace furrow::track
