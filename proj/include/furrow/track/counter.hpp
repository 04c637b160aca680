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

#include <memory>
#include <string>
#include <vector>

#include "furrow/track/box.hpp"
#include "furrow/track/kalman.hpp"
#include "furrow/track/matching.hpp"

namespace furrow::track {

/// Counting thresholds: S_min (minimum Jaccard), p (success frames before a
/// track is counted), q (missed frames before a track is removed).
struct CountingParams {
  double min_jaccard = 0.3;
  int success_threshold = 3;
  int removal_threshold = 5;
};

struct KalmanParams {
  Eigen::Vector4d process{1.0, 1.0, 4.0, 4.0};       // Q diagonal [px^2]
  Eigen::Vector4d measurement{4.0, 4.0, 9.0, 9.0};   // R diagonal [px^2]
  double initial_position_var = 25.0;                // [px^2]
  double initial_velocity_var = 25.0;                // [px^2/frame^2]
};

struct Track {
  int id = -1;
  BoundingBox box;
  TrackKalman kalman;
  int success = 1;  // counts the detection that created the track
  int lost = 0;
  bool counted = false;
};

struct CountEvent {
  enum class Type { created, matched, counted, removed };
  Type type;
  int frame = 0;
  int track_id = -1;
  int detection_index = -1;
};

struct CountResult {
  int count = 0;
  std::vector<CountEvent> events;
};

/// Supplies sparse feature motion between the previous processed frame and
/// the current one for features inside a query box.
class MotionProvider {
 public:
  virtual ~MotionProvider() = default;
  virtual std::vector<FeatureMotion> motions(int prev_frame, const BoundingBox& box) = 0;
};

/// No motion information: every box falls back to its Kalman prediction.
class NullMotionProvider : public MotionProvider {
 public:
  std::vector<FeatureMotion> motions(int, const BoundingBox&) override { return {}; }
};

/// Hook refining a projected track box from image evidence. The default is
/// the identity, leaving the flow/Kalman projection untouched.
class BoxRefiner {
 public:
  virtual ~BoxRefiner() = default;
  virtual BoundingBox refine(const Track& track, const BoundingBox& projected) {
    (void)track;
    return projected;
  }
};

/// Tracking-by-detection counter. Per frame: project every live track with
/// optical flow robustified by its Kalman filter, match projections against
/// the detections by maximizing the total Jaccard index, then update the
/// success/lost counters and the running count.
class CountingSession {
 public:
  CountingSession(const CountingParams& params, const KalmanParams& kalman,
                  MotionProvider& motion, BoxRefiner* refiner = nullptr);

  /// Throws SequencingError when the frame index does not increase.
  void process_frame(const FrameDetections& fd);

  int count() const { return count_; }
  const std::vector<Track>& tracks() const { return tracks_; }
  const std::vector<CountEvent>& events() const { return events_; }
  CountResult result() const { return {count_, events_}; }

 private:
  CountingParams params_;
  KalmanParams kalman_params_;
  MotionProvider& motion_;
  BoxRefiner* refiner_;
  BoxRefiner identity_;

  std::vector<Track> tracks_;
  std::vector<CountEvent> events_;
  int count_ = 0;
  int next_id_ = 0;
  int last_frame_ = -1;
  bool any_frame_ = false;
};

/// Folds process_frame over a whole detection stream.
CountResult count_stream(const std::vector<FrameDetections>& stream, MotionProvider& motion,
                         const CountingParams& params, const KalmanParams& kalman = {},
                         BoxRefiner* refiner = nullptr);

}  // namespace furrow::track
