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

#include "furrow/track/counter.hpp"

#include <algorithm>

#include "furrow/errors.hpp"

namespace furrow::track {

CountingSession::CountingSession(const CountingParams& params, const KalmanParams& kalman,
                                 MotionProvider& motion, BoxRefiner* refiner)
    : params_(params), kalman_params_(kalman), motion_(motion),
      refiner_(refiner ? refiner : &identity_) {
  if (params.min_jaccard <= 0.0 || params.min_jaccard >= 1.0 || params.success_threshold < 1 ||
      params.removal_threshold < 0) {
    throw ConfigError("counting: invalid thresholds");
  }
}

void CountingSession::process_frame(const FrameDetections& fd) {
  if (any_frame_ && fd.frame <= last_frame_) {
    throw SequencingError("counting: frame indices must be strictly increasing");
  }
  const double dt_frames = any_frame_ ? static_cast<double>(fd.frame - last_frame_) : 1.0;

  // Tracking stage: flow projection robustified by the Kalman filter.
  std::vector<BoundingBox> projected(tracks_.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track& tr = tracks_[i];
    const auto flows = motion_.motions(last_frame_, tr.box);
    tr.kalman.predict(dt_frames);
    const auto moved = project_box(tr.box, flows);
    if (moved) {
      double mdx = 0.0, mdy = 0.0;
      for (const auto& f : flows) {
        mdx += f.dx;
        mdy += f.dy;
      }
      mdx /= static_cast<double>(flows.size());
      mdy /= static_cast<double>(flows.size());
      tr.kalman.update(Eigen::Vector4d{moved->x, moved->y, mdx, mdy});
    }
    // No features: the predicted state stands in unchanged.
    projected[i] = tr.box;
    projected[i].cx = tr.kalman.cx();
    projected[i].cy = tr.kalman.cy();
  }

  const MatchSet matches = match_boxes(projected, fd.boxes, params_.min_jaccard);

  for (const auto& m : matches.pairs) {
    Track& tr = tracks_[m.track_index];
    const BoundingBox refined = refiner_->refine(tr, projected[m.track_index]);
    tr.box = refined;
    tr.box.w = fd.boxes[m.detection_index].w;
    tr.box.h = fd.boxes[m.detection_index].h;
    tr.box.score = fd.boxes[m.detection_index].score;
    events_.push_back({CountEvent::Type::matched, fd.frame, tr.id, m.detection_index});
    if (tr.counted) {
      continue;
    }
    tr.lost = 0;
    tr.success += 1;
    if (tr.success > params_.success_threshold) {
      count_ += 1;
      tr.counted = true;
      events_.push_back({CountEvent::Type::counted, fd.frame, tr.id, m.detection_index});
    }
  }

  std::vector<int> to_remove;
  for (int i : matches.unmatched_tracks) {
    Track& tr = tracks_[i];
    tr.box = projected[i];  // keep following the prediction while unmatched
    tr.lost += 1;
    if (tr.lost > params_.removal_threshold) {
      to_remove.push_back(i);
    }
  }
  std::sort(to_remove.begin(), to_remove.end());
  for (auto it = to_remove.rbegin(); it != to_remove.rend(); ++it) {
    events_.push_back({CountEvent::Type::removed, fd.frame, tracks_[*it].id, -1});
    tracks_.erase(tracks_.begin() + *it);
  }

  for (int j : matches.unmatched_detections) {
    Track tr;
    tr.id = next_id_++;
    tr.box = fd.boxes[j];
    const auto flows = motion_.motions(last_frame_, tr.box);
    Eigen::Vector4d x0{tr.box.cx, tr.box.cy, 0.0, 0.0};
    if (const auto moved = project_box(tr.box, flows)) {
      x0[2] = moved->x - tr.box.cx;
      x0[3] = moved->y - tr.box.cy;
    }
    Eigen::Matrix4d p0 = Eigen::Matrix4d::Zero();
    p0(0, 0) = p0(1, 1) = kalman_params_.initial_position_var;
    p0(2, 2) = p0(3, 3) = kalman_params_.initial_velocity_var;
    tr.kalman = TrackKalman(x0, p0, kalman_params_.process.asDiagonal(),
                            kalman_params_.measurement.asDiagonal());
    events_.push_back({CountEvent::Type::created, fd.frame, tr.id, j});
    tracks_.push_back(std::move(tr));
  }

  last_frame_ = fd.frame;
  any_frame_ = true;
}

CountResult count_stream(const std::vector<FrameDetections>& stream, MotionProvider& motion,
                         const CountingParams& params, const KalmanParams& kalman,
                         BoxRefiner* refiner) {
  CountingSession session(params, kalman, motion, refiner);
  for (const auto& fd : stream) {
    session.process_frame(fd);
  }
  return session.result();
}

}  // namespace furrow::track
