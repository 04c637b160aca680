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

#include "furrow/track/synth.hpp"

#include <algorithm>
#include <cmath>

#include "furrow/errors.hpp"
#include "furrow/rng.hpp"

namespace furrow::track {

SynthStream generate_stream(const SynthConfig& cfg) {
  if (cfg.objects < 1 || cfg.camera_speed <= 0.0 || cfg.box_w <= 0.0 || cfg.box_h <= 0.0) {
    throw ConfigError("synth: invalid stream configuration");
  }
  auto layout_rng = substream(cfg.seed, 10);
  auto noise_rng = substream(cfg.seed, 11);
  auto spur_rng = substream(cfg.seed, 12);

  struct Obj {
    double x0, y, w, h;
    int drop_start = -1, drop_len = 0;
  };
  std::vector<Obj> objs(cfg.objects);
  double x = static_cast<double>(cfg.frame_width) + cfg.box_w;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& o : objs) {
    o.x0 = x;
    o.y = cfg.y_center + gaussian(layout_rng, 0.0, cfg.y_jitter);
    o.w = std::max(8.0, cfg.box_w * (1.0 + gaussian(layout_rng, 0.0, cfg.size_jitter)));
    o.h = std::max(8.0, cfg.box_h * (1.0 + gaussian(layout_rng, 0.0, cfg.size_jitter)));
    const double jitter = 1.0 + cfg.spacing_jitter * (2.0 * unit(layout_rng) - 1.0);
    x += std::max(cfg.spacing_mean * jitter, cfg.box_w * 0.75);
  }

  const double span = x + static_cast<double>(cfg.frame_width);
  const int frames = static_cast<int>(std::ceil(span / cfg.camera_speed));

  // Visibility: the whole box inside the frame.
  const auto visible = [&](const Obj& o, double t) {
    const double cx = o.x0 - cfg.camera_speed * t;
    return cx - 0.5 * o.w >= 0.0 && cx + 0.5 * o.w <= cfg.frame_width;
  };

  // Scheduled detection gaps, one per chosen object, mid-visibility.
  for (auto& o : objs) {
    if (cfg.dropout_max_run <= 0 || unit(noise_rng) >= cfg.dropout_prob) {
      continue;
    }
    int first = -1, last = -1;
    for (int f = 0; f < frames; ++f) {
      if (visible(o, f)) {
        if (first < 0) first = f;
        last = f;
      }
    }
    if (first < 0 || last - first < cfg.dropout_max_run + 4) {
      continue;
    }
    o.drop_len = 1 + static_cast<int>(unit(noise_rng) * cfg.dropout_max_run);
    o.drop_len = std::min(o.drop_len, cfg.dropout_max_run);
    const int lo = first + 2;
    const int hi = last - 2 - o.drop_len;
    o.drop_start = lo + static_cast<int>(unit(noise_rng) * std::max(1, hi - lo));
  }

  // Short-lived spurious detections.
  struct Spur {
    int start;
    BoundingBox box;
  };
  std::vector<Spur> spurs;
  for (int s = 0; s < cfg.spurious; ++s) {
    Spur sp;
    sp.start = static_cast<int>(unit(spur_rng) * std::max(1, frames - cfg.spurious_life - 1));
    sp.box.cx = cfg.box_w + unit(spur_rng) * (cfg.frame_width - 2.0 * cfg.box_w);
    sp.box.cy = cfg.y_center + gaussian(spur_rng, 0.0, 3.0 * std::max(cfg.y_jitter, 1.0));
    sp.box.w = cfg.box_w * 0.8;
    sp.box.h = cfg.box_h * 0.8;
    sp.box.score = 0.5;
    spurs.push_back(sp);
  }

  SynthStream out;
  out.true_count = cfg.objects;
  out.detections.reserve(frames);
  out.truth.reserve(frames);
  for (int f = 0; f < frames; ++f) {
    FrameDetections fd;
    fd.frame = f;
    fd.t = f / cfg.fps;
    TruthFrame tf;
    tf.frame = f;
    tf.t = fd.t;
    for (int i = 0; i < cfg.objects; ++i) {
      const Obj& o = objs[i];
      if (!visible(o, f)) {
        continue;
      }
      TruthObject tob;
      tob.id = i;
      tob.box = {o.x0 - cfg.camera_speed * f, o.y, o.w, o.h, 1.0};
      tob.dx = -cfg.camera_speed;
      tob.dy = 0.0;
      tf.objects.push_back(tob);

      const bool dropped = o.drop_start >= 0 && f >= o.drop_start &&
                           f < o.drop_start + o.drop_len;
      if (dropped) {
        continue;
      }
      BoundingBox det = tob.box;
      det.cx += gaussian(noise_rng, 0.0, cfg.center_noise);
      det.cy += gaussian(noise_rng, 0.0, cfg.center_noise);
      det.w = std::max(4.0, det.w + gaussian(noise_rng, 0.0, cfg.size_noise));
      det.h = std::max(4.0, det.h + gaussian(noise_rng, 0.0, cfg.size_noise));
      det.score = 0.9;
      fd.boxes.push_back(det);
    }
    for (const auto& sp : spurs) {
      if (f >= sp.start && f < sp.start + cfg.spurious_life) {
        fd.boxes.push_back(sp.box);
      }
    }
    out.detections.push_back(std::move(fd));
    out.truth.push_back(std::move(tf));
  }
  return out;
}

TruthMotionProvider::TruthMotionProvider(const std::vector<TruthFrame>& truth) : truth_(truth) {
  base_frame_ = truth.empty() ? 0 : truth.front().frame;
}

std::vector<FeatureMotion> TruthMotionProvider::motions(int prev_frame, const BoundingBox& box) {
  const int idx = prev_frame - base_frame_;
  if (idx < 0 || idx >= static_cast<int>(truth_.size())) {
    return {};
  }
  std::vector<FeatureMotion> out;
  for (const auto& o : truth_[idx].objects) {
    if (o.box.cx >= box.left() && o.box.cx <= box.right() && o.box.cy >= box.top() &&
        o.box.cy <= box.bottom()) {
      out.push_back({o.box.cx, o.box.cy, o.dx, o.dy});
    }
  }
  return out;
}

std::vector<std::vector<int>> truth_identities(const SynthStream& stream) {
  std::vector<std::vector<int>> ids(stream.detections.size());
  for (std::size_t f = 0; f < stream.detections.size(); ++f) {
    const auto& dets = stream.detections[f].boxes;
    const auto& truth = stream.truth[f].objects;
    ids[f].assign(dets.size(), -1);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      double best = 0.25;  // spurious boxes stay unassigned
      for (const auto& o : truth) {
        const double s = jaccard(dets[d], o.box);
        if (s > best) {
          best = s;
          ids[f][d] = o.id;
        }
      }
    }
  }
  return ids;
}

}  // namespace furrow::track
