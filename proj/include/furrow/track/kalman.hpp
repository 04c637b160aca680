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

#include <Eigen/Dense>

namespace furrow::track {

/// Constant-velocity filter on a box center. State [ox, oy, vx, vy] in
/// pixels and pixels/frame; the measurement stacks the flow-projected center
/// and the mean flow, observed through an identity matrix.
class TrackKalman {
 public:
  TrackKalman() = default;
  TrackKalman(const Eigen::Vector4d& x0, const Eigen::Matrix4d& p0, const Eigen::Matrix4d& q,
              const Eigen::Matrix4d& r);

  void predict(double dt_frames = 1.0);
  void update(const Eigen::Vector4d& z);

  const Eigen::Vector4d& state() const { return x_; }
  const Eigen::Matrix4d& covariance() const { return p_; }
  double cx() const { return x_[0]; }
  double cy() const { return x_[1]; }

 private:
  Eigen::Vector4d x_ = Eigen::Vector4d::Zero();
  Eigen::Matrix4d p_ = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d q_ = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d r_ = Eigen::Matrix4d::Identity();
};

}  // namespace furrow::track
