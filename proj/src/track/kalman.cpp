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

#include "furrow/track/kalman.hpp"

#include "furrow/errors.hpp"

namespace furrow::track {

namespace {
bool psd(const Eigen::Matrix4d& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  return es.eigenvalues().minCoeff() >= -1e-9;
}
}  // namespace

TrackKalman::TrackKalman(const Eigen::Vector4d& x0, const Eigen::Matrix4d& p0,
                         const Eigen::Matrix4d& q, const Eigen::Matrix4d& r)
    : x_(x0), p_(p0), q_(q), r_(r) {
  if (!psd(p0) || !psd(q) || !psd(r)) {
    throw ConfigError("kalman: covariance matrices must be positive semi-definite");
  }
}

void TrackKalman::predict(double dt_frames) {
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = dt_frames;
  f(1, 3) = dt_frames;
  x_ = f * x_;
  p_ = f * p_ * f.transpose() + q_;
  p_ = 0.5 * (p_ + p_.transpose());
}

void TrackKalman::update(const Eigen::Vector4d& z) {
  // Identity observation; Joseph-form covariance update keeps P symmetric PSD.
  const Eigen::Matrix4d s = p_ + r_;
  const Eigen::Matrix4d k = p_ * s.ldlt().solve(Eigen::Matrix4d::Identity());
  x_ += k * (z - x_);
  const Eigen::Matrix4d ik = Eigen::Matrix4d::Identity() - k;
  p_ = ik * p_ * ik.transpose() + k * r_ * k.transpose();
  p_ = 0.5 * (p_ + p_.transpose());
}

}  // namespace furrow::track
