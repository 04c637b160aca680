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

#include <string>
#include <vector>

#include "furrow/track/counter.hpp"

namespace furrow::track {

struct ImageRgb {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> data;  // interleaved rgb, row-major

  unsigned char r(int x, int y) const { return data[3 * (y * width + x) + 0]; }
  unsigned char g(int x, int y) const { return data[3 * (y * width + x) + 1]; }
  unsigned char b(int x, int y) const { return data[3 * (y * width + x) + 2]; }
};

struct ImageGray {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  double at(int x, int y) const { return data[y * width + x]; }
};

/// Excess green vegetation index (2G - R - B) / (R + G + B) per pixel, in
/// [-1, 2]. All-zero pixels map to 0.
ImageGray excess_green(const ImageRgb& rgb);

/// Binary PPM (P6) reader for raw image-sequence directories.
ImageRgb read_ppm(const std::string& path);

/// Sparse block-matching flow on excess-green images: feature points are
/// local maxima of the gradient magnitude inside the query box (up to
/// max_features), each matched in the next frame by SAD over a small patch.
class BlockMatchingFlow : public MotionProvider {
 public:
  BlockMatchingFlow(std::vector<std::string> frame_paths, int max_features = 20,
                    int patch_radius = 3, int search_radius = 12);

  std::vector<FeatureMotion> motions(int prev_frame, const BoundingBox& box) override;

 private:
  const ImageGray& frame(int index);

  std::vector<std::string> paths_;
  std::vector<ImageGray> cache_;
  std::vector<bool> loaded_;
  int max_features_;
  int patch_radius_;
  int search_radius_;
};

}  // namespace furrow::track
