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

#include "furrow/track/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "furrow/errors.hpp"

namespace furrow::track {

ImageGray excess_green(const ImageRgb& rgb) {
  ImageGray out;
  out.width = rgb.width;
  out.height = rgb.height;
  out.data.resize(static_cast<std::size_t>(rgb.width) * rgb.height, 0.0);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double r = rgb.data[3 * i + 0];
    const double g = rgb.data[3 * i + 1];
    const double b = rgb.data[3 * i + 2];
    const double sum = r + g + b;
    out.data[i] = sum > 0.0 ? (2.0 * g - r - b) / sum : 0.0;
  }
  return out;
}

ImageRgb read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open image: " + path);
  }
  std::string magic;
  in >> magic;
  if (magic != "P6") {
    throw IoError("unsupported image format (want binary PPM P6): " + path);
  }
  const auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoError("truncated PPM header: " + path);
  };
  ImageRgb img;
  img.width = std::stoi(next_token());
  img.height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (img.width <= 0 || img.height <= 0 || maxval != 255) {
    throw IoError("unsupported PPM geometry: " + path);
  }
  in.get();  // single whitespace after maxval
  img.data.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (!in) {
    throw IoError("truncated PPM payload: " + path);
  }
  return img;
}

BlockMatchingFlow::BlockMatchingFlow(std::vector<std::string> frame_paths, int max_features,
                                     int patch_radius, int search_radius)
    : paths_(std::move(frame_paths)), cache_(paths_.size()), loaded_(paths_.size(), false),
      max_features_(max_features), patch_radius_(patch_radius), search_radius_(search_radius) {}

const ImageGray& BlockMatchingFlow::frame(int index) {
  if (index < 0 || index >= static_cast<int>(paths_.size())) {
    throw IoError("flow: frame index out of range");
  }
  if (!loaded_[index]) {
    cache_[index] = excess_green(read_ppm(paths_[index]));
    loaded_[index] = true;
  }
  return cache_[index];
}

std::vector<FeatureMotion> BlockMatchingFlow::motions(int prev_frame, const BoundingBox& box) {
  if (prev_frame < 0 || prev_frame + 1 >= static_cast<int>(paths_.size())) {
    return {};
  }
  const ImageGray& a = frame(prev_frame);
  const ImageGray& b = frame(prev_frame + 1);
  const int pr = patch_radius_;

  const int x0 = std::max(static_cast<int>(box.left()), pr + 1);
  const int x1 = std::min(static_cast<int>(box.right()), a.width - pr - 2);
  const int y0 = std::max(static_cast<int>(box.top()), pr + 1);
  const int y1 = std::min(static_cast<int>(box.bottom()), a.height - pr - 2);
  if (x0 >= x1 || y0 >= y1) {
    return {};
  }

  // Feature points: local maxima of the excess-green gradient magnitude.
  struct Corner {
    double strength;
    int x, y;
  };
  std::vector<Corner> corners;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double gx = a.at(x + 1, y) - a.at(x - 1, y);
      const double gy = a.at(x, y + 1) - a.at(x, y - 1);
      const double mag = gx * gx + gy * gy;
      bool is_max = mag > 1e-6;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const double ogx = a.at(x + dx + 1, y + dy) - a.at(x + dx - 1, y + dy);
          const double ogy = a.at(x + dx, y + dy + 1) - a.at(x + dx, y + dy - 1);
          if (ogx * ogx + ogy * ogy > mag) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) {
        corners.push_back({mag, x, y});
      }
    }
  }
  std::stable_sort(corners.begin(), corners.end(),
                   [](const Corner& l, const Corner& r) { return l.strength > r.strength; });
  if (static_cast<int>(corners.size()) > max_features_) {
    corners.resize(max_features_);
  }

  std::vector<FeatureMotion> result;
  for (const Corner& c : corners) {
    double best = std::numeric_limits<double>::infinity();
    int best_dx = 0, best_dy = 0;
    for (int dy = -search_radius_; dy <= search_radius_; ++dy) {
      for (int dx = -search_radius_; dx <= search_radius_; ++dx) {
        const int nx = c.x + dx;
        const int ny = c.y + dy;
        if (nx - pr < 0 || nx + pr >= b.width || ny - pr < 0 || ny + pr >= b.height) {
          continue;
        }
        double sad = 0.0;
        for (int py = -pr; py <= pr; ++py) {
          for (int px = -pr; px <= pr; ++px) {
            sad += std::abs(a.at(c.x + px, c.y + py) - b.at(nx + px, ny + py));
          }
        }
        if (sad < best) {
          best = sad;
          best_dx = dx;
          best_dy = dy;
        }
      }
    }
    result.push_back({static_cast<double>(c.x), static_cast<double>(c.y),
                      static_cast<double>(best_dx), static_cast<double>(best_dy)});
  }
  return result;
}

}  // namespace furrow::track
