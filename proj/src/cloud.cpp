// Copyright 2026 The Pseudo3D Authors. All Rights Reserved.
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

#include "pseudo3d/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pseudo3d/error.hpp"

namespace pseudo3d {
namespace {

void check_finite(std::span<const double> values, const char* what) {
  for (double x : values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, std::string(what) + " contains NaN or Inf");
  }
}

void check_grid(std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) throw Error(ErrorCode::TooSmall, "grid must have positive width and height");
}

}  // namespace

PseudoPointCloud::PseudoPointCloud(std::size_t width, std::size_t height, std::vector<double> xyz,
                                   std::optional<std::vector<Rgb8>> colors)
    : width_(width), height_(height), xyz_(std::move(xyz)), colors_(std::move(colors)) {
  check_grid(width_, height_);
  if (xyz_.size() != 3 * width_ * height_) {
    throw Error(ErrorCode::ShapeMismatch, "cloud needs 3 coordinates per grid cell");
  }
  if (colors_ && colors_->size() != width_ * height_) {
    throw Error(ErrorCode::ShapeMismatch, "cloud colors must match the point count");
  }
  check_finite(xyz_, "point cloud");
}

PseudoPointCloud::PseudoPointCloud(std::size_t width, std::size_t height, std::span<const Point3> points)
    : PseudoPointCloud(width, height, [&] {
        std::vector<double> xyz;
        xyz.reserve(3 * points.size());
        for (const Point3& p : points) {
          xyz.push_back(p.x);
          xyz.push_back(p.y);
          xyz.push_back(p.z);
        }
        return xyz;
      }()) {}

PseudoPointCloud PseudoPointCloud::with_colors(std::vector<Rgb8> colors) const {
  return PseudoPointCloud(width_, height_, xyz_, std::move(colors));
}

CoordinateMap::CoordinateMap(std::size_t width, std::size_t height, std::vector<double> planes)
    : width_(width), height_(height), planes_(std::move(planes)) {
  check_grid(width_, height_);
  if (planes_.size() != kChannels * width_ * height_) {
    throw Error(ErrorCode::ShapeMismatch, "coordinate map needs 3 planes of width x height");
  }
  check_finite(planes_, "coordinate map");
}

CoordinateMap to_coordinate_map(const PseudoPointCloud& cloud) {
  const std::size_t n = cloud.size();
  std::vector<double> planes(3 * n);
  const std::span<const double> xyz = cloud.xyz();
  for (std::size_t i = 0; i < n; ++i) {
    planes[i] = xyz[3 * i];
    planes[n + i] = xyz[3 * i + 1];
    planes[2 * n + i] = xyz[3 * i + 2];
  }
  return CoordinateMap(cloud.width(), cloud.height(), std::move(planes));
}

PseudoPointCloud to_cloud(const CoordinateMap& map) {
  const std::size_t n = map.plane_size();
  std::vector<double> xyz(3 * n);
  const std::span<const double> planes = map.data();
  for (std::size_t i = 0; i < n; ++i) {
    xyz[3 * i] = planes[i];
    xyz[3 * i + 1] = planes[n + i];
    xyz[3 * i + 2] = planes[2 * n + i];
  }
  return PseudoPointCloud(map.width(), map.height(), std::move(xyz));
}

ContinuityStats local_continuity(const PseudoPointCloud& cloud) {
  if (cloud.size() < 2) throw Error(ErrorCode::TooSmall, "continuity needs at least two points");
  auto gap = [](const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  };
  ContinuityStats stats;
  double sum = 0.0;
  for (std::size_t v = 0; v < cloud.height(); ++v) {
    for (std::size_t u = 0; u < cloud.width(); ++u) {
      const Point3 p = cloud.at(v, u);
      if (u + 1 < cloud.width()) {
        const double g = gap(p, cloud.at(v, u + 1));
        sum += g;
        stats.max = std::max(stats.max, g);
        ++stats.pairs;
      }
      if (v + 1 < cloud.height()) {
        const double g = gap(p, cloud.at(v + 1, u));
        sum += g;
        stats.max = std::max(stats.max, g);
        ++stats.pairs;
      }
    }
  }
  stats.mean = sum / static_cast<double>(stats.pairs);
  return stats;
}

}  // namespace pseudo3d
