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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace pseudo3d {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

/// Grid-organized point cloud: point (v, u) comes from source pixel (v, u).
/// Coordinates are stored interleaved as x, y, z per point.
class PseudoPointCloud {
 public:
  PseudoPointCloud(std::size_t width, std::size_t height, std::vector<double> xyz,
                   std::optional<std::vector<Rgb8>> colors = std::nullopt);
  PseudoPointCloud(std::size_t width, std::size_t height, std::span<const Point3> points);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return width_ * height_; }

  Point3 point(std::size_t index) const noexcept {
    return {xyz_[3 * index], xyz_[3 * index + 1], xyz_[3 * index + 2]};
  }
  Point3 at(std::size_t v, std::size_t u) const noexcept { return point(v * width_ + u); }
  std::span<const double> xyz() const noexcept { return xyz_; }

  bool has_colors() const noexcept { return colors_.has_value(); }
  std::span<const Rgb8> colors() const noexcept {
    return colors_ ? std::span<const Rgb8>(*colors_) : std::span<const Rgb8>();
  }
  PseudoPointCloud with_colors(std::vector<Rgb8> colors) const;

  friend bool operator==(const PseudoPointCloud&, const PseudoPointCloud&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> xyz_;
  std::optional<std::vector<Rgb8>> colors_;
};

/// Three planar channels X, Y, Z over the cloud's grid.
class CoordinateMap {
 public:
  static constexpr std::size_t kChannels = 3;

  CoordinateMap(std::size_t width, std::size_t height, std::vector<double> planes);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t plane_size() const noexcept { return width_ * height_; }

  std::span<const double> channel(std::size_t c) const noexcept {
    return std::span<const double>(planes_).subspan(c * plane_size(), plane_size());
  }
  double at(std::size_t c, std::size_t v, std::size_t u) const noexcept {
    return planes_[c * plane_size() + v * width_ + u];
  }
  std::span<const double> data() const noexcept { return planes_; }

  friend bool operator==(const CoordinateMap&, const CoordinateMap&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> planes_;
};

CoordinateMap to_coordinate_map(const PseudoPointCloud& cloud);
PseudoPointCloud to_cloud(const CoordinateMap& map);

struct ContinuityStats {
  double mean = 0.0;
  double max = 0.0;
  std::size_t pairs = 0;
};

/// Euclidean gaps between 4-neighbour grid points. TooSmall on 1x1 clouds.
ContinuityStats local_continuity(const PseudoPointCloud& cloud);

}  // namespace pseudo3d
