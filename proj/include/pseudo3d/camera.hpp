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
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "pseudo3d/cloud.hpp"
#include "pseudo3d/depth_map.hpp"

namespace pseudo3d {

/// Pinhole intrinsics in pixels. Pixel (u, v) = (column, row), zero-based,
/// addressing pixel centers.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Throws InvalidIntrinsics unless fx, fy > 0 and everything is finite.
  void validate() const;
};

/// Camera-frame points for every pixel of an Inverted or Metric map:
/// (d (u - cx) / fx, d (v - cy) / fy, d). Zero-depth pixels land on the
/// origin and are kept so the grid stays complete.
PseudoPointCloud backproject(const DepthMap& depth, const CameraIntrinsics& k);

struct PixelDepth {
  double u;
  double v;
  double depth;
};

struct ProjectedGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<PixelDepth> pixels;  // row-major, same layout as the cloud

  const PixelDepth& at(std::size_t v, std::size_t u) const { return pixels[v * width + u]; }
};

/// Inverse of backproject: (fx X / Z + cx, fy Y / Z + cy, Z). Throws
/// NonPositiveDepthError listing every point with Z <= 0.
ProjectedGrid project(const PseudoPointCloud& cloud, const CameraIntrinsics& k);

/// fx = (width / 2) / tan(fov_x / 2); fy likewise from fov_y, or fy = fx when
/// fov_y is absent. Principal point at the image center ((w - 1) / 2, (h - 1) / 2).
CameraIntrinsics estimate_intrinsics_from_fov(double fov_x_deg, std::size_t width, std::size_t height,
                                              std::optional<double> fov_y_deg = std::nullopt);

/// Parses the flat key-value intrinsics document. Lines are `key = value` or
/// `key: value`; '#' starts a comment. Either fx, fy, cx, cy (explicit mode) or
/// fov_x_deg [, fov_y_deg], width, height (estimation mode).
CameraIntrinsics parse_intrinsics_config(std::string_view text);
CameraIntrinsics load_intrinsics_config(const std::filesystem::path& path);

}  // namespace pseudo3d
