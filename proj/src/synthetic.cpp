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

#include "pseudo3d/synthetic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pseudo3d/error.hpp"

namespace pseudo3d {
namespace {

// Closed-form points, evaluated independently of the back-projection kernels.
SyntheticScene make_scene(const CameraIntrinsics& k, std::size_t width, std::size_t height,
                          std::vector<double> depth) {
  std::vector<double> xyz(3 * width * height);
  for (std::size_t v = 0; v < height; ++v) {
    for (std::size_t u = 0; u < width; ++u) {
      const std::size_t i = v * width + u;
      const double z = depth[i];
      xyz[3 * i + 0] = z * (static_cast<double>(u) - k.cx) / k.fx;
      xyz[3 * i + 1] = z * (static_cast<double>(v) - k.cy) / k.fy;
      xyz[3 * i + 2] = z;
    }
  }
  DepthMap map(width, height, std::move(depth), DepthKind::Metric);
  return {std::move(map), PseudoPointCloud(width, height, std::move(xyz))};
}

}  // namespace

SyntheticScene synth_plane(const CameraIntrinsics& k, std::size_t width, std::size_t height, double z0) {
  k.validate();
  if (!(z0 > 0.0) || !std::isfinite(z0)) {
    throw Error(ErrorCode::InvalidDepth, "plane depth must be finite and > 0, got " + std::to_string(z0));
  }
  return make_scene(k, width, height, std::vector<double>(width * height, z0));
}

SyntheticScene synth_wedge(const CameraIntrinsics& k, std::size_t width, std::size_t height, double z_near,
                           double z_far) {
  k.validate();
  if (!(z_near > 0.0 && z_near < z_far && std::isfinite(z_far))) {
    throw Error(ErrorCode::InvalidRange, "wedge needs 0 < z_near < z_far, got " + std::to_string(z_near) +
                                             ", " + std::to_string(z_far));
  }
  std::vector<double> depth(width * height);
  const double span = z_far - z_near;
  const double last = width > 1 ? static_cast<double>(width - 1) : 1.0;
  for (std::size_t v = 0; v < height; ++v) {
    for (std::size_t u = 0; u < width; ++u) {
      depth[v * width + u] = z_near + span * static_cast<double>(u) / last;
    }
  }
  return make_scene(k, width, height, std::move(depth));
}

}  // namespace pseudo3d
