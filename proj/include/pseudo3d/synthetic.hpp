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

#include "pseudo3d/camera.hpp"
#include "pseudo3d/cloud.hpp"
#include "pseudo3d/depth_map.hpp"

namespace pseudo3d {

/// Closed-form scene: metric depth map plus its camera-frame cloud.
struct SyntheticScene {
  DepthMap depth;
  PseudoPointCloud cloud;
};

/// Frontoparallel plane at depth z0. InvalidDepth for z0 <= 0.
SyntheticScene synth_plane(const CameraIntrinsics& k, std::size_t width, std::size_t height, double z0);

/// Depth linear in u: z(u) = z_near + (z_far - z_near) * u / (width - 1).
/// InvalidRange unless 0 < z_near < z_far; a single-column wedge sits at z_near.
SyntheticScene synth_wedge(const CameraIntrinsics& k, std::size_t width, std::size_t height, double z_near,
                           double z_far);

}  // namespace pseudo3d
