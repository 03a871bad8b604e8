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

#include <filesystem>

#include "pseudo3d/cloud.hpp"

namespace pseudo3d {

/// Binary little-endian PLY: float32 x, y, z per vertex, followed by uchar
/// red, green, blue when the cloud carries colors. The grid shape is kept in
/// a `comment grid <width> <height>` header line so import restores it.
void export_ply(const PseudoPointCloud& cloud, const std::filesystem::path& path);

/// Reads clouds written by export_ply and other binary little-endian PLY
/// files whose vertex element holds float/double x, y, z and optional uchar
/// red, green, blue. Without a grid comment the cloud is N x 1.
PseudoPointCloud import_ply(const std::filesystem::path& path);

}  // namespace pseudo3d
