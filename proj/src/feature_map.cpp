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

#include "pseudo3d/feature_map.hpp"

#include <cmath>
#include <string>

#include "pseudo3d/error.hpp"

namespace pseudo3d {

FeatureMap::FeatureMap(std::size_t height, std::size_t width, std::size_t channels)
    : height_(height), width_(width), channels_(channels), values_(height * width * channels, 0.0) {}

FeatureMap::FeatureMap(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> values)
    : height_(height), width_(width), channels_(channels), values_(std::move(values)) {
  if (values_.size() != height_ * width_ * channels_) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(values_.size()) + " values for a " +
                                              std::to_string(height_) + "x" + std::to_string(width_) + "x" +
                                              std::to_string(channels_) + " feature map");
  }
  for (double x : values_) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, "feature map contains NaN or Inf");
  }
}

}  // namespace pseudo3d
