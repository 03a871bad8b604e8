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
#include <span>
#include <vector>

namespace pseudo3d {

/// Dense H x W x C tensor with channels innermost.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t height, std::size_t width, std::size_t channels);
  FeatureMap(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t positions() const noexcept { return height_ * width_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> data() const noexcept { return values_; }
  std::span<double> data() noexcept { return values_; }

  /// The C values at flattened position p = y * width + x.
  std::span<const double> position(std::size_t p) const noexcept {
    return std::span<const double>(values_).subspan(p * channels_, channels_);
  }
  std::span<double> position(std::size_t p) noexcept {
    return std::span<double>(values_).subspan(p * channels_, channels_);
  }

  double at(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return values_[(y * width_ + x) * channels_ + c];
  }
  double& at(std::size_t y, std::size_t x, std::size_t c) noexcept {
    return values_[(y * width_ + x) * channels_ + c];
  }

  bool same_shape(const FeatureMap& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> values_;
};

}  // namespace pseudo3d
