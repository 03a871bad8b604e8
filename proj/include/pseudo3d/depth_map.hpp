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
#include <string_view>
#include <vector>

namespace pseudo3d {

enum class DepthKind {
  PredictedRelative,  // raw output of a relative-depth model (disparity-like)
  Normalized,         // rescaled to [0, 1]
  Inverted,           // 1 - normalized; grows with distance
  Metric,             // strictly positive scene-unit depth
};

std::string_view to_string(DepthKind kind);

/// Immutable H x W grid of depth-like values, row-major.
///
/// Construction validates the invariants of the declared kind: finite values
/// everywhere, [0, 1] for Normalized and Inverted, > 0 for Metric.
class DepthMap {
 public:
  DepthMap(std::size_t width, std::size_t height, std::vector<double> values, DepthKind kind);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  DepthKind kind() const noexcept { return kind_; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(std::size_t v) const noexcept {
    return std::span<const double>(values_).subspan(v * width_, width_);
  }
  double at(std::size_t v, std::size_t u) const noexcept { return values_[v * width_ + u]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Set on maps synthesized from metric depth with a negative scale, where
  /// the depth ordering is reflected relative to the usual disparity model.
  bool reflected() const noexcept { return reflected_; }
  DepthMap with_reflected(bool flag) const;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> values_;
  DepthKind kind_;
  bool reflected_ = false;
};

/// (d - min d) / (max d - min d). Requires a non-constant PredictedRelative map.
DepthMap normalize(const DepthMap& d);

/// 1 - d for a Normalized map.
DepthMap invert(const DepthMap& d);

/// Simulates a relative-depth model: s / d_gt + t for a Metric map. A negative
/// scale is accepted and marks the result as reflected.
DepthMap disparity_from_metric(const DepthMap& d_gt, double s, double t);

/// invert(normalize(d_pred)) in one pass; bitwise identical to the two-step form.
DepthMap pipeline_relative_to_dr(const DepthMap& d_pred);

/// 1 / d_pred taken as depth directly, with no normalization. This is the
/// naive construction the normalized pipeline is compared against; it needs
/// every value to be strictly positive.
DepthMap naive_reciprocal(const DepthMap& d_pred);

/// alpha * d, preserving kind; used for scale-equivariance checks on metric maps.
DepthMap scaled(const DepthMap& d, double alpha);

}  // namespace pseudo3d
