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

#include "pseudo3d/depth_map.hpp"

#include <cmath>
#include <string>

#include "pseudo3d/error.hpp"
#include "pseudo3d/simd/kernels.hpp"

namespace pseudo3d {

std::string_view to_string(DepthKind kind) {
  switch (kind) {
    case DepthKind::PredictedRelative: return "predicted-relative";
    case DepthKind::Normalized: return "normalized";
    case DepthKind::Inverted: return "inverted";
    case DepthKind::Metric: return "metric";
  }
  return "unknown";
}

DepthMap::DepthMap(std::size_t width, std::size_t height, std::vector<double> values, DepthKind kind)
    : width_(width), height_(height), values_(std::move(values)), kind_(kind) {
  if (width_ == 0 || height_ == 0) {
    throw Error(ErrorCode::InvalidDepth, "depth map must have positive width and height");
  }
  if (values_.size() != width_ * height_) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(values_.size()) + " values for a " +
                                              std::to_string(width_) + "x" + std::to_string(height_) +
                                              " depth map");
  }
  const simd::MinMax mm = simd::active().minmax(values_);
  if (!mm.finite) throw Error(ErrorCode::NonFiniteInput, "depth map contains NaN or Inf");
  switch (kind_) {
    case DepthKind::Normalized:
    case DepthKind::Inverted:
      if (mm.min < 0.0 || mm.max > 1.0) {
        throw Error(ErrorCode::InvalidDepth,
                    std::string(to_string(kind_)) + " depth must lie in [0, 1]");
      }
      break;
    case DepthKind::Metric:
      if (mm.min <= 0.0) throw Error(ErrorCode::InvalidDepth, "metric depth must be > 0");
      break;
    case DepthKind::PredictedRelative:
      break;
  }
}

DepthMap DepthMap::with_reflected(bool flag) const {
  DepthMap copy = *this;
  copy.reflected_ = flag;
  return copy;
}

namespace {

void require_kind(const DepthMap& d, DepthKind expected, const char* op) {
  if (d.kind() != expected) {
    throw Error(ErrorCode::WrongKind, std::string(op) + " expects a " +
                                          std::string(to_string(expected)) + " map, got " +
                                          std::string(to_string(d.kind())));
  }
}

// Range of a relative map, rejecting the constant case.
simd::MinMax checked_range(const DepthMap& d) {
  const simd::MinMax mm = simd::active().minmax(d.values());
  if (!mm.finite) throw Error(ErrorCode::NonFiniteInput, "depth map contains NaN or Inf");
  if (!(mm.max > mm.min)) {
    throw Error(ErrorCode::DegenerateDepth, "constant depth map (min == max == " +
                                                std::to_string(mm.min) + ")");
  }
  return mm;
}

}  // namespace

DepthMap normalize(const DepthMap& d) {
  require_kind(d, DepthKind::PredictedRelative, "normalize");
  const simd::MinMax mm = checked_range(d);
  std::vector<double> out(d.size());
  simd::active().rescale(d.values(), mm.min, mm.max - mm.min, out);
  return DepthMap(d.width(), d.height(), std::move(out), DepthKind::Normalized);
}

DepthMap invert(const DepthMap& d) {
  require_kind(d, DepthKind::Normalized, "invert");
  std::vector<double> out(d.size());
  simd::active().one_minus(d.values(), out);
  return DepthMap(d.width(), d.height(), std::move(out), DepthKind::Inverted);
}

DepthMap disparity_from_metric(const DepthMap& d_gt, double s, double t) {
  if (s == 0.0) throw Error(ErrorCode::ZeroScale, "disparity scale must be non-zero");
  if (!std::isfinite(s) || !std::isfinite(t)) {
    throw Error(ErrorCode::NonFiniteInput, "disparity scale and shift must be finite");
  }
  require_kind(d_gt, DepthKind::Metric, "disparity_from_metric");
  std::vector<double> out(d_gt.size());
  simd::active().reciprocal_affine(d_gt.values(), s, t, out);
  DepthMap result(d_gt.width(), d_gt.height(), std::move(out), DepthKind::PredictedRelative);
  return s < 0.0 ? result.with_reflected(true) : result;
}

DepthMap pipeline_relative_to_dr(const DepthMap& d_pred) {
  require_kind(d_pred, DepthKind::PredictedRelative, "pipeline_relative_to_dr");
  const simd::MinMax mm = checked_range(d_pred);
  std::vector<double> out(d_pred.size());
  simd::active().rescale_invert(d_pred.values(), mm.min, mm.max - mm.min, out);
  return DepthMap(d_pred.width(), d_pred.height(), std::move(out), DepthKind::Inverted);
}

DepthMap naive_reciprocal(const DepthMap& d_pred) {
  require_kind(d_pred, DepthKind::PredictedRelative, "naive_reciprocal");
  const simd::MinMax mm = simd::active().minmax(d_pred.values());
  if (mm.min <= 0.0) {
    throw Error(ErrorCode::InvalidDepth, "naive reciprocal needs strictly positive relative depth");
  }
  std::vector<double> out(d_pred.size());
  simd::active().reciprocal_affine(d_pred.values(), 1.0, 0.0, out);
  return DepthMap(d_pred.width(), d_pred.height(), std::move(out), DepthKind::Metric);
}

DepthMap scaled(const DepthMap& d, double alpha) {
  std::vector<double> out(d.values().begin(), d.values().end());
  for (double& x : out) x *= alpha;
  return DepthMap(d.width(), d.height(), std::move(out), d.kind());
}

}  // namespace pseudo3d
