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

#include "pseudo3d/error.hpp"

#include <sstream>

namespace pseudo3d {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDepth: return "degenerate depth";
    case ErrorCode::NonFiniteInput: return "non-finite input";
    case ErrorCode::WrongKind: return "wrong depth kind";
    case ErrorCode::ZeroScale: return "zero scale";
    case ErrorCode::InvalidDepth: return "invalid depth";
    case ErrorCode::InvalidRange: return "invalid range";
    case ErrorCode::InvalidIntrinsics: return "invalid intrinsics";
    case ErrorCode::InvalidFov: return "invalid fov";
    case ErrorCode::NonPositiveDepth: return "non-positive depth";
    case ErrorCode::TooSmall: return "too small";
    case ErrorCode::BadChannels: return "bad channels";
    case ErrorCode::ShapeMismatch: return "shape mismatch";
    case ErrorCode::WrongStrategy: return "wrong strategy";
    case ErrorCode::BadHeadCount: return "bad head count";
    case ErrorCode::InvalidAction: return "invalid action";
    case ErrorCode::EmptyDataset: return "empty dataset";
    case ErrorCode::ConfigError: return "config error";
    case ErrorCode::ParseError: return "parse error";
    case ErrorCode::IoError: return "io error";
  }
  return "unknown error";
}

namespace {

std::string describe_indices(const std::vector<std::size_t>& indices, std::size_t width) {
  std::ostringstream os;
  os << indices.size() << " point(s) with Z <= 0 at (v,u):";
  constexpr std::size_t kShown = 8;
  for (std::size_t i = 0; i < indices.size() && i < kShown; ++i) {
    os << " (" << indices[i] / width << ',' << indices[i] % width << ')';
  }
  if (indices.size() > kShown) os << " ...";
  return os.str();
}

}  // namespace

NonPositiveDepthError::NonPositiveDepthError(std::vector<std::size_t> indices, std::size_t width)
    : Error(ErrorCode::NonPositiveDepth, describe_indices(indices, width == 0 ? 1 : width)),
      indices_(std::move(indices)) {}

}  // namespace pseudo3d
