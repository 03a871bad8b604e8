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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pseudo3d {

enum class ErrorCode {
  DegenerateDepth,
  NonFiniteInput,
  WrongKind,
  ZeroScale,
  InvalidDepth,
  InvalidRange,
  InvalidIntrinsics,
  InvalidFov,
  NonPositiveDepth,
  TooSmall,
  BadChannels,
  ShapeMismatch,
  WrongStrategy,
  BadHeadCount,
  InvalidAction,
  EmptyDataset,
  ConfigError,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to a stage and exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by projection when points lie on or behind the camera plane.
class NonPositiveDepthError : public Error {
 public:
  NonPositiveDepthError(std::vector<std::size_t> indices, std::size_t width);

  /// Row-major grid indices of the offending points.
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

}  // namespace pseudo3d
