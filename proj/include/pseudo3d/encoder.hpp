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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "pseudo3d/cloud.hpp"
#include "pseudo3d/feature_map.hpp"

namespace pseudo3d {

/// 3x3, stride 2, zero padding 1 convolution. Weights are laid out as
/// [out][ky][kx][in] so each output channel owns one contiguous 9*in slice
/// matching an HWC input patch.
struct ConvLayer {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  static constexpr std::size_t kKernel = 3;
  std::size_t fan_in() const noexcept { return kKernel * kKernel * in_channels; }

  friend bool operator==(const ConvLayer&, const ConvLayer&) = default;
};

/// Conv(3 -> 16) -> ReLU -> Conv(16 -> C). The same architecture serves
/// coordinate maps and RGB images; each modality gets its own instance.
struct EncoderParams {
  static constexpr std::size_t kInputChannels = 3;
  static constexpr std::size_t kHiddenChannels = 16;
  static constexpr std::size_t kDefaultChannels = 32;

  ConvLayer conv1;
  ConvLayer conv2;

  std::size_t out_channels() const noexcept { return conv2.out_channels; }

  /// Total scalar count; coordinates are numbered conv1.weight, conv1.bias,
  /// conv2.weight, conv2.bias in that order.
  std::size_t parameter_count() const noexcept;
  double& parameter(std::size_t index);
  double parameter(std::size_t index) const;

  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
EncoderParams init_params(std::uint64_t seed, std::size_t out_channels = EncoderParams::kDefaultChannels);

/// Planar coordinate map to an H x W x 3 tensor.
FeatureMap to_feature_map(const CoordinateMap& map);

/// Output is ceil(H/4) x ceil(W/4) x C. BadChannels unless the input has 3
/// channels; TooSmall when H or W is below 4.
FeatureMap encode(const FeatureMap& input, const EncoderParams& params);
FeatureMap encode(const CoordinateMap& input, const EncoderParams& params);

struct EncoderGradients {
  EncoderParams params;  // same shapes as the encoder, holding dL/dparam
  FeatureMap input;
};

/// Gradients of <upstream, encode(input, params)>.
EncoderGradients encode_backward(const FeatureMap& input, const EncoderParams& params, const FeatureMap& upstream);

struct StandardizedMap {
  CoordinateMap map;
  std::array<bool, 3> constant{};  // channel passed through untouched
};

/// Per-channel zero mean / unit (population) variance. Constant channels are
/// returned unchanged and flagged.
StandardizedMap normalize_coordinate_map(const CoordinateMap& map);

// Flat binary blob: "P3DE", u32 version, u32 C, then conv1.weight,
// conv1.bias, conv2.weight, conv2.bias as little-endian float64.
std::vector<unsigned char> serialize_params(const EncoderParams& params);
EncoderParams deserialize_params(const std::vector<unsigned char>& blob);
void save_params(const EncoderParams& params, const std::filesystem::path& path);
EncoderParams load_params(const std::filesystem::path& path);

}  // namespace pseudo3d
