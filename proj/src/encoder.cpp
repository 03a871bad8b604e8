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

#include "pseudo3d/encoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "pseudo3d/error.hpp"
#include "pseudo3d/rng.hpp"
#include "pseudo3d/simd/kernels.hpp"

namespace pseudo3d {
namespace {

constexpr std::size_t kStride = 2;
constexpr std::size_t kMinSide = 4;

std::size_t conv_out(std::size_t n) { return (n + 1) / 2; }

ConvLayer make_layer(std::size_t in, std::size_t out, Rng& rng) {
  ConvLayer layer;
  layer.in_channels = in;
  layer.out_channels = out;
  layer.weight.resize(out * layer.fan_in());
  layer.bias.assign(out, 0.0);
  const double bound = 1.0 / std::sqrt(static_cast<double>(layer.fan_in()));
  for (double& w : layer.weight) w = bound * (2.0 * rng.uniform() - 1.0);
  return layer;
}

// Copies the 3x3 receptive field of output (oy, ox) into `patch`, zero-filling
// taps that fall in the padding.
void gather_patch(const FeatureMap& in, std::size_t oy, std::size_t ox, std::vector<double>& patch) {
  const std::size_t c = in.channels();
  for (std::size_t ky = 0; ky < 3; ++ky) {
    const long iy = static_cast<long>(oy * kStride + ky) - 1;
    for (std::size_t kx = 0; kx < 3; ++kx) {
      const long ix = static_cast<long>(ox * kStride + kx) - 1;
      double* dst = patch.data() + (ky * 3 + kx) * c;
      if (iy < 0 || ix < 0 || iy >= static_cast<long>(in.height()) || ix >= static_cast<long>(in.width())) {
        std::fill(dst, dst + c, 0.0);
      } else {
        const auto src = in.position(static_cast<std::size_t>(iy) * in.width() + static_cast<std::size_t>(ix));
        std::copy(src.begin(), src.end(), dst);
      }
    }
  }
}

void scatter_patch(const std::vector<double>& patch, std::size_t oy, std::size_t ox, FeatureMap& grad_in) {
  const std::size_t c = grad_in.channels();
  const simd::KernelTable& k = simd::active();
  for (std::size_t ky = 0; ky < 3; ++ky) {
    const long iy = static_cast<long>(oy * kStride + ky) - 1;
    for (std::size_t kx = 0; kx < 3; ++kx) {
      const long ix = static_cast<long>(ox * kStride + kx) - 1;
      if (iy < 0 || ix < 0 || iy >= static_cast<long>(grad_in.height()) || ix >= static_cast<long>(grad_in.width())) {
        continue;
      }
      auto dst = grad_in.position(static_cast<std::size_t>(iy) * grad_in.width() + static_cast<std::size_t>(ix));
      k.axpy(1.0, patch.data() + (ky * 3 + kx) * c, dst.data(), c);
    }
  }
}

FeatureMap conv_forward(const FeatureMap& in, const ConvLayer& layer) {
  const std::size_t oh = conv_out(in.height());
  const std::size_t ow = conv_out(in.width());
  const std::size_t p = layer.fan_in();
  FeatureMap out(oh, ow, layer.out_channels);
  std::vector<double> patch(p);
  const simd::KernelTable& k = simd::active();
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      gather_patch(in, oy, ox, patch);
      auto dst = out.position(oy * ow + ox);
      for (std::size_t co = 0; co < layer.out_channels; ++co) {
        dst[co] = layer.bias[co] + k.dot(layer.weight.data() + co * p, patch.data(), p);
      }
    }
  }
  return out;
}

// Accumulates dL/dweight and dL/dbias into `grad` and returns dL/dinput.
FeatureMap conv_backward(const FeatureMap& in, const ConvLayer& layer, const FeatureMap& grad_out, ConvLayer& grad) {
  const std::size_t p = layer.fan_in();
  FeatureMap grad_in(in.height(), in.width(), in.channels());
  std::vector<double> patch(p);
  std::vector<double> grad_patch(p);
  const simd::KernelTable& k = simd::active();
  for (std::size_t oy = 0; oy < grad_out.height(); ++oy) {
    for (std::size_t ox = 0; ox < grad_out.width(); ++ox) {
      const auto g = grad_out.position(oy * grad_out.width() + ox);
      gather_patch(in, oy, ox, patch);
      std::fill(grad_patch.begin(), grad_patch.end(), 0.0);
      for (std::size_t co = 0; co < layer.out_channels; ++co) {
        if (g[co] == 0.0) continue;
        grad.bias[co] += g[co];
        k.axpy(g[co], patch.data(), grad.weight.data() + co * p, p);
        k.axpy(g[co], layer.weight.data() + co * p, grad_patch.data(), p);
      }
      scatter_patch(grad_patch, oy, ox, grad_in);
    }
  }
  return grad_in;
}

void check_input(const FeatureMap& input, const EncoderParams& params) {
  if (input.channels() != EncoderParams::kInputChannels) {
    throw Error(ErrorCode::BadChannels, "encoder expects 3 input channels, got " + std::to_string(input.channels()));
  }
  if (input.height() < kMinSide || input.width() < kMinSide) {
    throw Error(ErrorCode::TooSmall, "encoder input must be at least 4x4, got " + std::to_string(input.height()) +
                                         "x" + std::to_string(input.width()));
  }
  const auto& c1 = params.conv1;
  const auto& c2 = params.conv2;
  const bool ok = c1.in_channels == EncoderParams::kInputChannels && c1.out_channels == EncoderParams::kHiddenChannels &&
                  c1.weight.size() == c1.out_channels * c1.fan_in() && c1.bias.size() == c1.out_channels &&
                  c2.in_channels == EncoderParams::kHiddenChannels && c2.out_channels >= 1 &&
                  c2.weight.size() == c2.out_channels * c2.fan_in() && c2.bias.size() == c2.out_channels;
  if (!ok) throw Error(ErrorCode::ShapeMismatch, "encoder parameters do not match the fixed architecture");
}

FeatureMap relu(FeatureMap x) {
  for (double& v : x.data()) v = v > 0.0 ? v : 0.0;
  return x;
}

EncoderParams zeros_like(const EncoderParams& p) {
  EncoderParams z = p;
  std::fill(z.conv1.weight.begin(), z.conv1.weight.end(), 0.0);
  std::fill(z.conv1.bias.begin(), z.conv1.bias.end(), 0.0);
  std::fill(z.conv2.weight.begin(), z.conv2.weight.end(), 0.0);
  std::fill(z.conv2.bias.begin(), z.conv2.bias.end(), 0.0);
  return z;
}

}  // namespace

std::size_t EncoderParams::parameter_count() const noexcept {
  return conv1.weight.size() + conv1.bias.size() + conv2.weight.size() + conv2.bias.size();
}

double& EncoderParams::parameter(std::size_t index) {
  for (std::vector<double>* v : {&conv1.weight, &conv1.bias, &conv2.weight, &conv2.bias}) {
    if (index < v->size()) return (*v)[index];
    index -= v->size();
  }
  throw Error(ErrorCode::ShapeMismatch, "parameter index out of range");
}

double EncoderParams::parameter(std::size_t index) const {
  return const_cast<EncoderParams*>(this)->parameter(index);
}

EncoderParams init_params(std::uint64_t seed, std::size_t out_channels) {
  if (out_channels == 0) throw Error(ErrorCode::BadChannels, "encoder needs at least one output channel");
  Rng rng(seed);
  EncoderParams params;
  params.conv1 = make_layer(EncoderParams::kInputChannels, EncoderParams::kHiddenChannels, rng);
  params.conv2 = make_layer(EncoderParams::kHiddenChannels, out_channels, rng);
  return params;
}

FeatureMap to_feature_map(const CoordinateMap& map) {
  const std::size_t n = map.plane_size();
  std::vector<double> hwc(3 * n);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto plane = map.channel(c);
    for (std::size_t i = 0; i < n; ++i) hwc[3 * i + c] = plane[i];
  }
  return FeatureMap(map.height(), map.width(), 3, std::move(hwc));
}

FeatureMap encode(const FeatureMap& input, const EncoderParams& params) {
  check_input(input, params);
  return conv_forward(relu(conv_forward(input, params.conv1)), params.conv2);
}

FeatureMap encode(const CoordinateMap& input, const EncoderParams& params) {
  return encode(to_feature_map(input), params);
}

EncoderGradients encode_backward(const FeatureMap& input, const EncoderParams& params, const FeatureMap& upstream) {
  check_input(input, params);
  if (upstream.height() != conv_out(conv_out(input.height())) || upstream.width() != conv_out(conv_out(input.width())) ||
      upstream.channels() != params.out_channels()) {
    throw Error(ErrorCode::ShapeMismatch, "upstream gradient shape does not match the encoder output");
  }
  const FeatureMap pre = conv_forward(input, params.conv1);
  const FeatureMap hidden = relu(pre);

  EncoderGradients grads{zeros_like(params), FeatureMap()};
  FeatureMap grad_hidden = conv_backward(hidden, params.conv2, upstream, grads.params.conv2);
  auto gh = grad_hidden.data();
  const auto pa = pre.data();
  for (std::size_t i = 0; i < gh.size(); ++i) {
    if (!(pa[i] > 0.0)) gh[i] = 0.0;
  }
  grads.input = conv_backward(input, params.conv1, grad_hidden, grads.params.conv1);
  return grads;
}

StandardizedMap normalize_coordinate_map(const CoordinateMap& map) {
  const std::size_t n = map.plane_size();
  std::vector<double> planes(map.data().begin(), map.data().end());
  std::array<bool, 3> constant{};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto src = map.channel(c);
    const auto [lo, hi] = std::minmax_element(src.begin(), src.end());
    double mean = 0.0;
    for (double x : src) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : src) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (*lo == *hi || !(sd > 0.0)) {
      constant[c] = true;
      continue;
    }
    double* dst = planes.data() + c * n;
    for (std::size_t i = 0; i < n; ++i) dst[i] = (src[i] - mean) / sd;
  }
  return {CoordinateMap(map.width(), map.height(), std::move(planes)), constant};
}

namespace {

constexpr unsigned char kMagic[4] = {'P', '3', 'D', 'E'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<unsigned char>& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((x >> (8 * i)) & 0xFFu));
}

void put_f64(std::vector<unsigned char>& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFFu));
}

std::uint64_t get_le(const std::vector<unsigned char>& in, std::size_t at, int bytes) {
  std::uint64_t x = 0;
  for (int i = 0; i < bytes; ++i) x |= std::uint64_t{in[at + static_cast<std::size_t>(i)]} << (8 * i);
  return x;
}

}  // namespace

std::vector<unsigned char> serialize_params(const EncoderParams& params) {
  std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(params.out_channels()));
  for (std::size_t i = 0; i < params.parameter_count(); ++i) put_f64(out, params.parameter(i));
  return out;
}

EncoderParams deserialize_params(const std::vector<unsigned char>& blob) {
  if (blob.size() < 12 || !std::equal(std::begin(kMagic), std::end(kMagic), blob.begin())) {
    throw Error(ErrorCode::ParseError, "not an encoder parameter blob");
  }
  const auto version = static_cast<std::uint32_t>(get_le(blob, 4, 4));
  if (version != kVersion) throw Error(ErrorCode::ParseError, "unsupported parameter version " + std::to_string(version));
  const auto channels = static_cast<std::size_t>(get_le(blob, 8, 4));
  if (channels == 0 || channels > (1u << 16)) throw Error(ErrorCode::ParseError, "bad channel count in parameter blob");
  EncoderParams params = init_params(0, channels);
  if (blob.size() != 12 + 8 * params.parameter_count()) {
    throw Error(ErrorCode::ParseError, "parameter blob has " + std::to_string(blob.size()) + " bytes, expected " +
                                           std::to_string(12 + 8 * params.parameter_count()));
  }
  for (std::size_t i = 0; i < params.parameter_count(); ++i) {
    const double x = std::bit_cast<double>(get_le(blob, 12 + 8 * i, 8));
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, "parameter blob contains NaN or Inf");
    params.parameter(i) = x;
  }
  return params;
}

void save_params(const EncoderParams& params, const std::filesystem::path& path) {
  const std::vector<unsigned char> blob = serialize_params(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

EncoderParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::vector<unsigned char> blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_params(blob);
}

}  // namespace pseudo3d
