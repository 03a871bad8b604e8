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

#include "pseudo3d/fusion.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <string>

#include "pseudo3d/error.hpp"
#include "pseudo3d/rng.hpp"
#include "pseudo3d/simd/kernels.hpp"

namespace pseudo3d {

std::string_view to_string(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::Add: return "add";
    case FusionStrategy::Concat: return "concat";
    case FusionStrategy::CrossAttention: return "xattn";
    case FusionStrategy::SelfAttention: return "sattn";
  }
  return "unknown";
}

FusionStrategy parse_fusion_strategy(std::string_view name) {
  for (auto s : {FusionStrategy::Add, FusionStrategy::Concat, FusionStrategy::CrossAttention,
                 FusionStrategy::SelfAttention}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::ConfigError, "unknown fusion strategy '" + std::string(name) + "' (add|concat|xattn|sattn)");
}

Linear Linear::zeros(std::size_t in, std::size_t out) {
  return Linear{in, out, std::vector<double>(in * out, 0.0), std::vector<double>(out, 0.0)};
}

namespace {

using Matrix = std::vector<double>;  // row-major, rows x cols implied by context

Linear random_linear(std::size_t in, std::size_t out, Rng& rng) {
  Linear l = Linear::zeros(in, out);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : l.weight) w = bound * (2.0 * rng.uniform() - 1.0);
  return l;
}

LayerNormParams unit_norm(std::size_t c) { return {std::vector<double>(c, 1.0), std::vector<double>(c, 0.0), 1e-5}; }

// rows x l.in  ->  rows x l.out
Matrix apply(const Linear& l, std::span<const double> x, std::size_t rows) {
  Matrix y(rows * l.out);
  const simd::KernelTable& k = simd::active();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.data() + r * l.in;
    for (std::size_t o = 0; o < l.out; ++o) {
      y[r * l.out + o] = l.bias[o] + k.dot(l.weight.data() + o * l.in, xr, l.in);
    }
  }
  return y;
}

Matrix layer_norm(const LayerNormParams& p, std::span<const double> x, std::size_t rows, std::size_t c) {
  Matrix y(rows * c);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.data() + r * c;
    double mean = 0.0;
    for (std::size_t i = 0; i < c; ++i) mean += xr[i];
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t i = 0; i < c; ++i) var += (xr[i] - mean) * (xr[i] - mean);
    var /= static_cast<double>(c);
    const double inv = 1.0 / std::sqrt(var + p.eps);
    for (std::size_t i = 0; i < c; ++i) y[r * c + i] = (xr[i] - mean) * inv * p.gamma[i] + p.beta[i];
  }
  return y;
}

// Multi-head attention of nq query rows over nk key/value rows, all width c.
Matrix multi_head_attention(const AttentionParams& a, std::span<const double> queries, std::size_t nq,
                            std::span<const double> keys_values, std::size_t nk, std::size_t c) {
  const Matrix q = apply(a.query, queries, nq);
  const Matrix kx = apply(a.key, keys_values, nk);
  const Matrix vx = apply(a.value, keys_values, nk);
  const std::size_t dh = c / a.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const simd::KernelTable& k = simd::active();

  Matrix context(nq * c, 0.0);
  std::vector<double> weights(nk);
  for (std::size_t h = 0; h < a.heads; ++h) {
    const std::size_t off = h * dh;
    for (std::size_t i = 0; i < nq; ++i) {
      double peak = -INFINITY;
      for (std::size_t j = 0; j < nk; ++j) {
        weights[j] = k.dot(q.data() + i * c + off, kx.data() + j * c + off, dh) * scale;
        peak = std::max(peak, weights[j]);
      }
      double total = 0.0;
      for (double& w : weights) {
        w = std::exp(w - peak);
        total += w;
      }
      double* ctx = context.data() + i * c + off;
      for (std::size_t j = 0; j < nk; ++j) k.axpy(weights[j] / total, vx.data() + j * c + off, ctx, dh);
    }
  }
  return apply(a.output, context, nq);
}

void check_pair(const FeatureMap& f2d, const FeatureMap& f3d) {
  if (!f2d.same_shape(f3d)) {
    throw Error(ErrorCode::ShapeMismatch,
                "fusion inputs differ: " + std::to_string(f2d.height()) + "x" + std::to_string(f2d.width()) + "x" +
                    std::to_string(f2d.channels()) + " vs " + std::to_string(f3d.height()) + "x" +
                    std::to_string(f3d.width()) + "x" + std::to_string(f3d.channels()));
  }
}

void check_params(const FeatureMap& f2d, const FusionParams& p, FusionStrategy expected) {
  if (p.strategy != expected) {
    throw Error(ErrorCode::WrongStrategy, "parameters are for '" + std::string(to_string(p.strategy)) +
                                              "', not '" + std::string(to_string(expected)) + "'");
  }
  const std::size_t c = f2d.channels();
  if (p.channels != c) {
    throw Error(ErrorCode::ShapeMismatch, "parameters expect C=" + std::to_string(p.channels) + ", features have C=" +
                                              std::to_string(c));
  }
  auto linear_ok = [](const Linear& l, std::size_t in, std::size_t out) {
    return l.in == in && l.out == out && l.weight.size() == in * out && l.bias.size() == out;
  };
  bool ok = true;
  if (expected == FusionStrategy::Concat) ok = linear_ok(p.projection, 2 * c, c);
  if (expected == FusionStrategy::CrossAttention || expected == FusionStrategy::SelfAttention) {
    const auto& a = p.attention;
    if (a.heads == 0 || c % a.heads != 0) {
      throw Error(ErrorCode::BadHeadCount, "C=" + std::to_string(c) + " is not divisible by " +
                                               std::to_string(a.heads) + " heads");
    }
    ok = linear_ok(a.query, c, c) && linear_ok(a.key, c, c) && linear_ok(a.value, c, c) && linear_ok(a.output, c, c);
  }
  if (expected == FusionStrategy::SelfAttention) {
    ok = ok && p.norm1.gamma.size() == c && p.norm1.beta.size() == c && p.norm2.gamma.size() == c &&
         p.norm2.beta.size() == c && linear_ok(p.ffn_in, c, 4 * c) && linear_ok(p.ffn_out, 4 * c, c);
  }
  if (!ok) throw Error(ErrorCode::ShapeMismatch, "fusion parameter shapes do not match C=" + std::to_string(c));
}

}  // namespace

FusionParams init_fusion_params(FusionStrategy strategy, std::size_t channels, std::size_t heads, std::uint64_t seed) {
  if (channels == 0) throw Error(ErrorCode::BadChannels, "fusion needs C >= 1");
  FusionParams p;
  p.strategy = strategy;
  p.channels = channels;
  Rng rng(seed);
  switch (strategy) {
    case FusionStrategy::Add:
      break;
    case FusionStrategy::Concat:
      p.projection = random_linear(2 * channels, channels, rng);
      break;
    case FusionStrategy::SelfAttention:
    case FusionStrategy::CrossAttention:
      if (heads == 0 || channels % heads != 0) {
        throw Error(ErrorCode::BadHeadCount, "C=" + std::to_string(channels) + " is not divisible by " +
                                                 std::to_string(heads) + " heads");
      }
      p.attention.heads = heads;
      p.attention.query = random_linear(channels, channels, rng);
      p.attention.key = random_linear(channels, channels, rng);
      p.attention.value = random_linear(channels, channels, rng);
      p.attention.output = random_linear(channels, channels, rng);
      if (strategy == FusionStrategy::SelfAttention) {
        p.norm1 = unit_norm(channels);
        p.norm2 = unit_norm(channels);
        p.ffn_in = random_linear(channels, 4 * channels, rng);
        p.ffn_out = random_linear(4 * channels, channels, rng);
      }
      break;
  }
  return p;
}

FeatureMap fuse_add(const FeatureMap& f2d, const FeatureMap& f3d) {
  check_pair(f2d, f3d);
  FeatureMap out = f2d;
  simd::active().axpy(1.0, f3d.data().data(), out.data().data(), out.size());
  return out;
}

FeatureMap fuse_concat(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params) {
  check_pair(f2d, f3d);
  check_params(f2d, params, FusionStrategy::Concat);
  const std::size_t c = f2d.channels();
  const std::size_t n = f2d.positions();
  FeatureMap out(f2d.height(), f2d.width(), c);
  const Linear& proj = params.projection;
  const simd::KernelTable& k = simd::active();
  for (std::size_t p = 0; p < n; ++p) {
    const double* a = f2d.position(p).data();
    const double* b = f3d.position(p).data();
    auto dst = out.position(p);
    for (std::size_t o = 0; o < c; ++o) {
      const double* row = proj.weight.data() + o * 2 * c;
      dst[o] = proj.bias[o] + k.dot(row, a, c) + k.dot(row + c, b, c);
    }
  }
  return out;
}

FeatureMap fuse_cross_attention(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params) {
  check_pair(f2d, f3d);
  check_params(f2d, params, FusionStrategy::CrossAttention);
  const std::size_t c = f2d.channels();
  const std::size_t n = f2d.positions();
  const Matrix attended = multi_head_attention(params.attention, f2d.data(), n, f3d.data(), n, c);
  FeatureMap out = f2d;
  simd::active().axpy(1.0, attended.data(), out.data().data(), out.size());
  return out;
}

FeatureMap fuse_self_attention(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params) {
  check_pair(f2d, f3d);
  check_params(f2d, params, FusionStrategy::SelfAttention);
  const std::size_t c = f2d.channels();
  const std::size_t n = f2d.positions();
  const std::size_t len = 2 * n;
  const simd::KernelTable& k = simd::active();

  Matrix x(len * c);
  std::copy(f2d.data().begin(), f2d.data().end(), x.begin());
  std::copy(f3d.data().begin(), f3d.data().end(), x.begin() + static_cast<std::ptrdiff_t>(n * c));

  const Matrix normed = layer_norm(params.norm1, x, len, c);
  const Matrix attended = multi_head_attention(params.attention, normed, len, normed, len, c);
  k.axpy(1.0, attended.data(), x.data(), x.size());

  const Matrix normed2 = layer_norm(params.norm2, x, len, c);
  Matrix hidden = apply(params.ffn_in, normed2, len);
  for (double& h : hidden) h = h > 0.0 ? h : 0.0;
  const Matrix ffn = apply(params.ffn_out, hidden, len);
  k.axpy(1.0, ffn.data(), x.data(), x.size());

  x.resize(n * c);
  return FeatureMap(f2d.height(), f2d.width(), c, std::move(x));
}

FeatureMap fuse(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params) {
  switch (params.strategy) {
    case FusionStrategy::Add: return fuse_add(f2d, f3d);
    case FusionStrategy::Concat: return fuse_concat(f2d, f3d, params);
    case FusionStrategy::CrossAttention: return fuse_cross_attention(f2d, f3d, params);
    case FusionStrategy::SelfAttention: return fuse_self_attention(f2d, f3d, params);
  }
  throw Error(ErrorCode::WrongStrategy, "unknown fusion strategy");
}

std::uint64_t checksum(const FeatureMap& map) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto mix = [&h](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xFFu;
      h *= 0x100000001B3ull;
    }
  };
  mix(map.height());
  mix(map.width());
  mix(map.channels());
  for (double x : map.data()) mix(std::bit_cast<std::uint64_t>(x));
  return h;
}

FeatureMap bench_input(std::uint64_t seed, std::size_t height, std::size_t width, std::size_t channels) {
  Rng rng(seed);
  std::vector<double> values(height * width * channels);
  for (double& v : values) v = rng.uniform(-1.0, 1.0);
  return FeatureMap(height, width, channels, std::move(values));
}

std::vector<FusionBenchResult> fusion_bench(const FusionBenchConfig& config) {
  if (config.height == 0 || config.width == 0 || config.channels == 0) {
    throw Error(ErrorCode::TooSmall, "bench shape must be positive in every dimension");
  }
  const FeatureMap f2d = bench_input(config.f2d_seed, config.height, config.width, config.channels);
  const FeatureMap f3d = bench_input(config.f3d_seed, config.height, config.width, config.channels);
  const std::uint64_t param_seed = derive_seed(config.f2d_seed, config.f3d_seed);

  std::vector<FusionBenchResult> results;
  for (FusionStrategy s : config.strategies) {
    const FusionParams params = init_fusion_params(s, config.channels, config.heads, param_seed);
    FusionBenchResult r{s, config.repetitions, std::nullopt, checksum(fuse(f2d, f3d, params))};
    if (config.repetitions > 0) {
      double sink = 0.0;
      const auto start = std::chrono::steady_clock::now();
      for (std::size_t i = 0; i < config.repetitions; ++i) sink += fuse(f2d, f3d, params).data()[0];
      const auto stop = std::chrono::steady_clock::now();
      static_cast<void>(sink);
      r.mean_ns = std::chrono::duration<double, std::nano>(stop - start).count() /
                  static_cast<double>(config.repetitions);
    }
    results.push_back(r);
  }
  return results;
}

}  // namespace pseudo3d
