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
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pseudo3d/feature_map.hpp"

namespace pseudo3d {

enum class FusionStrategy { Add, Concat, CrossAttention, SelfAttention };

std::string_view to_string(FusionStrategy s);                // add | concat | xattn | sattn
FusionStrategy parse_fusion_strategy(std::string_view name);  // ConfigError on unknown names

/// y = W x + b with W stored row-major as [out][in].
struct Linear {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  static Linear zeros(std::size_t in, std::size_t out);
};

struct AttentionParams {
  std::size_t heads = 0;
  Linear query, key, value, output;  // all C -> C; head h owns rows [h*C/heads, (h+1)*C/heads)
};

struct LayerNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  double eps = 1e-5;
};

/// Parameters for one fusion strategy. Only the members used by `strategy`
/// are populated.
struct FusionParams {
  FusionStrategy strategy = FusionStrategy::Add;
  std::size_t channels = 0;

  Linear projection;  // Concat: 2C -> C, input order [f2d, f3d]

  AttentionParams attention;  // CrossAttention, SelfAttention

  // SelfAttention: pre-norm encoder layer
  //   x = x + MHSA(norm1(x));  x = x + W2 relu(W1 norm2(x) + b1) + b2
  LayerNormParams norm1, norm2;
  Linear ffn_in;   // C -> 4C
  Linear ffn_out;  // 4C -> C
};

inline constexpr std::size_t kDefaultHeads = 4;

/// Seeded uniform(+-1/sqrt(fan_in)) weights, zero biases, unit layer-norm gains.
FusionParams init_fusion_params(FusionStrategy strategy, std::size_t channels, std::size_t heads, std::uint64_t seed);

FeatureMap fuse_add(const FeatureMap& f2d, const FeatureMap& f3d);

/// Channel concatenation [f2d, f3d] followed by the 1x1 projection back to C.
FeatureMap fuse_concat(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params);

/// f2d + MHCA(f2d, f3d, f3d) over the flattened H'W' positions, scaled by 1/sqrt(C/heads).
FeatureMap fuse_cross_attention(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params);

/// One pre-norm transformer encoder layer over the 2H'W' sequence [f2d; f3d];
/// the first H'W' outputs form the fused map.
FeatureMap fuse_self_attention(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params);

/// Dispatches on params.strategy.
FeatureMap fuse(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params);

/// FNV-1a over the IEEE bit patterns of the values; identical maps give identical sums.
std::uint64_t checksum(const FeatureMap& map);

struct FusionBenchConfig {
  std::uint64_t f2d_seed = 0;
  std::uint64_t f3d_seed = 1;
  std::size_t height = 8;
  std::size_t width = 8;
  std::size_t channels = 32;
  std::size_t heads = kDefaultHeads;
  std::size_t repetitions = 10;
  std::vector<FusionStrategy> strategies{FusionStrategy::Add, FusionStrategy::Concat,
                                         FusionStrategy::CrossAttention, FusionStrategy::SelfAttention};
};

struct FusionBenchResult {
  FusionStrategy strategy;
  std::size_t repetitions;
  std::optional<double> mean_ns;  // empty when repetitions == 0
  std::uint64_t checksum;
};

/// Seeded inputs and parameters, one untimed evaluation for the checksum,
/// then `repetitions` timed evaluations per strategy.
std::vector<FusionBenchResult> fusion_bench(const FusionBenchConfig& config);

/// The seeded inputs fusion_bench uses, exposed so callers can reproduce them.
FeatureMap bench_input(std::uint64_t seed, std::size_t height, std::size_t width, std::size_t channels);

}  // namespace pseudo3d
