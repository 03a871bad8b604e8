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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pseudo3d {

/// Outcome of one property suite. `details` are printed in insertion order as
/// key=value pairs; they never contain timings or paths so reports stay
/// byte-identical across runs with the same seed.
struct PropertyResult {
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, std::string>> details;

  void add(std::string key, std::string value) { details.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value);
  void add(std::string key, std::size_t value);
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::vector<std::string> properties;  // empty = all
  bool break_shift = false;             // fault injection for the affine suite
  std::filesystem::path scratch_dir;    // empty = a fresh directory under the system temp dir
};

struct VerifyReport {
  std::vector<PropertyResult> results;

  bool all_pass() const;
  std::string to_text() const;  // one `property=<name> status=<pass|fail> ...` line per suite
};

/// Suite names in execution order.
const std::vector<std::string_view>& property_names();

/// ConfigError for unknown property names.
VerifyReport run_verify(const VerifyOptions& options);

// Individual suites. Tolerances are fixed inside each.

/// 50 random metric scenes x s in {0.1, 1, 10} x t in {-5, 0, 5}: normalized
/// disparity within 1e-9 of the (1, 0) reference; plus the s < 0 reflection.
/// break_shift adds t after normalizing, which must make the suite fail.
PropertyResult check_affine_invariance(std::uint64_t seed, bool break_shift = false);

/// Wedge scene: naive reciprocal with t = 2 changes an inter-point distance
/// ratio by > 1e-3 relative; the normalized pipeline cloud for t = 2 matches
/// t = 0 within 1e-9.
PropertyResult check_shift_distortion(std::uint64_t seed);

/// 100 random (depth, intrinsics) pairs, fx, fy in [100, 2000]:
/// project(backproject(d)) recovers (u, v, d) within 1e-9.
PropertyResult check_roundtrip(std::uint64_t seed);

/// backproject(a d) == a backproject(d) within 1e-12 for a in {0.5, 2}, and
/// every cloud index projects back onto its own pixel.
PropertyResult check_scale_and_grid(std::uint64_t seed);

/// Analytic encoder gradients vs central differences (h = 1e-4) on >= 100
/// parameter coordinates of an 8x8 input; relative error <= 1e-4.
PropertyResult check_gradients(std::uint64_t seed);

/// Concat with [I | I] equals add within 1e-12; add is exactly local;
/// attention strategies are not; both attention fusions match the direct
/// oracles within 1e-12; every strategy preserves H' x W' x C.
PropertyResult check_fusion(std::uint64_t seed);

/// dataset_loss vs the flat-loop oracle within 1e-12 on 20 datasets; perfect
/// prediction <= 1e-5; (delta, 0, 0) gives mse_xyz == delta^2 / 3 exactly.
PropertyResult check_loss(std::uint64_t seed);

/// PLY export/import is float32-exact; PFM (both byte orders), PGM and CSV
/// encodings of one ramp read back identically.
PropertyResult check_file_roundtrips(std::uint64_t seed, const std::filesystem::path& scratch_dir);

/// Scalar and SIMD kernels agree: bitwise for elementwise kernels, to 1e-12
/// relative for reductions.
PropertyResult check_kernel_equivalence(std::uint64_t seed);

}  // namespace pseudo3d
