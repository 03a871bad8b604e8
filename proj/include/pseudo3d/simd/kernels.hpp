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

// Dense inner loops behind the depth, camera, encoder and fusion modules.
//
// Every kernel exists as a portable scalar reference and, where the target
// supports it, an AVX2 variant. The active table is picked once at startup
// from CPUID; PSEUDO3D_SIMD=scalar forces the reference path.
//
// Elementwise kernels perform the same IEEE operations in the same order in
// every variant, so their outputs are bitwise identical across backends.
// Reductions (dot) may reassociate and only agree to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace pseudo3d::simd {

struct MinMax {
  double min = 0.0;
  double max = 0.0;
  bool finite = true;
};

struct PinholeRow {
  double fx, fy, cx, cy;
  double v;  // row index of this scanline
};

struct KernelTable {
  std::string_view name;

  // Min/max with a NaN/Inf scan in the same pass. Empty input reports finite
  // with min = max = 0.
  MinMax (*minmax)(std::span<const double> in);

  // out = (in - lo) / range
  void (*rescale)(std::span<const double> in, double lo, double range, std::span<double> out);

  // out = 1 - (in - lo) / range
  void (*rescale_invert)(std::span<const double> in, double lo, double range, std::span<double> out);

  // out = 1 - in
  void (*one_minus)(std::span<const double> in, std::span<double> out);

  // out = s / in + t
  void (*reciprocal_affine)(std::span<const double> in, double s, double t, std::span<double> out);

  // xyz[3u..3u+2] = (d*(u-cx)/fx, d*(v-cy)/fy, d) for every u in the row.
  void (*backproject_row)(std::span<const double> depth, const PinholeRow& k, std::span<double> xyz);

  double (*dot)(const double* a, const double* b, std::size_t n);

  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

enum class Backend { Scalar, Avx2 };

const KernelTable& scalar_kernels();

// nullptr when not compiled in or the CPU lacks the extension.
const KernelTable* avx2_kernels();

// Table used by the library. Resolved lazily on first call.
const KernelTable& active();

// Overrides the automatic choice; returns false if the backend is unavailable.
bool select_backend(Backend backend);

}  // namespace pseudo3d::simd
