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

#include <cmath>

#include "kernels_impl.hpp"

namespace pseudo3d::simd {
namespace scalar {

MinMax minmax(std::span<const double> in) {
  MinMax r;
  if (in.empty()) return r;
  double lo = in[0];
  double hi = in[0];
  bool finite = true;
  for (double x : in) {
    finite = finite && std::isfinite(x);
    lo = x < lo ? x : lo;
    hi = x > hi ? x : hi;
  }
  // -0.0 and +0.0 compare equal; canonicalize so every backend agrees.
  r.min = lo + 0.0;
  r.max = hi + 0.0;
  r.finite = finite;
  return r;
}

void rescale(std::span<const double> in, double lo, double range, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = (in[i] - lo) / range;
}

void rescale_invert(std::span<const double> in, double lo, double range, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = 1.0 - (in[i] - lo) / range;
}

void one_minus(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = 1.0 - in[i];
}

void reciprocal_affine(std::span<const double> in, double s, double t, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = s / in[i] + t;
}

void backproject_row(std::span<const double> depth, const PinholeRow& k, std::span<double> xyz) {
  const double dy = k.v - k.cy;
  for (std::size_t u = 0; u < depth.size(); ++u) {
    const double d = depth[u];
    xyz[3 * u + 0] = d * (static_cast<double>(u) - k.cx) / k.fx;
    xyz[3 * u + 1] = d * dy / k.fy;
    xyz[3 * u + 2] = d;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace scalar

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",
      &scalar::minmax,
      &scalar::rescale,
      &scalar::rescale_invert,
      &scalar::one_minus,
      &scalar::reciprocal_affine,
      &scalar::backproject_row,
      &scalar::dot,
      &scalar::axpy,
  };
  return table;
}

}  // namespace pseudo3d::simd
