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

#include "kernels_impl.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace pseudo3d::simd {
namespace avx2 {
namespace {

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_min_sd(lo, hi));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, hi));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, hi));
}

}  // namespace

MinMax minmax(std::span<const double> in) {
  MinMax r;
  const std::size_t n = in.size();
  if (n == 0) return r;
  const double* p = in.data();
  __m256d vlo = _mm256_set1_pd(p[0]);
  __m256d vhi = vlo;
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(p + i);
    // x - x is NaN exactly when x is NaN or infinite.
    const __m256d diff = _mm256_sub_pd(x, x);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(diff, diff, _CMP_UNORD_Q));
    vlo = _mm256_min_pd(x, vlo);
    vhi = _mm256_max_pd(x, vhi);
  }
  double lo = hmin(vlo);
  double hi = hmax(vhi);
  bool finite = _mm256_movemask_pd(bad) == 0;
  for (; i < n; ++i) {
    const double x = p[i];
    finite = finite && (x - x == 0.0);
    lo = x < lo ? x : lo;
    hi = x > hi ? x : hi;
  }
  r.min = lo + 0.0;
  r.max = hi + 0.0;
  r.finite = finite;
  return r;
}

void rescale(std::span<const double> in, double lo, double range, std::span<double> out) {
  const std::size_t n = in.size();
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vr = _mm256_set1_pd(range);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(in.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_div_pd(_mm256_sub_pd(x, vlo), vr));
  }
  for (; i < n; ++i) out[i] = (in[i] - lo) / range;
}

void rescale_invert(std::span<const double> in, double lo, double range, std::span<double> out) {
  const std::size_t n = in.size();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vr = _mm256_set1_pd(range);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(in.data() + i);
    const __m256d nrm = _mm256_div_pd(_mm256_sub_pd(x, vlo), vr);
    _mm256_storeu_pd(out.data() + i, _mm256_sub_pd(one, nrm));
  }
  for (; i < n; ++i) out[i] = 1.0 - (in[i] - lo) / range;
}

void one_minus(std::span<const double> in, std::span<double> out) {
  const std::size_t n = in.size();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out.data() + i, _mm256_sub_pd(one, _mm256_loadu_pd(in.data() + i)));
  }
  for (; i < n; ++i) out[i] = 1.0 - in[i];
}

void reciprocal_affine(std::span<const double> in, double s, double t, std::span<double> out) {
  const std::size_t n = in.size();
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(in.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_div_pd(vs, x), vt));
  }
  for (; i < n; ++i) out[i] = s / in[i] + t;
}

void backproject_row(std::span<const double> depth, const PinholeRow& k, std::span<double> xyz) {
  const std::size_t n = depth.size();
  const double dy = k.v - k.cy;
  const __m256d vcx = _mm256_set1_pd(k.cx);
  const __m256d vfx = _mm256_set1_pd(k.fx);
  const __m256d vfy = _mm256_set1_pd(k.fy);
  const __m256d vdy = _mm256_set1_pd(dy);
  const __m256d step = _mm256_set1_pd(4.0);
  __m256d ucol = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  alignas(32) double xs[4];
  alignas(32) double ys[4];
  std::size_t u = 0;
  for (; u + 4 <= n; u += 4) {
    const __m256d d = _mm256_loadu_pd(depth.data() + u);
    _mm256_store_pd(xs, _mm256_div_pd(_mm256_mul_pd(d, _mm256_sub_pd(ucol, vcx)), vfx));
    _mm256_store_pd(ys, _mm256_div_pd(_mm256_mul_pd(d, vdy), vfy));
    double* o = xyz.data() + 3 * u;
    for (int j = 0; j < 4; ++j) {
      o[3 * j + 0] = xs[j];
      o[3 * j + 1] = ys[j];
      o[3 * j + 2] = depth[u + j];
    }
    ucol = _mm256_add_pd(ucol, step);
  }
  for (; u < n; ++u) {
    const double d = depth[u];
    xyz[3 * u + 0] = d * (static_cast<double>(u) - k.cx) / k.fx;
    xyz[3 * u + 1] = d * dy / k.fy;
    xyz[3 * u + 2] = d;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  if (i + 4 <= n) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace avx2

namespace detail {

const KernelTable* avx2_table() {
  static const KernelTable table{
      "avx2",
      &avx2::minmax,
      &avx2::rescale,
      &avx2::rescale_invert,
      &avx2::one_minus,
      &avx2::reciprocal_affine,
      &avx2::backproject_row,
      &avx2::dot,
      &avx2::axpy,
  };
  return &table;
}

}  // namespace detail
}  // namespace pseudo3d::simd

#else

namespace pseudo3d::simd::detail {

const KernelTable* avx2_table() { return nullptr; }

}  // namespace pseudo3d::simd::detail

#endif
