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

#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>

#include "pseudo3d/depth_map.hpp"
#include "pseudo3d/simd/kernels.hpp"
#include "support.hpp"

using namespace pseudo3d;

namespace {

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

// Restores the process-wide backend when a test case ends.
struct BackendGuard {
  simd::Backend saved = simd::active().name == simd::scalar_kernels().name ? simd::Backend::Scalar : simd::Backend::Avx2;
  ~BackendGuard() { simd::select_backend(saved); }
};

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar table is always there and selectable") {
    BackendGuard guard;
    CHECK(simd::select_backend(simd::Backend::Scalar));
    CHECK(simd::active().name == simd::scalar_kernels().name);
    if (simd::avx2_kernels() != nullptr) {
      CHECK(simd::select_backend(simd::Backend::Avx2));
      CHECK(simd::active().name == simd::avx2_kernels()->name);
    } else {
      CHECK_FALSE(simd::select_backend(simd::Backend::Avx2));
    }
  }

  TEST_CASE("scalar minmax edge cases") {
    const auto& k = simd::scalar_kernels();
    const simd::MinMax e = k.minmax({});
    CHECK(e.finite);
    const std::vector<double> v{3.0, -0.0, 0.0, -2.0, 8.0};
    const simd::MinMax m = k.minmax(v);
    CHECK(m.min == -2.0);
    CHECK(m.max == 8.0);
    const std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_FALSE(k.minmax(bad).finite);
    const std::vector<double> inf{1.0, -std::numeric_limits<double>::infinity()};
    CHECK_FALSE(k.minmax(inf).finite);
  }

  TEST_CASE("vector kernels agree with scalar ones") {
    const simd::KernelTable* fast = simd::avx2_kernels();
    if (fast == nullptr) {
      MESSAGE("no AVX2 on this machine; scalar only");
      return;
    }
    const auto& ref = simd::scalar_kernels();
    Rng rng(91);
    for (std::size_t n = 0; n < 130; ++n) {
      std::vector<double> x(n), y(n), a(n), b(n);
      for (double& v : x) v = rng.uniform(0.01, 100.0);
      for (double& v : y) v = rng.uniform(-100.0, 100.0);
      if (n > 3) y[rng.below(n)] = -0.0;

      const simd::MinMax m1 = ref.minmax(y), m2 = fast->minmax(y);
      CHECK(std::bit_cast<std::uint64_t>(m1.min) == std::bit_cast<std::uint64_t>(m2.min));
      CHECK(std::bit_cast<std::uint64_t>(m1.max) == std::bit_cast<std::uint64_t>(m2.max));
      if (n > 0) {
        auto z = y;
        z[rng.below(n)] = std::numeric_limits<double>::quiet_NaN();
        CHECK_FALSE(fast->minmax(z).finite);
        z[rng.below(n)] = std::numeric_limits<double>::infinity();
        CHECK_FALSE(fast->minmax(z).finite);
      }

      ref.rescale(y, -1.5, 3.25, a);
      fast->rescale(y, -1.5, 3.25, b);
      CHECK(bitwise_equal(a, b));
      ref.rescale_invert(y, -1.5, 3.25, a);
      fast->rescale_invert(y, -1.5, 3.25, b);
      CHECK(bitwise_equal(a, b));
      ref.one_minus(y, a);
      fast->one_minus(y, b);
      CHECK(bitwise_equal(a, b));
      ref.reciprocal_affine(x, -2.0, 0.75, a);
      fast->reciprocal_affine(x, -2.0, 0.75, b);
      CHECK(bitwise_equal(a, b));
      a = y;
      b = y;
      ref.axpy(-1.25, x.data(), a.data(), n);
      fast->axpy(-1.25, x.data(), b.data(), n);
      CHECK(bitwise_equal(a, b));

      std::vector<double> pa(3 * n), pb(3 * n);
      const simd::PinholeRow row{rng.uniform(100, 2000), rng.uniform(100, 2000), rng.uniform(-5, 50),
                                 rng.uniform(-5, 50), static_cast<double>(rng.below(40))};
      ref.backproject_row(x, row, pa);
      fast->backproject_row(x, row, pb);
      CHECK(bitwise_equal(pa, pb));

      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
      CHECK(std::abs(ref.dot(x.data(), y.data(), n) - fast->dot(x.data(), y.data(), n)) <= 1e-13 * (mag + 1e-300));
    }
  }

  TEST_CASE("depth pipeline gives identical bits on both backends") {
    if (simd::avx2_kernels() == nullptr) return;
    BackendGuard guard;
    Rng rng(92);
    for (int i = 0; i < 20; ++i) {
      const DepthMap d = test::random_depth(rng, DepthKind::PredictedRelative, 40, 0.1, 10.0);
      if (d.size() < 2) continue;
      simd::select_backend(simd::Backend::Scalar);
      const DepthMap s = pipeline_relative_to_dr(d);
      simd::select_backend(simd::Backend::Avx2);
      const DepthMap v = pipeline_relative_to_dr(d);
      CHECK(bitwise_equal(s.values(), v.values()));
    }
  }
}
