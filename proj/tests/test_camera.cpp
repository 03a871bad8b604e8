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

#include <cmath>
#include <numbers>

#include "pseudo3d/camera.hpp"
#include "pseudo3d/error.hpp"
#include "pseudo3d/synthetic.hpp"
#include "support.hpp"

using namespace pseudo3d;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

double gap(const Point3& a, const Point3& b) { return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z); }

}  // namespace

TEST_SUITE("camera") {
  TEST_CASE("principal point lies on the optical axis") {
    const CameraIntrinsics k{100.0, 120.0, 0.0, 0.0};
    const DepthMap d(1, 1, {0.5}, DepthKind::Inverted);
    CHECK(backproject(d, k).point(0) == Point3{0.0, 0.0, 0.5});
  }

  TEST_CASE("unit focal 2x2") {
    const DepthMap d(2, 2, {1, 1, 1, 1}, DepthKind::Metric);
    const PseudoPointCloud c = backproject(d, CameraIntrinsics{1, 1, 0, 0});
    CHECK(c.at(0, 0) == Point3{0, 0, 1});
    CHECK(c.at(0, 1) == Point3{1, 0, 1});
    CHECK(c.at(1, 0) == Point3{0, 1, 1});
    CHECK(c.at(1, 1) == Point3{1, 1, 1});
  }

  TEST_CASE("zero depth stays at the origin and keeps its grid slot") {
    const DepthMap d(3, 1, {1.0, 0.0, 0.5}, DepthKind::Inverted);
    const PseudoPointCloud c = backproject(d, CameraIntrinsics{2, 2, 0, 0});
    CHECK(c.size() == 3);
    CHECK(c.at(0, 1) == Point3{0, 0, 0});
    CHECK(c.at(0, 2) == Point3{0.5, 0, 0.5});
  }

  TEST_CASE("backproject needs inverted or metric depth") {
    const DepthMap rel(2, 1, {1, 2}, DepthKind::PredictedRelative);
    const DepthMap nor(2, 1, {0, 1}, DepthKind::Normalized);
    CHECK(code_of([&] { backproject(rel, CameraIntrinsics{}); }) == ErrorCode::WrongKind);
    CHECK(code_of([&] { backproject(nor, CameraIntrinsics{}); }) == ErrorCode::WrongKind);
  }

  TEST_CASE("intrinsics validation") {
    const DepthMap d(1, 1, {1}, DepthKind::Metric);
    CHECK(code_of([&] { backproject(d, CameraIntrinsics{0, 1, 0, 0}); }) == ErrorCode::InvalidIntrinsics);
    CHECK(code_of([&] { backproject(d, CameraIntrinsics{1, -1, 0, 0}); }) == ErrorCode::InvalidIntrinsics);
    CHECK(code_of([&] { backproject(d, CameraIntrinsics{1, 1, NAN, 0}); }) == ErrorCode::InvalidIntrinsics);
    CHECK_NOTHROW(CameraIntrinsics{1, 1, -5, -7}.validate());
  }

  TEST_CASE("frontoparallel plane: equal Z, X spacing z0/fx") {
    const CameraIntrinsics k{50.0, 40.0, 4.5, 3.0};
    const double z0 = 3.0;
    const SyntheticScene plane = synth_plane(k, 10, 7, z0);
    const PseudoPointCloud c = backproject(plane.depth, k);
    for (std::size_t v = 0; v < 7; ++v) {
      for (std::size_t u = 0; u < 10; ++u) {
        CHECK(c.at(v, u).z == z0);
        if (u > 0) CHECK(c.at(v, u).x - c.at(v, u - 1).x == doctest::Approx(z0 / 50.0).epsilon(1e-12));
      }
    }
    CHECK(c == plane.cloud);
  }

  TEST_CASE("project inverts backproject") {
    const CameraIntrinsics k{300.0, 250.0, 2.0, 1.5};
    const DepthMap d(4, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, DepthKind::Metric);
    const ProjectedGrid g = project(backproject(d, k), k);
    REQUIRE(g.width == 4);
    REQUIRE(g.height == 3);
    for (std::size_t v = 0; v < 3; ++v) {
      for (std::size_t u = 0; u < 4; ++u) {
        CHECK(g.at(v, u).u == doctest::Approx(static_cast<double>(u)).epsilon(1e-12));
        CHECK(g.at(v, u).v == doctest::Approx(static_cast<double>(v)).epsilon(1e-12));
        CHECK(g.at(v, u).depth == d.at(v, u));
      }
    }
  }

  TEST_CASE("optical-axis point projects to the principal point") {
    const CameraIntrinsics k{300.0, 250.0, 12.5, -4.0};
    const std::vector<Point3> pts{{0, 0, 7}};
    const ProjectedGrid g = project(PseudoPointCloud(1, 1, pts), k);
    CHECK(g.at(0, 0).u == 12.5);
    CHECK(g.at(0, 0).v == -4.0);
    CHECK(g.at(0, 0).depth == 7.0);
  }

  TEST_CASE("project reports every non-positive depth") {
    const std::vector<Point3> pts{{0, 0, 1}, {0, 0, 0}, {1, 1, -2}, {0, 0, 3}};
    try {
      project(PseudoPointCloud(2, 2, pts), CameraIntrinsics{});
      FAIL("expected NonPositiveDepthError");
    } catch (const NonPositiveDepthError& e) {
      CHECK(e.code() == ErrorCode::NonPositiveDepth);
      CHECK(e.indices() == std::vector<std::size_t>{1, 2});
    }
  }

  TEST_CASE("round trip on random pairs") {
    Rng rng(31);
    for (int n = 0; n < 100; ++n) {
      const DepthMap d = test::random_depth(rng, DepthKind::Metric, 24, 0.05, 50.0);
      const CameraIntrinsics k{rng.uniform(100, 2000), rng.uniform(100, 2000), rng.uniform(-20, 40), rng.uniform(-20, 40)};
      const ProjectedGrid g = project(backproject(d, k), k);
      for (std::size_t v = 0; v < d.height(); ++v) {
        for (std::size_t u = 0; u < d.width(); ++u) {
          CHECK(std::abs(g.at(v, u).u - static_cast<double>(u)) <= 1e-9);
          CHECK(std::abs(g.at(v, u).v - static_cast<double>(v)) <= 1e-9);
          CHECK(std::abs(g.at(v, u).depth - d.at(v, u)) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("scale equivariance") {
    Rng rng(32);
    for (int n = 0; n < 30; ++n) {
      const DepthMap d = test::random_depth(rng, DepthKind::Metric, 16, 0.1, 10.0);
      const CameraIntrinsics k{rng.uniform(100, 2000), rng.uniform(100, 2000), rng.uniform(0, 16), rng.uniform(0, 16)};
      const PseudoPointCloud base = backproject(d, k);
      for (double alpha : {0.5, 2.0}) {
        const PseudoPointCloud s = backproject(scaled(d, alpha), k);
        for (std::size_t i = 0; i < s.xyz().size(); ++i) CHECK(std::abs(s.xyz()[i] - alpha * base.xyz()[i]) <= 1e-12);
      }
    }
  }

  TEST_CASE("adding a shift to depth is not a similarity transform") {
    Rng rng(33);
    for (int n = 0; n < 20; ++n) {
      const std::size_t w = 3 + rng.below(10), h = 2 + rng.below(6);
      std::vector<double> v(w * h);
      for (double& x : v) x = rng.uniform(0.5, 5.0);
      const DepthMap d(w, h, v, DepthKind::Metric);
      for (double& x : v) x += 2.0;
      const DepthMap shifted(w, h, v, DepthKind::Metric);
      const CameraIntrinsics k{20, 20, (w - 1) / 2.0, (h - 1) / 2.0};
      const PseudoPointCloud a = backproject(d, k);
      const PseudoPointCloud b = backproject(shifted, k);
      const double ref = gap(a.point(0), a.point(1)) / gap(b.point(0), b.point(1));
      double worst = 0.0;
      for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        const double r = gap(a.point(i), a.point(i + 1)) / gap(b.point(i), b.point(i + 1));
        worst = std::max(worst, std::abs(r - ref) / ref);
      }
      CHECK(worst > 1e-6);
    }
  }

  TEST_CASE("intrinsics from field of view") {
    const CameraIntrinsics a = estimate_intrinsics_from_fov(90.0, 2, 2);
    CHECK(a.fx == doctest::Approx(1.0).epsilon(1e-12));
    const CameraIntrinsics b = estimate_intrinsics_from_fov(90.0, 640, 480);
    CHECK(b.fx == doctest::Approx(320.0).epsilon(1e-12));
    CHECK(b.fy == b.fx);
    CHECK(b.cx == 319.5);
    CHECK(b.cy == 239.5);
    const CameraIntrinsics c = estimate_intrinsics_from_fov(90.0, 640, 480, 60.0);
    CHECK(c.fy == doctest::Approx(240.0 / std::tan(std::numbers::pi / 6.0)).epsilon(1e-12));
    CHECK(code_of([] { estimate_intrinsics_from_fov(0.0, 4, 4); }) == ErrorCode::InvalidFov);
    CHECK(code_of([] { estimate_intrinsics_from_fov(180.0, 4, 4); }) == ErrorCode::InvalidFov);
    CHECK(code_of([] { estimate_intrinsics_from_fov(60.0, 4, 4, 200.0); }) == ErrorCode::InvalidFov);
    CHECK(code_of([] { estimate_intrinsics_from_fov(60.0, 0, 4); }) == ErrorCode::TooSmall);
  }

  TEST_CASE("estimated and exact intrinsics give the same plane cloud for a 60 degree camera") {
    const std::size_t w = 12, h = 9;
    const CameraIntrinsics est = estimate_intrinsics_from_fov(60.0, w, h);
    const double fx = (w / 2.0) / std::tan(std::numbers::pi / 6.0);
    const CameraIntrinsics exact{fx, fx, (w - 1) / 2.0, (h - 1) / 2.0};
    const SyntheticScene plane = synth_plane(exact, w, h, 2.5);
    CHECK(backproject(plane.depth, est) == backproject(plane.depth, exact));
  }

  TEST_CASE("intrinsics config text") {
    const CameraIntrinsics a = parse_intrinsics_config("# camera\nfx = 500\nfy: 510\ncx = 319.5  # center\ncy = 239.5\n");
    CHECK(a.fx == 500.0);
    CHECK(a.fy == 510.0);
    CHECK(a.cx == 319.5);
    CHECK(a.cy == 239.5);

    const CameraIntrinsics b = parse_intrinsics_config("fov_x_deg = 90\nwidth = 640\nheight = 480\n");
    CHECK(b.fx == doctest::Approx(320.0).epsilon(1e-12));
    CHECK(b.cx == 319.5);

    CHECK(code_of([] { parse_intrinsics_config("fx = 1\nfy = 1\ncx = 0\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_intrinsics_config("fx = 1\nfy = 1\ncx = 0\ncy = 0\nfov_x_deg = 60\n"); }) ==
          ErrorCode::ConfigError);
    CHECK(code_of([] { parse_intrinsics_config("fx = 1\nfx = 2\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_intrinsics_config("focal = 1\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_intrinsics_config("fx = one\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_intrinsics_config("fov_x_deg = 60\nwidth = 6.5\nheight = 4\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_intrinsics_config("fov_x_deg = 60\nwidth = 8\nheight = 4\ncx = 1\n"); }) ==
          ErrorCode::ConfigError);
    CHECK(code_of([] { parse_intrinsics_config(""); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_intrinsics_config("fx = 0\nfy = 1\ncx = 0\ncy = 0\n"); }) == ErrorCode::InvalidIntrinsics);
    CHECK(code_of([] { load_intrinsics_config("/nonexistent/k.txt"); }) == ErrorCode::IoError);
  }
}
