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

#include "pseudo3d/encoder.hpp"
#include "pseudo3d/error.hpp"
#include "pseudo3d/testing/oracles.hpp"
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

double inner(const FeatureMap& a, const FeatureMap& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

CoordinateMap random_coordinate_map(Rng& rng, std::size_t w, std::size_t h) {
  std::vector<double> planes(3 * w * h);
  for (double& x : planes) x = rng.uniform(-3.0, 3.0);
  return CoordinateMap(w, h, std::move(planes));
}

}  // namespace

TEST_SUITE("encoder") {
  TEST_CASE("seeded init") {
    CHECK(init_params(5) == init_params(5));
    CHECK_FALSE(init_params(5) == init_params(6));
    const EncoderParams p = init_params(9, 24);
    CHECK(p.out_channels() == 24);
    CHECK(p.parameter_count() == 16 * 27 + 16 + 24 * 144 + 24);
    for (const ConvLayer* l : {&p.conv1, &p.conv2}) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(l->fan_in()));
      for (double w : l->weight) CHECK(std::abs(w) <= bound);
      for (double b : l->bias) CHECK(b == 0.0);
    }
    CHECK(code_of([] { init_params(1, 0); }) == ErrorCode::BadChannels);
  }

  TEST_CASE("parameter indexing follows the documented order") {
    EncoderParams p = init_params(3, 4);
    CHECK(&p.parameter(0) == &p.conv1.weight[0]);
    CHECK(&p.parameter(432) == &p.conv1.bias[0]);
    CHECK(&p.parameter(448) == &p.conv2.weight[0]);
    CHECK(&p.parameter(p.parameter_count() - 1) == &p.conv2.bias.back());
    CHECK(code_of([&] { p.parameter(p.parameter_count()); }) == ErrorCode::ShapeMismatch);
  }

  TEST_CASE("zero input and zero bias give zero output") {
    const FeatureMap out = encode(FeatureMap(8, 8, 3), init_params(1));
    for (double x : out.data()) CHECK(x == 0.0);
  }

  TEST_CASE("output shape is ceil(H/4) x ceil(W/4) x C") {
    const EncoderParams p = init_params(2, 8);
    for (std::size_t h = 4; h <= 13; ++h) {
      for (std::size_t w = 4; w <= 13; ++w) {
        const FeatureMap out = encode(FeatureMap(h, w, 3), p);
        CHECK(out.height() == (h + 3) / 4);
        CHECK(out.width() == (w + 3) / 4);
        CHECK(out.channels() == 8);
      }
    }
    CHECK(encode(FeatureMap(8, 8, 3), init_params(2)).same_shape(FeatureMap(2, 2, 32)));
  }

  TEST_CASE("input checks") {
    const EncoderParams p = init_params(1);
    CHECK(code_of([&] { encode(FeatureMap(8, 8, 2), p); }) == ErrorCode::BadChannels);
    CHECK(code_of([&] { encode(FeatureMap(3, 8, 3), p); }) == ErrorCode::TooSmall);
    EncoderParams broken = p;
    broken.conv2.bias.pop_back();
    CHECK(code_of([&] { encode(FeatureMap(8, 8, 3), broken); }) == ErrorCode::ShapeMismatch);
  }

  TEST_CASE("centered impulse matches the direct convolution oracle") {
    EncoderParams p = init_params(4);
    Rng rng(61);
    for (double& b : p.conv1.bias) b = rng.uniform(-0.1, 0.1);
    for (std::size_t c = 0; c < 3; ++c) {
      FeatureMap impulse(8, 8, 3);
      impulse.at(4, 4, c) = 1.0;
      CHECK(test::max_abs_diff(encode(impulse, p).data(), oracle::encode(impulse, p).output.data()) <= 1e-12);
    }
  }

  TEST_CASE("random inputs of odd sizes match the oracle") {
    Rng rng(62);
    for (int i = 0; i < 20; ++i) {
      const std::size_t h = 4 + rng.below(10), w = 4 + rng.below(10);
      EncoderParams p = init_params(rng.next(), 1 + rng.below(12));
      for (double& b : p.conv1.bias) b = rng.uniform(-0.2, 0.2);
      for (double& b : p.conv2.bias) b = rng.uniform(-0.2, 0.2);
      const FeatureMap in = test::random_map(rng, h, w, 3);
      CHECK(test::max_abs_diff(encode(in, p).data(), oracle::encode(in, p).output.data()) <= 1e-12);
    }
  }

  TEST_CASE("coordinate maps are laid out as HWC") {
    Rng rng(63);
    const CoordinateMap m = random_coordinate_map(rng, 6, 5);
    const FeatureMap f = to_feature_map(m);
    CHECK(f.height() == 5);
    CHECK(f.width() == 6);
    for (std::size_t v = 0; v < 5; ++v) {
      for (std::size_t u = 0; u < 6; ++u) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(f.at(v, u, c) == m.at(c, v, u));
      }
    }
    const EncoderParams p = init_params(7);
    CHECK(encode(m, p) == encode(f, p));
  }

  TEST_CASE("pixel transposition changes the encoding") {
    Rng rng(64);
    const EncoderParams p = init_params(8);
    for (int i = 0; i < 10; ++i) {
      const FeatureMap in = test::random_map(rng, 8, 8, 3);
      FeatureMap swapped = in;
      const std::size_t a = rng.below(64);
      std::size_t b = rng.below(64);
      while (b == a) b = rng.below(64);
      for (std::size_t c = 0; c < 3; ++c) std::swap(swapped.position(a)[c], swapped.position(b)[c]);
      CHECK_FALSE(encode(in, p) == encode(swapped, p));
    }
  }

  TEST_CASE("zero upstream gives zero gradients") {
    Rng rng(65);
    const FeatureMap in = test::random_map(rng, 8, 8, 3);
    const EncoderParams p = init_params(3);
    const EncoderGradients g = encode_backward(in, p, FeatureMap(2, 2, 32));
    for (std::size_t i = 0; i < g.params.parameter_count(); ++i) CHECK(g.params.parameter(i) == 0.0);
    for (double x : g.input.data()) CHECK(x == 0.0);
    CHECK(code_of([&] { encode_backward(in, p, FeatureMap(2, 2, 31)); }) == ErrorCode::ShapeMismatch);
  }

  TEST_CASE("dead ReLU units pass no gradient") {
    Rng rng(66);
    const FeatureMap in = test::random_map(rng, 8, 8, 3);
    EncoderParams p = init_params(3);
    for (double& b : p.conv1.bias) b = -100.0;
    const EncoderGradients g = encode_backward(in, p, test::random_map(rng, 2, 2, 32));
    for (double x : g.params.conv1.weight) CHECK(x == 0.0);
    for (double x : g.params.conv1.bias) CHECK(x == 0.0);
    for (double x : g.params.conv2.weight) CHECK(x == 0.0);
    for (double x : g.input.data()) CHECK(x == 0.0);
    // conv2 bias still sees the upstream sum.
    CHECK(g.params.conv2.bias[0] != 0.0);
  }

  TEST_CASE("analytic gradients match central differences") {
    Rng rng(67);
    const FeatureMap in = test::random_map(rng, 8, 8, 3);
    EncoderParams p = init_params(11);
    for (double& b : p.conv1.bias) b = rng.uniform(-0.1, 0.1);
    const FeatureMap up = test::random_map(rng, 2, 2, 32);
    const EncoderGradients g = encode_backward(in, p, up);
    const double h = 1e-4;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < p.parameter_count(); i += 7) {
      EncoderParams probe = p;
      const double x0 = p.parameter(i);
      probe.parameter(i) = x0 + h;
      const auto hi = oracle::encode(in, probe);
      const double f_hi = inner(up, hi.output);
      probe.parameter(i) = x0 - h;
      const auto lo = oracle::encode(in, probe);
      const double f_lo = inner(up, lo.output);
      bool kink = false;
      for (std::size_t k = 0; k < hi.pre_activation.size(); ++k) {
        kink = kink || ((hi.pre_activation.data()[k] > 0) != (lo.pre_activation.data()[k] > 0));
      }
      if (kink) continue;
      const double numeric = (f_hi - f_lo) / (2 * h);
      const double analytic = g.params.parameter(i);
      CHECK(std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6}) <= 1e-4);
      ++checked;
    }
    CHECK(checked >= 100);
  }

  TEST_CASE("per-channel standardization") {
    Rng rng(68);
    for (int i = 0; i < 20; ++i) {
      const CoordinateMap m = random_coordinate_map(rng, 4 + rng.below(8), 4 + rng.below(8));
      const StandardizedMap s = normalize_coordinate_map(m);
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK_FALSE(s.constant[c]);
        double mean = 0.0;
        for (double x : s.map.channel(c)) mean += x;
        mean /= static_cast<double>(s.map.plane_size());
        CHECK(std::abs(mean) <= 1e-12);
      }
      const StandardizedMap twice = normalize_coordinate_map(s.map);
      CHECK(test::max_abs_diff(twice.map.data(), s.map.data()) <= 1e-12);
    }
  }

  TEST_CASE("constant channel passes through and is flagged") {
    std::vector<double> planes(3 * 4);
    for (std::size_t i = 0; i < 4; ++i) {
      planes[i] = static_cast<double>(i);
      planes[4 + i] = -static_cast<double>(i * i);
      planes[8 + i] = 2.5;
    }
    const StandardizedMap s = normalize_coordinate_map(CoordinateMap(2, 2, planes));
    CHECK_FALSE(s.constant[0]);
    CHECK_FALSE(s.constant[1]);
    CHECK(s.constant[2]);
    for (double z : s.map.channel(2)) CHECK(z == 2.5);
  }

  TEST_CASE("parameter serialization") {
    test::ScratchDir dir;
    const EncoderParams p = init_params(12, 20);
    CHECK(deserialize_params(serialize_params(p)) == p);
    save_params(p, dir / "enc.bin");
    CHECK(load_params(dir / "enc.bin") == p);

    std::vector<unsigned char> blob = serialize_params(p);
    blob.pop_back();
    CHECK(code_of([&] { deserialize_params(blob); }) == ErrorCode::ParseError);
    blob = serialize_params(p);
    blob[0] = 'X';
    CHECK(code_of([&] { deserialize_params(blob); }) == ErrorCode::ParseError);
    blob = serialize_params(p);
    blob[4] = 2;
    CHECK(code_of([&] { deserialize_params(blob); }) == ErrorCode::ParseError);
  }
}
