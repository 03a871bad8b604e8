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

#include <fstream>

#include "pseudo3d/depth_io.hpp"
#include "pseudo3d/error.hpp"
#include "support.hpp"

using namespace pseudo3d;

namespace {

const std::filesystem::path kData = PSEUDO3D_TEST_DATA;

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

void check_ramp(const DepthMap& d) {
  REQUIRE(d.width() == 7);
  REQUIRE(d.height() == 5);
  for (std::size_t v = 0; v < 5; ++v) {
    for (std::size_t u = 0; u < 7; ++u) CHECK(d.at(v, u) == static_cast<double>(v * 7 + u + 1));
  }
}

}  // namespace

TEST_SUITE("depth_io") {
  TEST_CASE("committed fixtures agree across formats") {
    const auto kind = DepthKind::PredictedRelative;
    check_ramp(read_pfm(kData / "ramp_le.pfm", kind));
    check_ramp(read_pfm(kData / "ramp_be.pfm", kind));
    check_ramp(read_pgm(kData / "ramp16.pgm", kind));
    check_ramp(read_pgm(kData / "ramp8.pgm", kind));
    check_ramp(read_csv(kData / "ramp.csv", kind));
    check_ramp(read_depth(kData / "ramp.csv", parse_depth_format("csv"), kind));
  }

  TEST_CASE("kind comes from the caller") {
    CHECK(read_csv(kData / "ramp.csv", DepthKind::Metric).kind() == DepthKind::Metric);
    CHECK(code_of([] { read_csv(kData / "ramp.csv", DepthKind::Normalized); }) == ErrorCode::InvalidDepth);
  }

  TEST_CASE("PGM linear mapping") {
    const DepthMap d = read_pgm(kData / "ramp16.pgm", DepthKind::PredictedRelative, PgmMapping{0.5, -1.0});
    CHECK(d.at(0, 0) == -0.5);
    CHECK(d.at(4, 6) == 16.5);
  }

  TEST_CASE("writers round trip random maps") {
    test::ScratchDir dir;
    Rng rng(21);
    for (int i = 0; i < 20; ++i) {
      const DepthMap d = test::random_depth(rng, DepthKind::PredictedRelative, 12, -100.0, 100.0);
      write_csv(d, dir / "a.csv");
      const DepthMap c = read_csv(dir / "a.csv", DepthKind::PredictedRelative);
      CHECK(std::equal(c.values().begin(), c.values().end(), d.values().begin()));

      for (Endian e : {Endian::Little, Endian::Big}) {
        write_pfm(d, dir / "a.pfm", e);
        const DepthMap p = read_pfm(dir / "a.pfm", DepthKind::PredictedRelative);
        REQUIRE(p.size() == d.size());
        for (std::size_t k = 0; k < d.size(); ++k) CHECK(p[k] == static_cast<double>(static_cast<float>(d[k])));
      }

      const PgmMapping m{0.01, -200.0};
      write_pgm16(d, dir / "a.pgm", m);
      const DepthMap g = read_pgm(dir / "a.pgm", DepthKind::PredictedRelative, m);
      for (std::size_t k = 0; k < d.size(); ++k) CHECK(std::abs(g[k] - d[k]) <= 0.005 + 1e-9);
    }
  }

  TEST_CASE("PGM writer rejects values outside 16 bits") {
    test::ScratchDir dir;
    const DepthMap d(2, 1, {-1.0, 3.0}, DepthKind::PredictedRelative);
    CHECK(code_of([&] { write_pgm16(d, dir / "x.pgm"); }) == ErrorCode::InvalidRange);
    const DepthMap big(1, 1, {70000.0}, DepthKind::PredictedRelative);
    CHECK(code_of([&] { write_pgm16(big, dir / "x.pgm"); }) == ErrorCode::InvalidRange);
  }

  TEST_CASE("malformed inputs") {
    test::ScratchDir dir;
    CHECK(code_of([&] { read_csv(dir / "missing.csv", DepthKind::Metric); }) == ErrorCode::IoError);

    write_text(dir / "ragged.csv", "1,2,3\n4,5\n");
    CHECK(code_of([&] { read_csv(dir / "ragged.csv", DepthKind::Metric); }) == ErrorCode::ParseError);
    write_text(dir / "word.csv", "1,abc\n");
    CHECK(code_of([&] { read_csv(dir / "word.csv", DepthKind::Metric); }) == ErrorCode::ParseError);
    write_text(dir / "empty.csv", "");
    CHECK(code_of([&] { read_csv(dir / "empty.csv", DepthKind::Metric); }) == ErrorCode::ParseError);
    write_text(dir / "nan.csv", "1,nan\n");
    CHECK_THROWS_AS(read_csv(dir / "nan.csv", DepthKind::PredictedRelative), Error);

    write_text(dir / "color.pfm", "PF\n1 1\n-1.0\n" + std::string(12, '\0'));
    CHECK(code_of([&] { read_pfm(dir / "color.pfm", DepthKind::PredictedRelative); }) == ErrorCode::ParseError);
    write_text(dir / "short.pfm", "Pf\n2 2\n-1.0\n" + std::string(8, '\0'));
    CHECK(code_of([&] { read_pfm(dir / "short.pfm", DepthKind::PredictedRelative); }) == ErrorCode::IoError);
    write_text(dir / "zero.pfm", "Pf\n1 1\n0\n" + std::string(4, '\0'));
    CHECK(code_of([&] { read_pfm(dir / "zero.pfm", DepthKind::PredictedRelative); }) == ErrorCode::ParseError);

    write_text(dir / "ascii.pgm", "P2\n1 1\n255\n7\n");
    CHECK(code_of([&] { read_pgm(dir / "ascii.pgm", DepthKind::PredictedRelative); }) == ErrorCode::ParseError);
    write_text(dir / "over.pgm", std::string("P5\n1 1\n10\n") + char(11));
    CHECK(code_of([&] { read_pgm(dir / "over.pgm", DepthKind::PredictedRelative); }) == ErrorCode::ParseError);

    CHECK(code_of([] { parse_depth_format("png"); }) == ErrorCode::ConfigError);
  }
}
