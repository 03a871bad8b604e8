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

#include <filesystem>
#include <string_view>

#include "pseudo3d/depth_map.hpp"

namespace pseudo3d {

enum class DepthFormat { Pfm, Pgm, Csv };

/// Parses "pfm", "pgm" or "csv".
DepthFormat parse_depth_format(std::string_view name);

/// Linear map applied to raw 16-bit PGM samples: value = offset + scale * raw.
struct PgmMapping {
  double scale = 1.0;
  double offset = 0.0;
};

// Readers never guess the kind; the caller supplies it. Values are widened to
// double on load. Errors: IoError (open/short read), ParseError (malformed).

/// Single-channel "Pf" PFM. Endianness follows the sign of the header scale
/// (negative = little-endian); scanlines are stored bottom-to-top.
DepthMap read_pfm(const std::filesystem::path& path, DepthKind kind);

/// Binary "P5" PGM. maxval > 255 selects 16-bit big-endian samples.
DepthMap read_pgm(const std::filesystem::path& path, DepthKind kind, PgmMapping mapping = {});

/// Headerless CSV: one line per row, comma-separated values, equal row widths.
DepthMap read_csv(const std::filesystem::path& path, DepthKind kind);

DepthMap read_depth(const std::filesystem::path& path, DepthFormat format, DepthKind kind,
                    PgmMapping mapping = {});

enum class Endian { Little, Big };

void write_pfm(const DepthMap& d, const std::filesystem::path& path, Endian endian = Endian::Little);

/// Writes 16-bit samples raw = round((value - offset) / scale); values outside
/// [0, 65535] after mapping raise InvalidRange.
void write_pgm16(const DepthMap& d, const std::filesystem::path& path, PgmMapping mapping = {});

/// Shortest round-trip decimal representation of every value.
void write_csv(const DepthMap& d, const std::filesystem::path& path);

}  // namespace pseudo3d
