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

#include "pseudo3d/depth_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "pseudo3d/error.hpp"

namespace pseudo3d {

DepthFormat parse_depth_format(std::string_view name) {
  if (name == "pfm") return DepthFormat::Pfm;
  if (name == "pgm") return DepthFormat::Pgm;
  if (name == "csv") return DepthFormat::Csv;
  throw Error(ErrorCode::ConfigError, "unknown depth format '" + std::string(name) + "'");
}

namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed: " + path.string());
  return bytes;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

// Whitespace-separated header tokens with '#' comments, as used by PNM and PFM.
class HeaderCursor {
 public:
  HeaderCursor(const std::vector<unsigned char>& bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  std::string token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) ++pos_;
    if (start == pos_) fail("truncated header");
    return std::string(bytes_.begin() + static_cast<std::ptrdiff_t>(start),
                       bytes_.begin() + static_cast<std::ptrdiff_t>(pos_));
  }

  template <typename T>
  T number(const char* what) {
    const std::string tok = token();
    T value{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) fail(std::string("bad ") + what + " '" + tok + "'");
    return value;
  }

  // The raster starts after exactly one whitespace byte following the last field.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) fail("missing separator before raster");
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::ParseError, path_.string() + ": " + why);
  }

 private:
  static bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

std::uint32_t load_u32(const unsigned char* p, bool big_endian) {
  if (big_endian) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  }
  return (std::uint32_t{p[3]} << 24) | (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[1]} << 8) | std::uint32_t{p[0]};
}

void store_u32(unsigned char* p, std::uint32_t x, bool big_endian) {
  for (int i = 0; i < 4; ++i) {
    const int shift = big_endian ? 24 - 8 * i : 8 * i;
    p[i] = static_cast<unsigned char>((x >> shift) & 0xFFu);
  }
}

void check_dims(long long w, long long h, HeaderCursor& hc) {
  if (w <= 0 || h <= 0) hc.fail("non-positive dimensions");
  if (w > (1 << 20) || h > (1 << 20)) hc.fail("dimensions too large");
}

}  // namespace

DepthMap read_pfm(const std::filesystem::path& path, DepthKind kind) {
  const std::vector<unsigned char> bytes = slurp(path);
  HeaderCursor hc(bytes, path);
  const std::string magic = hc.token();
  if (magic == "PF") hc.fail("3-channel PF files are not depth maps; expected Pf");
  if (magic != "Pf") hc.fail("not a PFM file (magic '" + magic + "')");
  const auto w = hc.number<long long>("width");
  const auto h = hc.number<long long>("height");
  check_dims(w, h, hc);
  const auto scale = hc.number<double>("scale");
  if (scale == 0.0 || !std::isfinite(scale)) hc.fail("scale must be finite and non-zero");
  const bool big_endian = scale > 0.0;
  const std::size_t offset = hc.raster_offset();
  const auto width = static_cast<std::size_t>(w);
  const auto height = static_cast<std::size_t>(h);
  const std::size_t need = width * height * 4;
  if (bytes.size() - offset < need) {
    throw Error(ErrorCode::IoError, path.string() + ": truncated raster (" +
                                        std::to_string(bytes.size() - offset) + " of " +
                                        std::to_string(need) + " bytes)");
  }
  std::vector<double> values(width * height);
  const unsigned char* raster = bytes.data() + offset;
  for (std::size_t row = 0; row < height; ++row) {
    // File row 0 is the bottom scanline.
    const std::size_t v = height - 1 - row;
    for (std::size_t u = 0; u < width; ++u) {
      const std::uint32_t bits = load_u32(raster + 4 * (row * width + u), big_endian);
      values[v * width + u] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return DepthMap(width, height, std::move(values), kind);
}

DepthMap read_pgm(const std::filesystem::path& path, DepthKind kind, PgmMapping mapping) {
  const std::vector<unsigned char> bytes = slurp(path);
  HeaderCursor hc(bytes, path);
  const std::string magic = hc.token();
  if (magic != "P5") hc.fail("not a binary PGM file (magic '" + magic + "')");
  const auto w = hc.number<long long>("width");
  const auto h = hc.number<long long>("height");
  check_dims(w, h, hc);
  const auto maxval = hc.number<long>("maxval");
  if (maxval <= 0 || maxval > 65535) hc.fail("maxval out of range");
  const std::size_t offset = hc.raster_offset();
  const auto width = static_cast<std::size_t>(w);
  const auto height = static_cast<std::size_t>(h);
  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t need = width * height * bps;
  if (bytes.size() - offset < need) {
    throw Error(ErrorCode::IoError, path.string() + ": truncated raster");
  }
  std::vector<double> values(width * height);
  const unsigned char* raster = bytes.data() + offset;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const unsigned raw = bps == 2 ? (unsigned{raster[2 * i]} << 8) | unsigned{raster[2 * i + 1]} : unsigned{raster[i]};
    if (raw > static_cast<unsigned>(maxval)) hc.fail("sample exceeds maxval");
    values[i] = mapping.offset + mapping.scale * static_cast<double>(raw);
  }
  return DepthMap(width, height, std::move(values), kind);
}

DepthMap read_csv(const std::filesystem::path& path, DepthKind kind) {
  const std::vector<unsigned char> bytes = slurp(path);
  const std::string text(bytes.begin(), bytes.end());
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> void {
    throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::size_t count = 0;
    std::size_t field_start = 0;
    while (field_start <= line.size()) {
      std::size_t comma = line.find(',', field_start);
      if (comma == std::string_view::npos) comma = line.size();
      std::string_view field = line.substr(field_start, comma - field_start);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        fail("bad value '" + std::string(field) + "'");
      }
      values.push_back(value);
      ++count;
      field_start = comma + 1;
    }
    if (height == 0) {
      width = count;
    } else if (count != width) {
      fail("row has " + std::to_string(count) + " values, expected " + std::to_string(width));
    }
    ++height;
  }
  if (height == 0) throw Error(ErrorCode::ParseError, path.string() + ": empty CSV");
  return DepthMap(width, height, std::move(values), kind);
}

DepthMap read_depth(const std::filesystem::path& path, DepthFormat format, DepthKind kind, PgmMapping mapping) {
  switch (format) {
    case DepthFormat::Pfm: return read_pfm(path, kind);
    case DepthFormat::Pgm: return read_pgm(path, kind, mapping);
    case DepthFormat::Csv: return read_csv(path, kind);
  }
  throw Error(ErrorCode::ConfigError, "unknown depth format");
}

void write_pfm(const DepthMap& d, const std::filesystem::path& path, Endian endian) {
  std::ofstream out = open_out(path);
  const bool big = endian == Endian::Big;
  out << "Pf\n" << d.width() << ' ' << d.height() << '\n' << (big ? "1.0" : "-1.0") << '\n';
  std::vector<unsigned char> row(4 * d.width());
  for (std::size_t r = 0; r < d.height(); ++r) {
    const std::size_t v = d.height() - 1 - r;
    for (std::size_t u = 0; u < d.width(); ++u) {
      store_u32(row.data() + 4 * u, std::bit_cast<std::uint32_t>(static_cast<float>(d.at(v, u))), big);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  finish(out, path);
}

void write_pgm16(const DepthMap& d, const std::filesystem::path& path, PgmMapping mapping) {
  if (mapping.scale == 0.0) throw Error(ErrorCode::ZeroScale, "PGM mapping scale must be non-zero");
  std::vector<unsigned char> raster(2 * d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double raw = std::round((d[i] - mapping.offset) / mapping.scale);
    if (!(raw >= 0.0 && raw <= 65535.0)) {
      throw Error(ErrorCode::InvalidRange, "value " + std::to_string(d[i]) + " does not fit a 16-bit sample");
    }
    const auto s = static_cast<std::uint16_t>(raw);
    raster[2 * i] = static_cast<unsigned char>(s >> 8);
    raster[2 * i + 1] = static_cast<unsigned char>(s & 0xFFu);
  }
  std::ofstream out = open_out(path);
  out << "P5\n" << d.width() << ' ' << d.height() << "\n65535\n";
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  finish(out, path);
}

void write_csv(const DepthMap& d, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  char buf[32];
  for (std::size_t v = 0; v < d.height(); ++v) {
    for (std::size_t u = 0; u < d.width(); ++u) {
      if (u) out << ',';
      const auto res = std::to_chars(buf, buf + sizeof(buf), d.at(v, u));
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  finish(out, path);
}

}  // namespace pseudo3d
