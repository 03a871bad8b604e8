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

#include "pseudo3d/ply.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "pseudo3d/error.hpp"

namespace pseudo3d {
namespace {

void put_f32le(std::vector<unsigned char>& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFFu));
}

struct Property {
  std::string name;
  std::size_t size = 0;
  enum class Type { I8, U8, I16, U16, I32, U32, F32, F64 } type = Type::F32;
};

bool parse_type(const std::string& t, Property& p) {
  using T = Property::Type;
  struct Entry {
    const char* a;
    const char* b;
    T type;
    std::size_t size;
  };
  static constexpr Entry kTypes[] = {
      {"char", "int8", T::I8, 1},     {"uchar", "uint8", T::U8, 1},  {"short", "int16", T::I16, 2},
      {"ushort", "uint16", T::U16, 2}, {"int", "int32", T::I32, 4},   {"uint", "uint32", T::U32, 4},
      {"float", "float32", T::F32, 4}, {"double", "float64", T::F64, 8},
  };
  for (const Entry& e : kTypes) {
    if (t == e.a || t == e.b) {
      p.type = e.type;
      p.size = e.size;
      return true;
    }
  }
  return false;
}

double read_scalar(const unsigned char* p, Property::Type type) {
  std::uint64_t bits = 0;
  using T = Property::Type;
  const std::size_t n = type == T::I8 || type == T::U8 ? 1 : type == T::I16 || type == T::U16 ? 2 : type == T::F64 ? 8 : 4;
  for (std::size_t i = 0; i < n; ++i) bits |= std::uint64_t{p[i]} << (8 * i);
  switch (type) {
    case T::I8: return static_cast<std::int8_t>(bits);
    case T::U8: return static_cast<std::uint8_t>(bits);
    case T::I16: return static_cast<std::int16_t>(bits);
    case T::U16: return static_cast<std::uint16_t>(bits);
    case T::I32: return static_cast<std::int32_t>(bits);
    case T::U32: return static_cast<std::uint32_t>(bits);
    case T::F32: return std::bit_cast<float>(static_cast<std::uint32_t>(bits));
    case T::F64: return std::bit_cast<double>(bits);
  }
  return 0.0;
}

}  // namespace

void export_ply(const PseudoPointCloud& cloud, const std::filesystem::path& path) {
  std::ostringstream header;
  header << "ply\n"
         << "format binary_little_endian 1.0\n"
         << "comment grid " << cloud.width() << ' ' << cloud.height() << '\n'
         << "element vertex " << cloud.size() << '\n'
         << "property float x\n"
         << "property float y\n"
         << "property float z\n";
  if (cloud.has_colors()) {
    header << "property uchar red\n"
           << "property uchar green\n"
           << "property uchar blue\n";
  }
  header << "end_header\n";

  std::vector<unsigned char> body;
  body.reserve(cloud.size() * (cloud.has_colors() ? 15 : 12));
  const auto colors = cloud.colors();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3 p = cloud.point(i);
    put_f32le(body, static_cast<float>(p.x));
    put_f32le(body, static_cast<float>(p.y));
    put_f32le(body, static_cast<float>(p.z));
    if (cloud.has_colors()) {
      body.push_back(colors[i].r);
      body.push_back(colors[i].g);
      body.push_back(colors[i].b);
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

PseudoPointCloud import_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) { return Error(ErrorCode::ParseError, path.string() + ": " + why); };

  static constexpr std::string_view kEnd = "end_header\n";
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const std::size_t end = text.find(kEnd);
  if (end == std::string_view::npos) throw fail("missing end_header");
  std::istringstream header{std::string(text.substr(0, end))};

  std::string line;
  std::getline(header, line);
  if (line != "ply") throw fail("missing ply magic");

  std::size_t count = 0;
  std::size_t grid_w = 0;
  std::size_t grid_h = 0;
  bool in_vertex = false;
  bool seen_vertex = false;
  bool format_ok = false;
  std::vector<Property> props;
  while (std::getline(header, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt != "binary_little_endian") throw fail("only binary_little_endian PLY is supported");
      format_ok = true;
    } else if (word == "comment") {
      std::string tag;
      ls >> tag;
      if (tag == "grid") ls >> grid_w >> grid_h;
    } else if (word == "element") {
      std::string name;
      ls >> name;
      if (name == "vertex") {
        if (seen_vertex) throw fail("duplicate vertex element");
        ls >> count;
        in_vertex = seen_vertex = true;
      } else {
        if (!seen_vertex) throw fail("vertex must be the first element");
        in_vertex = false;
      }
    } else if (word == "property") {
      if (!in_vertex) continue;
      std::string type;
      ls >> type;
      if (type == "list") throw fail("list properties are not supported on vertices");
      Property p;
      if (!parse_type(type, p)) throw fail("unknown property type '" + type + "'");
      ls >> p.name;
      props.push_back(p);
    } else if (!word.empty() && word != "obj_info") {
      throw fail("unexpected header line '" + line + "'");
    }
  }
  if (!format_ok) throw fail("missing format line");
  if (!seen_vertex) throw fail("missing vertex element");

  std::size_t stride = 0;
  long offsets[6] = {-1, -1, -1, -1, -1, -1};
  Property::Type types[6] = {};
  static constexpr std::string_view kNames[6] = {"x", "y", "z", "red", "green", "blue"};
  for (const Property& p : props) {
    for (int k = 0; k < 6; ++k) {
      if (p.name == kNames[k]) {
        offsets[k] = static_cast<long>(stride);
        types[k] = p.type;
      }
    }
    stride += p.size;
  }
  if (offsets[0] < 0 || offsets[1] < 0 || offsets[2] < 0) throw fail("vertex lacks x, y, z");
  const bool has_rgb = offsets[3] >= 0 && offsets[4] >= 0 && offsets[5] >= 0;
  for (int k = 3; k < 6 && has_rgb; ++k) {
    if (types[k] != Property::Type::U8) throw fail("colors must be uchar");
  }

  const std::size_t body = end + kEnd.size();
  if (bytes.size() - body < count * stride) {
    throw Error(ErrorCode::IoError, path.string() + ": truncated vertex data");
  }
  if (grid_w == 0 || grid_h == 0 || grid_w * grid_h != count) {
    grid_w = count;
    grid_h = 1;
  }
  if (count == 0) throw fail("empty vertex element");

  std::vector<double> xyz(3 * count);
  std::vector<Rgb8> colors;
  if (has_rgb) colors.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* rec = bytes.data() + body + i * stride;
    for (int k = 0; k < 3; ++k) xyz[3 * i + static_cast<std::size_t>(k)] = read_scalar(rec + offsets[k], types[k]);
    if (has_rgb) colors[i] = {rec[offsets[3]], rec[offsets[4]], rec[offsets[5]]};
  }
  if (has_rgb) return PseudoPointCloud(grid_w, grid_h, std::move(xyz), std::move(colors));
  return PseudoPointCloud(grid_w, grid_h, std::move(xyz));
}

}  // namespace pseudo3d
