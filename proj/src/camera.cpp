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

#include "pseudo3d/camera.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "pseudo3d/error.hpp"
#include "pseudo3d/simd/kernels.hpp"

namespace pseudo3d {

void CameraIntrinsics::validate() const {
  const bool finite = std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) && std::isfinite(cy);
  if (!finite || !(fx > 0.0) || !(fy > 0.0)) {
    std::ostringstream os;
    os << "fx=" << fx << " fy=" << fy << " cx=" << cx << " cy=" << cy
       << " (focal lengths must be > 0, all values finite)";
    throw Error(ErrorCode::InvalidIntrinsics, os.str());
  }
}

PseudoPointCloud backproject(const DepthMap& depth, const CameraIntrinsics& k) {
  k.validate();
  if (depth.kind() != DepthKind::Inverted && depth.kind() != DepthKind::Metric) {
    throw Error(ErrorCode::WrongKind, "backproject expects an inverted or metric map, got " +
                                          std::string(to_string(depth.kind())));
  }
  const std::size_t w = depth.width();
  std::vector<double> xyz(3 * depth.size());
  const simd::KernelTable& kernels = simd::active();
  for (std::size_t v = 0; v < depth.height(); ++v) {
    const simd::PinholeRow row{k.fx, k.fy, k.cx, k.cy, static_cast<double>(v)};
    kernels.backproject_row(depth.row(v), row, std::span<double>(xyz).subspan(3 * v * w, 3 * w));
  }
  return PseudoPointCloud(w, depth.height(), std::move(xyz));
}

ProjectedGrid project(const PseudoPointCloud& cloud, const CameraIntrinsics& k) {
  k.validate();
  ProjectedGrid grid;
  grid.width = cloud.width();
  grid.height = cloud.height();
  grid.pixels.resize(cloud.size());
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3 p = cloud.point(i);
    if (!(p.z > 0.0)) {
      bad.push_back(i);
      continue;
    }
    grid.pixels[i] = {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy, p.z};
  }
  if (!bad.empty()) throw NonPositiveDepthError(std::move(bad), cloud.width());
  return grid;
}

CameraIntrinsics estimate_intrinsics_from_fov(double fov_x_deg, std::size_t width, std::size_t height,
                                              std::optional<double> fov_y_deg) {
  auto check_fov = [](double fov, const char* axis) {
    if (!(fov > 0.0 && fov < 180.0)) {
      throw Error(ErrorCode::InvalidFov, std::string(axis) + " = " + std::to_string(fov) +
                                             " degrees is outside (0, 180)");
    }
  };
  check_fov(fov_x_deg, "fov_x");
  if (fov_y_deg) check_fov(*fov_y_deg, "fov_y");
  if (width == 0 || height == 0) throw Error(ErrorCode::TooSmall, "image width and height must be >= 1");

  constexpr double kDegToRad = std::numbers::pi / 180.0;
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);
  CameraIntrinsics k;
  k.fx = (w / 2.0) / std::tan(fov_x_deg * kDegToRad / 2.0);
  k.fy = fov_y_deg ? (h / 2.0) / std::tan(*fov_y_deg * kDegToRad / 2.0) : k.fx;
  k.cx = (w - 1.0) / 2.0;
  k.cy = (h - 1.0) / 2.0;
  return k;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CameraIntrinsics parse_intrinsics_config(std::string_view text) {
  std::map<std::string, double, std::less<>> kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto sep = line.find_first_of("=:");
    if (sep == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, sep)));
    const std::string_view value = trim(line.substr(sep + 1));
    double parsed = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": bad number for '" + key + "'");
    }
    static constexpr std::string_view kKnown[] = {"fx", "fy", "cx", "cy", "fov_x_deg", "fov_y_deg", "width", "height"};
    bool known = false;
    for (auto k : kKnown) known = known || k == key;
    if (!known) throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!kv.emplace(key, parsed).second) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }

  const bool explicit_mode = kv.contains("fx");
  const bool fov_mode = kv.contains("fov_x_deg");
  if (explicit_mode && fov_mode) {
    throw Error(ErrorCode::ConfigError, "both fx and fov_x_deg given; choose explicit or FOV mode");
  }
  auto require = [&](const char* key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::ConfigError, std::string("missing key '") + key + "'");
    return it->second;
  };
  if (explicit_mode) {
    if (kv.contains("fov_y_deg")) throw Error(ErrorCode::ConfigError, "fov_y_deg is only valid in FOV mode");
    CameraIntrinsics k{require("fx"), require("fy"), require("cx"), require("cy")};
    k.validate();
    return k;
  }
  if (fov_mode) {
    for (const char* key : {"fx", "fy", "cx", "cy"}) {
      if (kv.contains(key)) throw Error(ErrorCode::ConfigError, std::string("'") + key + "' is only valid in explicit mode");
    }
    const double w = require("width");
    const double h = require("height");
    if (!(w >= 1.0 && h >= 1.0) || w != std::floor(w) || h != std::floor(h)) {
      throw Error(ErrorCode::ConfigError, "width and height must be positive integers");
    }
    std::optional<double> fov_y;
    if (const auto it = kv.find("fov_y_deg"); it != kv.end()) fov_y = it->second;
    return estimate_intrinsics_from_fov(require("fov_x_deg"), static_cast<std::size_t>(w),
                                        static_cast<std::size_t>(h), fov_y);
  }
  throw Error(ErrorCode::ConfigError, "intrinsics need either fx/fy/cx/cy or fov_x_deg with width/height");
}

CameraIntrinsics load_intrinsics_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open intrinsics file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_intrinsics_config(buffer.str());
}

}  // namespace pseudo3d
