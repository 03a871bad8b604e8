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

#include "pseudo3d/policy_loss.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "pseudo3d/error.hpp"

namespace pseudo3d {
namespace {

void check_finite(const Action& a, const char* role) {
  bool ok = std::isfinite(a.open);
  for (double x : a.xyz) ok = ok && std::isfinite(x);
  for (double x : a.quat) ok = ok && std::isfinite(x);
  if (!ok) throw Error(ErrorCode::NonFiniteInput, std::string(role) + " action contains NaN or Inf");
}

template <std::size_t N>
double mse(const std::array<double, N>& a, const std::array<double, N>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(N);
}

}  // namespace

StepLoss step_loss(const Action& predicted, const Action& target) {
  check_finite(predicted, "predicted");
  check_finite(target, "target");
  if (predicted.open < 0.0 || predicted.open > 1.0) {
    throw Error(ErrorCode::InvalidAction, "predicted open probability must lie in [0, 1]");
  }
  if (target.open != 0.0 && target.open != 1.0) {
    throw Error(ErrorCode::InvalidAction, "target open label must be exactly 0 or 1");
  }
  double norm2 = 0.0;
  for (double x : target.quat) norm2 += x * x;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6) {
    throw Error(ErrorCode::InvalidAction, "target quaternion is not unit length");
  }

  StepLoss loss;
  loss.mse_xyz = mse(predicted.xyz, target.xyz);
  loss.mse_quat = mse(predicted.quat, target.quat);
  const double p = std::clamp(predicted.open, kBceEpsilon, 1.0 - kBceEpsilon);
  const double y = target.open;
  loss.bce_open = -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  loss.total = loss.mse_xyz + loss.mse_quat + loss.bce_open;
  return loss;
}

double dataset_loss(std::span<const Trajectory> trajectories) {
  double sum = 0.0;
  std::size_t steps = 0;
  for (const Trajectory& traj : trajectories) {
    for (const ActionPair& pair : traj) {
      sum += step_loss(pair.predicted, pair.target).total;
      ++steps;
    }
  }
  if (steps == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no steps");
  return sum / static_cast<double>(steps);
}

std::vector<Action> read_actions_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<Action> actions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const auto b = field.find_first_not_of(" \t");
      const auto e = field.find_last_not_of(" \t");
      fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (fields.size() != 8) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected 8 columns, got " +
                                             std::to_string(fields.size()));
    }
    if (actions.empty() && line_no == 1 && fields[0] == "x") {
      static constexpr const char* kHeader[] = {"x", "y", "z", "qw", "qx", "qy", "qz", "open"};
      for (std::size_t i = 0; i < 8; ++i) {
        if (fields[i] != kHeader[i]) {
          throw Error(ErrorCode::ParseError, path.string() + ": header must be x,y,z,qw,qx,qy,qz,open");
        }
      }
      continue;
    }
    double v[8];
    for (std::size_t i = 0; i < 8; ++i) {
      const std::string& f = fields[i];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v[i]);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": bad value '" + f + "'");
      }
    }
    actions.push_back(Action{{v[0], v[1], v[2]}, {v[3], v[4], v[5], v[6]}, v[7]});
  }
  return actions;
}

Trajectory read_trajectory(const std::filesystem::path& predicted, const std::filesystem::path& target) {
  const std::vector<Action> pred = read_actions_csv(predicted);
  const std::vector<Action> tgt = read_actions_csv(target);
  if (pred.size() != tgt.size()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction file has " + std::to_string(pred.size()) +
                                              " rows, target file has " + std::to_string(tgt.size()));
  }
  Trajectory traj;
  traj.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) traj.push_back({pred[i], tgt[i]});
  return traj;
}

}  // namespace pseudo3d
