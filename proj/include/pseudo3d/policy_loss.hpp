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

#include <array>
#include <filesystem>
#include <span>
#include <vector>

namespace pseudo3d {

/// One end-effector action. For predictions `open` is a probability in
/// [0, 1]; for targets it is a label that must be exactly 0 or 1 and the
/// quaternion must be unit length within 1e-6.
struct Action {
  std::array<double, 3> xyz{};
  std::array<double, 4> quat{1.0, 0.0, 0.0, 0.0};  // w, x, y, z
  double open = 0.0;
};

struct ActionPair {
  Action predicted;
  Action target;
};

using Trajectory = std::vector<ActionPair>;

struct StepLoss {
  double mse_xyz = 0.0;
  double mse_quat = 0.0;
  double bce_open = 0.0;
  double total = 0.0;
};

inline constexpr double kBceEpsilon = 1e-7;

/// MSE (mean over components) on position and quaternion plus BCE on the
/// gripper state, with the predicted probability clamped to [eps, 1 - eps].
StepLoss step_loss(const Action& predicted, const Action& target);

/// Sum of step totals divided by the total step count (N * T when every
/// trajectory has T steps). EmptyDataset when there are no steps.
double dataset_loss(std::span<const Trajectory> trajectories);

/// Reads x,y,z,qw,qx,qy,qz,open rows; a header line naming those columns is optional.
std::vector<Action> read_actions_csv(const std::filesystem::path& path);

/// Pairs row-aligned prediction and target files into one trajectory.
Trajectory read_trajectory(const std::filesystem::path& predicted, const std::filesystem::path& target);

}  // namespace pseudo3d
