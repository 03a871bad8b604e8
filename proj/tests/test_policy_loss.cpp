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
#include <fstream>
#include <numbers>

#include "pseudo3d/error.hpp"
#include "pseudo3d/policy_loss.hpp"
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

Action random_target(Rng& rng) {
  Action a;
  for (double& x : a.xyz) x = rng.uniform(-1, 1);
  double n = 0.0;
  for (double& x : a.quat) {
    x = rng.uniform(0.1, 1.0);
    n += x * x;
  }
  for (double& x : a.quat) x /= std::sqrt(n);
  a.open = static_cast<double>(rng.below(2));
  return a;
}

Action random_pred(Rng& rng) {
  Action a;
  for (double& x : a.xyz) x = rng.uniform(-1, 1);
  for (double& x : a.quat) x = rng.uniform(-1, 1);
  a.open = rng.uniform();
  return a;
}

std::vector<Trajectory> random_dataset(Rng& rng, bool ragged) {
  std::vector<Trajectory> data(1 + rng.below(4));
  const std::size_t steps = 1 + rng.below(6);
  for (Trajectory& t : data) {
    const std::size_t n = ragged ? 1 + rng.below(6) : steps;
    for (std::size_t s = 0; s < n; ++s) t.push_back({random_pred(rng), random_target(rng)});
  }
  return data;
}

}  // namespace

TEST_SUITE("policy_loss") {
  TEST_CASE("perfect prediction") {
    Rng rng(81);
    for (int i = 0; i < 50; ++i) {
      const Action t = random_target(rng);
      const StepLoss l = step_loss(t, t);
      CHECK(l.mse_xyz == 0.0);
      CHECK(l.mse_quat == 0.0);
      CHECK(l.total <= 1e-5);
      CHECK(l.total >= 0.0);
    }
  }

  TEST_CASE("mean over components") {
    Action target;
    Action pred;
    pred.xyz = {0.3, 0.0, 0.0};
    CHECK(step_loss(pred, target).mse_xyz == 0.3 * 0.3 / 3.0);
    pred = target;
    pred.quat = {0.0, 0.0, 0.0, 0.0};
    CHECK(step_loss(pred, target).mse_quat == 0.25);
  }

  TEST_CASE("quaternion double cover is not folded") {
    Action target;
    Action pred;
    pred.quat = {-1.0, 0.0, 0.0, 0.0};
    CHECK(step_loss(pred, target).mse_quat == 1.0);
  }

  TEST_CASE("BCE at p = 0.5 and monotonicity") {
    for (double label : {0.0, 1.0}) {
      Action target;
      target.open = label;
      Action pred = target;
      pred.open = 0.5;
      CHECK(step_loss(pred, target).bce_open == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    }
    Action one;
    one.open = 1.0;
    Action zero;
    double prev_one = INFINITY, prev_zero = -INFINITY;
    for (int k = 0; k <= 100; ++k) {
      Action pred;
      pred.open = k / 100.0;
      const double l1 = step_loss(pred, one).bce_open;
      const double l0 = step_loss(pred, zero).bce_open;
      CHECK(l1 <= prev_one);
      CHECK(l0 >= prev_zero);
      CHECK(std::isfinite(l1));
      CHECK(std::isfinite(l0));
      prev_one = l1;
      prev_zero = l0;
    }
    Action sat;
    sat.open = 0.0;
    CHECK(step_loss(sat, one).bce_open == doctest::Approx(-std::log(1e-7)).epsilon(1e-12));
  }

  TEST_CASE("input validation") {
    Action t;
    Action p;
    p.open = 1.5;
    CHECK(code_of([&] { step_loss(p, t); }) == ErrorCode::InvalidAction);
    p.open = 0.5;
    Action bad_label = t;
    bad_label.open = 0.5;
    CHECK(code_of([&] { step_loss(p, bad_label); }) == ErrorCode::InvalidAction);
    Action bad_quat = t;
    bad_quat.quat = {1.0, 0.1, 0.0, 0.0};
    CHECK(code_of([&] { step_loss(p, bad_quat); }) == ErrorCode::InvalidAction);
    p.xyz[1] = NAN;
    CHECK(code_of([&] { step_loss(p, t); }) == ErrorCode::NonFiniteInput);
    CHECK(code_of([] { dataset_loss({}); }) == ErrorCode::EmptyDataset);
    const std::vector<Trajectory> empty(2);
    CHECK(code_of([&] { dataset_loss(empty); }) == ErrorCode::EmptyDataset);
  }

  TEST_CASE("dataset loss") {
    Rng rng(82);
    const Action p = random_pred(rng), t = random_target(rng);
    const std::vector<Trajectory> one{{{p, t}}};
    CHECK(dataset_loss(one) == step_loss(p, t).total);

    for (int i = 0; i < 40; ++i) {
      const auto data = random_dataset(rng, i % 2 == 1);
      const double l = dataset_loss(data);
      CHECK(std::abs(l - oracle::dataset_loss(data)) <= 1e-12);
      CHECK(l >= 0.0);

      auto doubled = data;
      doubled.insert(doubled.end(), data.begin(), data.end());
      CHECK(std::abs(dataset_loss(doubled) - l) <= 1e-12);

      auto shuffled = data;
      std::reverse(shuffled.begin(), shuffled.end());
      for (Trajectory& tr : shuffled) std::reverse(tr.begin(), tr.end());
      CHECK(std::abs(dataset_loss(shuffled) - l) <= 1e-12);
    }
  }

  TEST_CASE("ragged trajectories average over all steps") {
    Rng rng(83);
    const Action a = random_pred(rng), b = random_target(rng);
    const Action c = random_pred(rng), d = random_target(rng);
    const std::vector<Trajectory> data{{{a, b}}, {{c, d}, {c, b}}};
    const double expect = (step_loss(a, b).total + step_loss(c, d).total + step_loss(c, b).total) / 3.0;
    CHECK(std::abs(dataset_loss(data) - expect) <= 1e-15);
  }

  TEST_CASE("action CSV files") {
    test::ScratchDir dir;
    {
      std::ofstream(dir / "p.csv") << "x,y,z,qw,qx,qy,qz,open\n0.1,0,0,1,0,0,0,0.5\n0,0,0,1,0,0,0,1\n";
      std::ofstream(dir / "t.csv") << "0,0,0,1,0,0,0,1\n0,0,0,1,0,0,0,1\n";
      std::ofstream(dir / "short.csv") << "0,0,0,1,0,0,0,1\n";
      std::ofstream(dir / "bad.csv") << "0,0,0,1,0,0,0\n";
    }
    const auto actions = read_actions_csv(dir / "p.csv");
    REQUIRE(actions.size() == 2);
    CHECK(actions[0].xyz[0] == 0.1);
    CHECK(actions[0].open == 0.5);
    const Trajectory t = read_trajectory(dir / "p.csv", dir / "t.csv");
    CHECK(t.size() == 2);
    CHECK(code_of([&] { read_trajectory(dir / "p.csv", dir / "short.csv"); }) == ErrorCode::ShapeMismatch);
    CHECK(code_of([&] { read_actions_csv(dir / "bad.csv"); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { read_actions_csv(dir / "none.csv"); }) == ErrorCode::IoError);
  }
}
