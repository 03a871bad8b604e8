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

#include "pseudo3d/verify.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "pseudo3d/camera.hpp"
#include "pseudo3d/depth_io.hpp"
#include "pseudo3d/depth_map.hpp"
#include "pseudo3d/encoder.hpp"
#include "pseudo3d/error.hpp"
#include "pseudo3d/fusion.hpp"
#include "pseudo3d/ply.hpp"
#include "pseudo3d/policy_loss.hpp"
#include "pseudo3d/rng.hpp"
#include "pseudo3d/simd/kernels.hpp"
#include "pseudo3d/synthetic.hpp"
#include "pseudo3d/testing/oracles.hpp"

namespace pseudo3d {

void PropertyResult::add(std::string key, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", value);
  add(std::move(key), std::string(buf));
}

void PropertyResult::add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }

bool VerifyReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.pass; });
}

std::string VerifyReport::to_text() const {
  std::ostringstream os;
  for (const PropertyResult& r : results) {
    os << "property=" << r.name << " status=" << (r.pass ? "pass" : "fail");
    for (const auto& [k, v] : r.details) os << ' ' << k << '=' << v;
    os << '\n';
  }
  os << "summary=" << (all_pass() ? "pass" : "fail") << '\n';
  return os.str();
}

namespace {

DepthMap random_metric(Rng& rng, std::size_t min_side, std::size_t max_side, double lo, double hi) {
  const std::size_t w = min_side + rng.below(max_side - min_side + 1);
  const std::size_t h = min_side + rng.below(max_side - min_side + 1);
  std::vector<double> values(w * h);
  for (double& v : values) v = rng.uniform(lo, hi);
  return DepthMap(w, h, std::move(values), DepthKind::Metric);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double distance(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

FeatureMap random_features(Rng& rng, std::size_t h, std::size_t w, std::size_t c) {
  std::vector<double> values(h * w * c);
  for (double& v : values) v = rng.uniform(-1.0, 1.0);
  return FeatureMap(h, w, c, std::move(values));
}

double inner(const FeatureMap& a, const FeatureMap& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

}  // namespace

PropertyResult check_affine_invariance(std::uint64_t seed, bool break_shift) {
  PropertyResult r{"affine", false, {}};
  Rng rng(derive_seed(seed, 1));
  constexpr std::size_t kScenes = 50;
  constexpr double kScales[] = {0.1, 1.0, 10.0};
  constexpr double kShifts[] = {-5.0, 0.0, 5.0};
  double max_dev = 0.0;
  double reflect_dev = 0.0;
  double oracle_dev = 0.0;
  for (std::size_t scene = 0; scene < kScenes; ++scene) {
    const DepthMap gt = random_metric(rng, 4, 24, 0.5, 20.0);
    const DepthMap reference = normalize(disparity_from_metric(gt, 1.0, 0.0));
    for (double s : kScales) {
      for (double t : kShifts) {
        std::vector<double> candidate;
        if (break_shift) {
          const DepthMap unshifted = normalize(disparity_from_metric(gt, s, 0.0));
          candidate.assign(unshifted.values().begin(), unshifted.values().end());
          for (double& x : candidate) x += t;
        } else {
          const DepthMap shifted = disparity_from_metric(gt, s, t);
          const DepthMap n = normalize(shifted);
          candidate.assign(n.values().begin(), n.values().end());
          oracle_dev = std::max(oracle_dev, max_abs_diff(candidate, oracle::normalize(shifted.values())));
        }
        max_dev = std::max(max_dev, max_abs_diff(candidate, reference.values()));

        const DepthMap reflected = pipeline_relative_to_dr(disparity_from_metric(gt, -s, t));
        const DepthMap positive = normalize(disparity_from_metric(gt, s, t));
        reflect_dev = std::max(reflect_dev, max_abs_diff(reflected.values(), positive.values()));
      }
    }
  }
  r.pass = max_dev <= 1e-9 && reflect_dev <= 1e-9 && oracle_dev <= 1e-15;
  r.add("scenes", kScenes);
  r.add("max_dev", max_dev);
  r.add("reflection_dev", reflect_dev);
  r.add("oracle_dev", oracle_dev);
  r.add("tol", 1e-9);
  if (break_shift) r.add("fault", "break-shift");
  return r;
}

PropertyResult check_shift_distortion(std::uint64_t seed) {
  PropertyResult r{"shift", false, {}};
  Rng rng(derive_seed(seed, 2));
  constexpr std::size_t kW = 32;
  constexpr std::size_t kH = 8;
  const CameraIntrinsics k{20.0, 20.0, (kW - 1) / 2.0, (kH - 1) / 2.0};
  const double z_near = rng.uniform(0.5, 1.5);
  const double z_far = z_near + rng.uniform(1.0, 3.0);
  const SyntheticScene wedge = synth_wedge(k, kW, kH, z_near, z_far);

  const PseudoPointCloud naive = backproject(naive_reciprocal(disparity_from_metric(wedge.depth, 1.0, 2.0)), k);

  // Horizontal gaps along the middle row, each relative to the first one.
  const std::size_t v = kH / 2;
  auto ratios = [&](const PseudoPointCloud& c) {
    std::vector<double> out;
    const double first = distance(c.at(v, 0), c.at(v, 1));
    for (std::size_t u = 1; u + 1 < kW; ++u) out.push_back(distance(c.at(v, u), c.at(v, u + 1)) / first);
    return out;
  };
  const std::vector<double> truth = ratios(wedge.cloud);
  const std::vector<double> bent = ratios(naive);
  double distortion = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) distortion = std::max(distortion, std::abs(bent[i] - truth[i]) / truth[i]);

  const PseudoPointCloud shifted = backproject(pipeline_relative_to_dr(disparity_from_metric(wedge.depth, 1.0, 2.0)), k);
  const PseudoPointCloud unshifted = backproject(pipeline_relative_to_dr(disparity_from_metric(wedge.depth, 1.0, 0.0)), k);
  const double pipeline_dev = max_abs_diff(shifted.xyz(), unshifted.xyz());

  r.pass = distortion > 1e-3 && pipeline_dev <= 1e-9;
  r.add("naive_ratio_change", distortion);
  r.add("naive_min_change", 1e-3);
  r.add("pipeline_dev", pipeline_dev);
  r.add("tol", 1e-9);
  return r;
}

PropertyResult check_roundtrip(std::uint64_t seed) {
  PropertyResult r{"roundtrip", false, {}};
  Rng rng(derive_seed(seed, 3));
  constexpr std::size_t kPairs = 100;
  double max_pix = 0.0;
  double max_depth = 0.0;
  for (std::size_t n = 0; n < kPairs; ++n) {
    const DepthMap d = random_metric(rng, 1, 24, 0.05, 50.0);
    const CameraIntrinsics k{rng.uniform(100.0, 2000.0), rng.uniform(100.0, 2000.0),
                             rng.uniform(-10.0, static_cast<double>(d.width()) + 10.0),
                             rng.uniform(-10.0, static_cast<double>(d.height()) + 10.0)};
    const ProjectedGrid grid = project(backproject(d, k), k);
    for (std::size_t v = 0; v < d.height(); ++v) {
      for (std::size_t u = 0; u < d.width(); ++u) {
        const PixelDepth& p = grid.at(v, u);
        max_pix = std::max({max_pix, std::abs(p.u - static_cast<double>(u)), std::abs(p.v - static_cast<double>(v))});
        max_depth = std::max(max_depth, std::abs(p.depth - d.at(v, u)));
      }
    }
  }
  r.pass = max_pix <= 1e-9 && max_depth <= 1e-9;
  r.add("pairs", kPairs);
  r.add("max_pixel_err", max_pix);
  r.add("max_depth_err", max_depth);
  r.add("tol", 1e-9);
  return r;
}

PropertyResult check_scale_and_grid(std::uint64_t seed) {
  PropertyResult r{"scale", false, {}};
  Rng rng(derive_seed(seed, 4));
  constexpr std::size_t kMaps = 20;
  double max_dev = 0.0;
  std::size_t misplaced = 0;
  for (std::size_t n = 0; n < kMaps; ++n) {
    const DepthMap d = random_metric(rng, 2, 20, 0.1, 10.0);
    const CameraIntrinsics k{rng.uniform(100.0, 2000.0), rng.uniform(100.0, 2000.0),
                             static_cast<double>(d.width()) / 2.0, static_cast<double>(d.height()) / 2.0};
    const PseudoPointCloud base = backproject(d, k);
    for (double alpha : {0.5, 2.0}) {
      const PseudoPointCloud scaled_cloud = backproject(scaled(d, alpha), k);
      for (std::size_t i = 0; i < base.xyz().size(); ++i) {
        max_dev = std::max(max_dev, std::abs(scaled_cloud.xyz()[i] - alpha * base.xyz()[i]));
      }
    }
    const ProjectedGrid grid = project(base, k);
    for (std::size_t v = 0; v < d.height(); ++v) {
      for (std::size_t u = 0; u < d.width(); ++u) {
        const PixelDepth& p = grid.at(v, u);
        const bool home = std::abs(p.u - static_cast<double>(u)) <= 1e-9 &&
                          std::abs(p.v - static_cast<double>(v)) <= 1e-9 && base.at(v, u).z == d.at(v, u);
        if (!home) ++misplaced;
      }
    }
  }
  r.pass = max_dev <= 1e-12 && misplaced == 0;
  r.add("maps", kMaps);
  r.add("max_dev", max_dev);
  r.add("tol", 1e-12);
  r.add("misplaced", misplaced);
  return r;
}

PropertyResult check_gradients(std::uint64_t seed) {
  PropertyResult r{"gradcheck", false, {}};
  Rng rng(derive_seed(seed, 5));
  constexpr double kStep = 1e-4;
  constexpr double kTol = 1e-4;
  constexpr double kFloor = 1e-6;
  constexpr std::size_t kWanted = 128;
  constexpr std::size_t kInputWanted = 32;

  const FeatureMap input = random_features(rng, 8, 8, 3);
  EncoderParams params = init_params(rng.next());
  for (double& b : params.conv1.bias) b = rng.uniform(-0.1, 0.1);
  for (double& b : params.conv2.bias) b = rng.uniform(-0.1, 0.1);
  const FeatureMap upstream = random_features(rng, 2, 2, params.out_channels());
  const EncoderGradients grads = encode_backward(input, params, upstream);

  auto rel_err = [](double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), kFloor}); };
  auto relu_mask = [](const FeatureMap& pre) {
    std::vector<bool> m(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) m[i] = pre.data()[i] > 0.0;
    return m;
  };

  // Central differences are only valid when no ReLU switches between x - h and x + h.
  std::size_t accepted = 0;
  std::size_t skipped = 0;
  double worst = 0.0;
  for (std::size_t attempt = 0; attempt < 4000 && accepted < kWanted; ++attempt) {
    const std::size_t idx = rng.below(params.parameter_count());
    EncoderParams probe = params;
    const double x0 = params.parameter(idx);
    probe.parameter(idx) = x0 + kStep;
    const auto mask_hi = relu_mask(oracle::encode(input, probe).pre_activation);
    probe.parameter(idx) = x0 - kStep;
    const auto mask_lo = relu_mask(oracle::encode(input, probe).pre_activation);
    if (mask_hi != mask_lo) {
      ++skipped;
      continue;
    }
    const double numeric = oracle::central_difference(
        [&](double x) {
          probe.parameter(idx) = x;
          return inner(upstream, encode(input, probe));
        },
        x0, kStep);
    worst = std::max(worst, rel_err(grads.params.parameter(idx), numeric));
    ++accepted;
  }

  std::size_t input_accepted = 0;
  double input_worst = 0.0;
  for (std::size_t attempt = 0; attempt < 1000 && input_accepted < kInputWanted; ++attempt) {
    const std::size_t idx = rng.below(input.size());
    FeatureMap probe = input;
    const double x0 = input.data()[idx];
    probe.data()[idx] = x0 + kStep;
    const auto mask_hi = relu_mask(oracle::encode(probe, params).pre_activation);
    probe.data()[idx] = x0 - kStep;
    const auto mask_lo = relu_mask(oracle::encode(probe, params).pre_activation);
    if (mask_hi != mask_lo) continue;
    const double numeric = oracle::central_difference(
        [&](double x) {
          probe.data()[idx] = x;
          return inner(upstream, encode(probe, params));
        },
        x0, kStep);
    input_worst = std::max(input_worst, rel_err(grads.input.data()[idx], numeric));
    ++input_accepted;
  }

  r.pass = accepted >= 100 && worst <= kTol && input_accepted == kInputWanted && input_worst <= kTol;
  r.add("param_coords", accepted);
  r.add("kink_skipped", skipped);
  r.add("max_rel_err", worst);
  r.add("input_coords", input_accepted);
  r.add("input_max_rel_err", input_worst);
  r.add("h", kStep);
  r.add("tol", kTol);
  return r;
}

PropertyResult check_fusion(std::uint64_t seed) {
  PropertyResult r{"fusion", false, {}};
  Rng rng(derive_seed(seed, 6));
  constexpr std::size_t kH = 3, kW = 4, kC = 8;
  const FeatureMap f2d = random_features(rng, kH, kW, kC);
  const FeatureMap f3d = random_features(rng, kH, kW, kC);

  // [I | I] projection reproduces addition.
  FusionParams concat = init_fusion_params(FusionStrategy::Concat, kC, kDefaultHeads, rng.next());
  std::fill(concat.projection.weight.begin(), concat.projection.weight.end(), 0.0);
  std::fill(concat.projection.bias.begin(), concat.projection.bias.end(), 0.0);
  for (std::size_t o = 0; o < kC; ++o) {
    concat.projection.weight[o * 2 * kC + o] = 1.0;
    concat.projection.weight[o * 2 * kC + kC + o] = 1.0;
  }
  const FeatureMap added = fuse_add(f2d, f3d);
  const double hierarchy_dev = max_abs_diff(fuse_concat(f2d, f3d, concat).data(), added.data());

  // A random projection against the per-position matrix-vector oracle.
  const FusionParams concat_rand = init_fusion_params(FusionStrategy::Concat, kC, kDefaultHeads, rng.next());
  const double concat_dev =
      max_abs_diff(fuse_concat(f2d, f3d, concat_rand).data(), oracle::concat_project(f2d, f3d, concat_rand.projection).data());

  // Perturb f3d at a single position. The offsets differ per channel so layer
  // norm cannot cancel them.
  const std::size_t target = rng.below(kH * kW);
  FeatureMap bumped = f3d;
  for (double& x : bumped.position(target)) x += rng.uniform(0.5, 1.5);
  auto changed_positions = [&](const FeatureMap& a, const FeatureMap& b) {
    std::vector<std::size_t> changed;
    for (std::size_t p = 0; p < a.positions(); ++p) {
      if (!std::equal(a.position(p).begin(), a.position(p).end(), b.position(p).begin())) changed.push_back(p);
    }
    return changed;
  };
  const auto add_changed = changed_positions(added, fuse_add(f2d, bumped));
  const bool add_local = add_changed.size() == 1 && add_changed[0] == target;

  const FusionParams xattn = init_fusion_params(FusionStrategy::CrossAttention, kC, kDefaultHeads, rng.next());
  const FusionParams sattn = init_fusion_params(FusionStrategy::SelfAttention, kC, kDefaultHeads, rng.next());
  const auto x_changed = changed_positions(fuse_cross_attention(f2d, f3d, xattn), fuse_cross_attention(f2d, bumped, xattn));
  const auto s_changed = changed_positions(fuse_self_attention(f2d, f3d, sattn), fuse_self_attention(f2d, bumped, sattn));
  const bool attention_nonlocal = x_changed.size() > 1 && s_changed.size() > 1;

  // Small instances against the direct oracles: 2 query positions, C = 4, 2 heads.
  const FeatureMap a = random_features(rng, 1, 2, 4);
  const FeatureMap b = random_features(rng, 1, 2, 4);
  const FusionParams small_x = init_fusion_params(FusionStrategy::CrossAttention, 4, 2, rng.next());
  const FusionParams small_s = init_fusion_params(FusionStrategy::SelfAttention, 4, 2, rng.next());
  const double xattn_dev = max_abs_diff(fuse_cross_attention(a, b, small_x).data(), oracle::cross_attention(a, b, small_x).data());
  const double sattn_dev = max_abs_diff(fuse_self_attention(a, b, small_s).data(), oracle::self_attention(a, b, small_s).data());
  // And at the working size.
  const double xattn_dev_full = max_abs_diff(fuse_cross_attention(f2d, f3d, xattn).data(), oracle::cross_attention(f2d, f3d, xattn).data());
  const double sattn_dev_full = max_abs_diff(fuse_self_attention(f2d, f3d, sattn).data(), oracle::self_attention(f2d, f3d, sattn).data());

  bool shapes = true;
  for (const FusionParams* p : {&concat_rand, &xattn, &sattn}) shapes = shapes && fuse(f2d, f3d, *p).same_shape(f2d);
  shapes = shapes && added.same_shape(f2d);

  constexpr double kTol = 1e-12;
  r.pass = hierarchy_dev <= kTol && concat_dev <= kTol && add_local && attention_nonlocal && xattn_dev <= kTol &&
           sattn_dev <= kTol && xattn_dev_full <= kTol && sattn_dev_full <= kTol && shapes;
  r.add("concat_vs_add_dev", hierarchy_dev);
  r.add("concat_oracle_dev", concat_dev);
  r.add("add_local", add_local ? "yes" : "no");
  r.add("xattn_changed_positions", x_changed.size());
  r.add("sattn_changed_positions", s_changed.size());
  r.add("xattn_oracle_dev", std::max(xattn_dev, xattn_dev_full));
  r.add("sattn_oracle_dev", std::max(sattn_dev, sattn_dev_full));
  r.add("shapes", shapes ? "preserved" : "changed");
  r.add("tol", kTol);
  return r;
}

namespace {

Action random_prediction(Rng& rng) {
  Action a;
  for (double& x : a.xyz) x = rng.uniform(-1.0, 1.0);
  for (double& x : a.quat) x = rng.uniform(-1.0, 1.0);
  a.open = rng.uniform();
  return a;
}

Action random_target(Rng& rng) {
  Action a;
  for (double& x : a.xyz) x = rng.uniform(-1.0, 1.0);
  double n = 0.0;
  do {
    n = 0.0;
    for (double& x : a.quat) {
      x = rng.uniform(-1.0, 1.0);
      n += x * x;
    }
  } while (n < 1e-3);
  for (double& x : a.quat) x /= std::sqrt(n);
  a.open = rng.below(2) == 0 ? 0.0 : 1.0;
  return a;
}

}  // namespace

PropertyResult check_loss(std::uint64_t seed) {
  PropertyResult r{"loss", false, {}};
  Rng rng(derive_seed(seed, 7));
  constexpr std::size_t kDatasets = 20;
  double oracle_dev = 0.0;
  double perfect = 0.0;
  for (std::size_t n = 0; n < kDatasets; ++n) {
    const std::size_t trajectories = 1 + rng.below(4);
    const std::size_t steps = 1 + rng.below(6);
    std::vector<Trajectory> data(trajectories);
    std::vector<Trajectory> ideal(trajectories);
    for (std::size_t t = 0; t < trajectories; ++t) {
      for (std::size_t s = 0; s < steps; ++s) {
        const Action target = random_target(rng);
        data[t].push_back({random_prediction(rng), target});
        ideal[t].push_back({target, target});
      }
    }
    oracle_dev = std::max(oracle_dev, std::abs(dataset_loss(data) - oracle::dataset_loss(data)));
    perfect = std::max(perfect, dataset_loss(ideal));
  }

  const double delta = rng.uniform(0.1, 2.0);
  Action target;
  Action pred = target;
  pred.xyz[0] = delta;
  target.open = 1.0;
  pred.open = 1.0;
  const StepLoss single = step_loss(pred, target);
  const bool exact = single.mse_xyz == delta * delta / 3.0;

  r.pass = oracle_dev <= 1e-12 && perfect <= 1e-5 && exact;
  r.add("datasets", kDatasets);
  r.add("oracle_dev", oracle_dev);
  r.add("perfect_loss", perfect);
  r.add("delta_exact", exact ? "yes" : "no");
  return r;
}

PropertyResult check_file_roundtrips(std::uint64_t seed, const std::filesystem::path& scratch_dir) {
  PropertyResult r{"files", false, {}};
  Rng rng(derive_seed(seed, 8));
  std::filesystem::create_directories(scratch_dir);

  std::size_t ply_mismatch = 0;
  for (int variant = 0; variant < 4; ++variant) {
    const std::size_t w = 1 + rng.below(16);
    const std::size_t h = 1 + rng.below(16);
    std::vector<double> xyz(3 * w * h);
    for (double& x : xyz) x = rng.uniform(-100.0, 100.0);
    PseudoPointCloud cloud(w, h, xyz);
    if (variant % 2 == 1) {
      std::vector<Rgb8> colors(w * h);
      for (Rgb8& c : colors) {
        c = {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
             static_cast<std::uint8_t>(rng.below(256))};
      }
      cloud = cloud.with_colors(std::move(colors));
    }
    const auto path = scratch_dir / ("cloud" + std::to_string(variant) + ".ply");
    export_ply(cloud, path);
    const PseudoPointCloud back = import_ply(path);
    if (back.width() != w || back.height() != h || back.has_colors() != cloud.has_colors()) {
      ++ply_mismatch;
      continue;
    }
    for (std::size_t i = 0; i < xyz.size(); ++i) {
      if (back.xyz()[i] != static_cast<double>(static_cast<float>(xyz[i]))) ++ply_mismatch;
    }
    if (cloud.has_colors() && !std::equal(back.colors().begin(), back.colors().end(), cloud.colors().begin())) {
      ++ply_mismatch;
    }
  }

  // One ramp in every depth format; quarter steps are exact in float32 and in the PGM mapping.
  constexpr std::size_t kW = 7, kH = 5;
  const double step = 0.25;
  std::vector<double> ramp(kW * kH);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = step * static_cast<double>(i + 1);
  const DepthMap source(kW, kH, ramp, DepthKind::PredictedRelative);
  const PgmMapping mapping{step, 0.0};
  write_pfm(source, scratch_dir / "ramp_le.pfm", Endian::Little);
  write_pfm(source, scratch_dir / "ramp_be.pfm", Endian::Big);
  write_pgm16(source, scratch_dir / "ramp.pgm", mapping);
  write_csv(source, scratch_dir / "ramp.csv");
  const DepthMap readers[] = {
      read_pfm(scratch_dir / "ramp_le.pfm", DepthKind::PredictedRelative),
      read_pfm(scratch_dir / "ramp_be.pfm", DepthKind::PredictedRelative),
      read_pgm(scratch_dir / "ramp.pgm", DepthKind::PredictedRelative, mapping),
      read_csv(scratch_dir / "ramp.csv", DepthKind::PredictedRelative),
  };
  std::size_t format_mismatch = 0;
  for (const DepthMap& d : readers) {
    if (d.width() != kW || d.height() != kH || !std::equal(d.values().begin(), d.values().end(), ramp.begin())) {
      ++format_mismatch;
    }
  }

  r.pass = ply_mismatch == 0 && format_mismatch == 0;
  r.add("ply_mismatches", ply_mismatch);
  r.add("format_mismatches", format_mismatch);
  return r;
}

PropertyResult check_kernel_equivalence(std::uint64_t seed) {
  PropertyResult r{"kernels", false, {}};
  const simd::KernelTable& ref = simd::scalar_kernels();
  const simd::KernelTable* fast = simd::avx2_kernels();
  if (fast == nullptr) {
    r.pass = true;
    r.add("backend", "scalar-only");
    return r;
  }
  Rng rng(derive_seed(seed, 9));
  std::size_t elementwise_mismatch = 0;
  double dot_rel = 0.0;
  for (std::size_t n = 0; n < 70; ++n) {
    std::vector<double> x(n), y(n);
    for (double& v : x) v = rng.uniform(0.1, 10.0);
    for (double& v : y) v = rng.uniform(-10.0, 10.0);
    std::vector<double> a(n), b(n);
    auto compare = [&] {
      if (!std::equal(a.begin(), a.end(), b.begin(),
                      [](double p, double q) { return std::bit_cast<std::uint64_t>(p) == std::bit_cast<std::uint64_t>(q); })) {
        ++elementwise_mismatch;
      }
    };
    const simd::MinMax m1 = ref.minmax(y);
    const simd::MinMax m2 = fast->minmax(y);
    if (m1.min != m2.min || m1.max != m2.max || m1.finite != m2.finite) ++elementwise_mismatch;
    ref.rescale(y, -3.0, 7.5, a);
    fast->rescale(y, -3.0, 7.5, b);
    compare();
    ref.rescale_invert(y, -3.0, 7.5, a);
    fast->rescale_invert(y, -3.0, 7.5, b);
    compare();
    ref.one_minus(y, a);
    fast->one_minus(y, b);
    compare();
    ref.reciprocal_affine(x, 3.0, -2.0, a);
    fast->reciprocal_affine(x, 3.0, -2.0, b);
    compare();
    a = y;
    b = y;
    ref.axpy(0.7, x.data(), a.data(), n);
    fast->axpy(0.7, x.data(), b.data(), n);
    compare();
    const simd::PinholeRow row{523.0, 611.0, 11.5, 7.25, 3.0};
    std::vector<double> pa(3 * n), pb(3 * n);
    ref.backproject_row(x, row, pa);
    fast->backproject_row(x, row, pb);
    if (pa != pb) ++elementwise_mismatch;
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
    const double d1 = ref.dot(x.data(), y.data(), n);
    const double d2 = fast->dot(x.data(), y.data(), n);
    if (mag > 0.0) dot_rel = std::max(dot_rel, std::abs(d1 - d2) / mag);
  }
  r.pass = elementwise_mismatch == 0 && dot_rel <= 1e-12;
  r.add("backend", std::string(fast->name));
  r.add("elementwise_mismatches", elementwise_mismatch);
  r.add("dot_rel_dev", dot_rel);
  return r;
}

const std::vector<std::string_view>& property_names() {
  static const std::vector<std::string_view> names{"affine", "shift", "roundtrip", "scale", "gradcheck",
                                                   "fusion", "loss", "files", "kernels"};
  return names;
}

VerifyReport run_verify(const VerifyOptions& options) {
  const auto& all = property_names();
  for (const std::string& p : options.properties) {
    if (std::find(all.begin(), all.end(), p) == all.end()) {
      throw Error(ErrorCode::ConfigError, "unknown property '" + p + "'");
    }
  }
  auto wanted = [&](std::string_view name) {
    return options.properties.empty() ||
           std::find(options.properties.begin(), options.properties.end(), name) != options.properties.end();
  };

  std::filesystem::path scratch = options.scratch_dir;
  const bool own_scratch = scratch.empty();
  if (own_scratch) {
    static std::atomic<unsigned> counter{0};
    scratch = std::filesystem::temp_directory_path() /
              ("pseudo3d-verify-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  }

  const std::uint64_t seed = options.seed;
  const std::vector<std::pair<std::string_view, std::function<PropertyResult()>>> suites{
      {"affine", [&] { return check_affine_invariance(seed, options.break_shift); }},
      {"shift", [&] { return check_shift_distortion(seed); }},
      {"roundtrip", [&] { return check_roundtrip(seed); }},
      {"scale", [&] { return check_scale_and_grid(seed); }},
      {"gradcheck", [&] { return check_gradients(seed); }},
      {"fusion", [&] { return check_fusion(seed); }},
      {"loss", [&] { return check_loss(seed); }},
      {"files", [&] { return check_file_roundtrips(seed, scratch); }},
      {"kernels", [&] { return check_kernel_equivalence(seed); }},
  };

  VerifyReport report;
  for (const auto& [name, run] : suites) {
    if (!wanted(name)) continue;
    try {
      report.results.push_back(run());
    } catch (const Error& e) {
      PropertyResult failed{std::string(name), false, {}};
      failed.add("error", std::string(to_string(e.code())));
      report.results.push_back(std::move(failed));
    }
  }
  if (own_scratch) {
    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);
  }
  return report;
}

}  // namespace pseudo3d
