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

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pseudo3d/camera.hpp"
#include "pseudo3d/cloud.hpp"
#include "pseudo3d/depth_io.hpp"
#include "pseudo3d/depth_map.hpp"
#include "pseudo3d/error.hpp"
#include "pseudo3d/fusion.hpp"
#include "pseudo3d/ply.hpp"
#include "pseudo3d/policy_loss.hpp"
#include "pseudo3d/synthetic.hpp"
#include "pseudo3d/verify.hpp"

namespace pseudo3d {
namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kPropertyFailure = 2;

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Wraps one pipeline stage so failures are reported with the stage name.
struct StageFailure {
  std::string stage;
  std::string message;
};

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageFailure{name, e.what()};
  }
}

struct GenCloudArgs {
  std::string depth;
  std::string format;
  std::string intrinsics;
  std::string out;
  std::string kind = "relative";
  bool naive = false;
  double pgm_scale = 1.0;
  double pgm_offset = 0.0;
  bool json = false;
};

int cmd_gen_cloud(const GenCloudArgs& a, std::ostream& out) {
  if (a.naive && a.kind != "relative") {
    throw StageFailure{"config", "config error: --naive-reciprocal needs --kind relative"};
  }
  const DepthFormat format = stage("config", [&] { return parse_depth_format(a.format); });
  const DepthKind kind = a.kind == "metric" ? DepthKind::Metric : DepthKind::PredictedRelative;
  const DepthMap raw =
      stage("read depth", [&] { return read_depth(a.depth, format, kind, PgmMapping{a.pgm_scale, a.pgm_offset}); });
  const CameraIntrinsics k = stage("intrinsics", [&] { return load_intrinsics_config(a.intrinsics); });

  std::string mode = "metric";
  DepthMap used = raw;
  if (kind == DepthKind::PredictedRelative) {
    if (a.naive) {
      mode = "naive-reciprocal";
      used = stage("reciprocal", [&] { return naive_reciprocal(raw); });
    } else {
      mode = "normalized";
      used = stage("normalize", [&] { return pipeline_relative_to_dr(raw); });
    }
  }
  const PseudoPointCloud cloud = stage("backproject", [&] { return backproject(used, k); });
  stage("write ply", [&] {
    export_ply(cloud, a.out);
    return 0;
  });

  const auto [lo, hi] = std::minmax_element(used.values().begin(), used.values().end());
  std::optional<ContinuityStats> cont;
  if (cloud.size() >= 2) cont = local_continuity(cloud);

  if (a.json) {
    json j{{"command", "gen-cloud"}, {"width", raw.width()},   {"height", raw.height()}, {"points", cloud.size()},
           {"mode", mode},           {"depth_min", *lo},       {"depth_max", *hi}};
    if (cont) {
      j["continuity_mean"] = cont->mean;
      j["continuity_max"] = cont->max;
    }
    j["out"] = a.out;
    out << j.dump() << '\n';
  } else {
    out << "command=gen-cloud width=" << raw.width() << " height=" << raw.height() << " points=" << cloud.size()
        << " mode=" << mode << " depth_min=" << fmt(*lo) << " depth_max=" << fmt(*hi);
    if (cont) out << " continuity_mean=" << fmt(cont->mean) << " continuity_max=" << fmt(cont->max);
    out << " out=" << a.out << '\n';
  }
  return kOk;
}

struct VerifyArgs {
  std::vector<std::string> props;
  bool break_shift = false;
  bool json = false;
};

int cmd_verify(const VerifyArgs& a, std::uint64_t seed, std::ostream& out) {
  VerifyOptions opts;
  opts.seed = seed;
  opts.properties = a.props;
  opts.break_shift = a.break_shift;
  const VerifyReport report = stage("verify", [&] { return run_verify(opts); });
  if (a.json) {
    json props = json::array();
    for (const PropertyResult& r : report.results) {
      json d = json::object();
      for (const auto& [k, v] : r.details) d[k] = v;
      props.push_back({{"property", r.name}, {"status", r.pass ? "pass" : "fail"}, {"details", d}});
    }
    out << json{{"seed", seed}, {"properties", props}, {"summary", report.all_pass() ? "pass" : "fail"}}.dump() << '\n';
  } else {
    out << "seed=" << seed << '\n' << report.to_text();
  }
  return report.all_pass() ? kOk : kPropertyFailure;
}

struct BenchArgs {
  std::string shape = "8x8x32";
  std::vector<std::string> fusion;
  std::size_t reps = 10;
  std::size_t heads = kDefaultHeads;
  bool json = false;
};

std::array<std::size_t, 3> parse_shape(const std::string& text) {
  std::array<std::size_t, 3> dims{};
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto res = std::from_chars(p, end, dims[i]);
    const bool last = i == 2;
    if (res.ec != std::errc{} || (last ? res.ptr != end : (res.ptr == end || *res.ptr != 'x'))) {
      throw Error(ErrorCode::ConfigError, "shape must look like HxWxC, got '" + text + "'");
    }
    p = res.ptr + (last ? 0 : 1);
  }
  return dims;
}

int cmd_fuse_bench(const BenchArgs& a, std::uint64_t seed, std::ostream& out) {
  FusionBenchConfig config;
  const auto dims = stage("config", [&] { return parse_shape(a.shape); });
  config.height = dims[0];
  config.width = dims[1];
  config.channels = dims[2];
  config.heads = a.heads;
  config.repetitions = a.reps;
  config.f2d_seed = seed;
  config.f3d_seed = seed + 1;
  if (!a.fusion.empty()) {
    std::vector<FusionStrategy> wanted;
    for (const std::string& name : a.fusion) wanted.push_back(stage("config", [&] { return parse_fusion_strategy(name); }));
    // Reports keep the fixed strategy order regardless of flag order.
    std::erase_if(config.strategies, [&](FusionStrategy s) { return std::find(wanted.begin(), wanted.end(), s) == wanted.end(); });
  }
  const auto results = stage("fuse", [&] { return fusion_bench(config); });
  const std::string shape = std::to_string(dims[0]) + "x" + std::to_string(dims[1]) + "x" + std::to_string(dims[2]);
  for (const FusionBenchResult& r : results) {
    if (a.json) {
      json j{{"strategy", to_string(r.strategy)}, {"shape", shape}, {"reps", r.repetitions}};
      j["mean_ns"] = r.mean_ns ? json(*r.mean_ns) : json(nullptr);
      j["checksum"] = hex(r.checksum);
      out << j.dump() << '\n';
    } else {
      out << "strategy=" << to_string(r.strategy) << " shape=" << shape << " reps=" << r.repetitions
          << " mean_ns=" << (r.mean_ns ? fmt(*r.mean_ns) : std::string("na")) << " checksum=" << hex(r.checksum) << '\n';
    }
  }
  return kOk;
}

struct SynthArgs {
  std::string scene = "wedge";
  std::string intrinsics;
  std::size_t width = 16;
  std::size_t height = 8;
  double z0 = 2.0;
  double z_near = 1.0;
  double z_far = 3.0;
  std::string format = "csv";
  std::string out;
  std::string cloud_out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const CameraIntrinsics k = stage("intrinsics", [&] { return load_intrinsics_config(a.intrinsics); });
  const DepthFormat format = stage("config", [&] { return parse_depth_format(a.format); });
  const SyntheticScene scene = stage("synth", [&] {
    return a.scene == "plane" ? synth_plane(k, a.width, a.height, a.z0) : synth_wedge(k, a.width, a.height, a.z_near, a.z_far);
  });
  stage("write depth", [&] {
    switch (format) {
      case DepthFormat::Pfm: write_pfm(scene.depth, a.out); break;
      case DepthFormat::Pgm: write_pgm16(scene.depth, a.out); break;
      case DepthFormat::Csv: write_csv(scene.depth, a.out); break;
    }
    return 0;
  });
  if (!a.cloud_out.empty()) {
    stage("write ply", [&] {
      export_ply(scene.cloud, a.cloud_out);
      return 0;
    });
  }
  out << "command=synth scene=" << a.scene << " width=" << a.width << " height=" << a.height << " out=" << a.out << '\n';
  return kOk;
}

struct LossArgs {
  std::string pred;
  std::string target;
  bool json = false;
};

int cmd_loss(const LossArgs& a, std::ostream& out) {
  const Trajectory traj = stage("read actions", [&] { return read_trajectory(a.pred, a.target); });
  const double loss = stage("loss", [&] { return dataset_loss(std::span<const Trajectory>(&traj, 1)); });
  if (a.json) {
    out << json{{"command", "loss"}, {"steps", traj.size()}, {"loss", loss}}.dump() << '\n';
  } else {
    out << "command=loss steps=" << traj.size() << " loss=" << fmt(loss) << '\n';
  }
  return kOk;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("PSEUDO3D_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::uint64_t v = 0;
  const char* end = raw + std::char_traits<char>::length(raw);
  const auto res = std::from_chars(raw, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw StageFailure{"config", "config error: PSEUDO3D_SEED must be a non-negative integer"};
  }
  return v;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudo point clouds from relative depth, plus verification and fusion benchmarks", "pseudo3d"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;

  GenCloudArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-cloud", "Depth file to pseudo point cloud PLY");
  gen_cmd->add_option("--depth", gen.depth, "Depth map path")->required();
  gen_cmd->add_option("--format", gen.format, "pfm | pgm | csv")->required();
  gen_cmd->add_option("--intrinsics", gen.intrinsics, "Intrinsics config path")->required();
  gen_cmd->add_option("--out", gen.out, "Output PLY path")->required();
  gen_cmd->add_option("--kind", gen.kind, "relative (normalize + invert) or metric (used as is)")
      ->check(CLI::IsMember({"relative", "metric"}));
  gen_cmd->add_flag("--naive-reciprocal", gen.naive, "Use 1 / d_pred instead of the normalized pipeline");
  gen_cmd->add_option("--pgm-scale", gen.pgm_scale, "PGM value = offset + scale * raw");
  gen_cmd->add_option("--pgm-offset", gen.pgm_offset);
  gen_cmd->add_flag("--json", gen.json);

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "Run the property suites");
  ver_cmd->add_option("--props", ver.props, "Comma-separated subset of suites")->delimiter(',');
  ver_cmd->add_option("--seed", seed_flag);
  ver_cmd->add_flag("--break-shift", ver.break_shift, "Fault injection: add t after normalizing");
  ver_cmd->add_flag("--json", ver.json);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("fuse-bench", "Time and checksum the fusion strategies");
  bench_cmd->add_option("--shape", bench.shape, "HxWxC");
  bench_cmd->add_option("--fusion", bench.fusion, "add,concat,xattn,sattn")->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps);
  bench_cmd->add_option("--heads", bench.heads);
  bench_cmd->add_option("--seed", seed_flag);
  bench_cmd->add_flag("--json", bench.json);

  SynthArgs syn;
  auto* syn_cmd = app.add_subcommand("synth", "Write a synthetic plane or wedge depth map");
  syn_cmd->add_option("--scene", syn.scene)->check(CLI::IsMember({"plane", "wedge"}));
  syn_cmd->add_option("--intrinsics", syn.intrinsics)->required();
  syn_cmd->add_option("--width", syn.width);
  syn_cmd->add_option("--height", syn.height);
  syn_cmd->add_option("--z0", syn.z0);
  syn_cmd->add_option("--z-near", syn.z_near);
  syn_cmd->add_option("--z-far", syn.z_far);
  syn_cmd->add_option("--format", syn.format);
  syn_cmd->add_option("--out", syn.out)->required();
  syn_cmd->add_option("--cloud-out", syn.cloud_out, "Also write the closed-form cloud as PLY");

  LossArgs loss;
  auto* loss_cmd = app.add_subcommand("loss", "Behavior-cloning loss over one trajectory");
  loss_cmd->add_option("--pred", loss.pred)->required();
  loss_cmd->add_option("--target", loss.target)->required();
  loss_cmd->add_flag("--json", loss.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    const std::uint64_t seed = seed_flag ? *seed_flag : env_seed().value_or(0);
    if (*gen_cmd) return cmd_gen_cloud(gen, out);
    if (*ver_cmd) return cmd_verify(ver, seed, out);
    if (*bench_cmd) return cmd_fuse_bench(bench, seed, out);
    if (*syn_cmd) return cmd_synth(syn, out);
    if (*loss_cmd) return cmd_loss(loss, out);
  } catch (const StageFailure& f) {
    err << "error: stage=" << f.stage << ": " << f.message << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace pseudo3d
