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

#include "pseudo3d/testing/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace pseudo3d::oracle {
namespace {

using Mat = std::vector<std::vector<double>>;

Mat rows_of(const FeatureMap& f) {
  Mat m(f.positions(), std::vector<double>(f.channels()));
  for (std::size_t y = 0; y < f.height(); ++y) {
    for (std::size_t x = 0; x < f.width(); ++x) {
      for (std::size_t c = 0; c < f.channels(); ++c) m[y * f.width() + x][c] = f.at(y, x, c);
    }
  }
  return m;
}

FeatureMap from_rows(const Mat& m, std::size_t height, std::size_t width, std::size_t channels) {
  FeatureMap f(height, width, channels);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) f.at(y, x, c) = m[y * width + x][c];
    }
  }
  return f;
}

// x W^T + b for every row
Mat linear(const Mat& x, const Linear& l) {
  Mat y(x.size(), std::vector<double>(l.out));
  for (std::size_t r = 0; r < x.size(); ++r) {
    for (std::size_t o = 0; o < l.out; ++o) {
      double s = l.bias[o];
      for (std::size_t i = 0; i < l.in; ++i) s += l.weight[o * l.in + i] * x[r][i];
      y[r][o] = s;
    }
  }
  return y;
}

Mat attention(const AttentionParams& a, const Mat& queries, const Mat& keys_values) {
  const std::size_t c = a.query.out;
  const std::size_t dh = c / a.heads;
  const Mat q = linear(queries, a.query);
  const Mat k = linear(keys_values, a.key);
  const Mat v = linear(keys_values, a.value);
  Mat context(queries.size(), std::vector<double>(c, 0.0));
  for (std::size_t h = 0; h < a.heads; ++h) {
    // Per-head slices as standalone matrices.
    Mat qh(q.size(), std::vector<double>(dh));
    Mat kh(k.size(), std::vector<double>(dh));
    Mat vh(v.size(), std::vector<double>(dh));
    for (std::size_t i = 0; i < q.size(); ++i) std::copy_n(q[i].begin() + static_cast<long>(h * dh), dh, qh[i].begin());
    for (std::size_t j = 0; j < k.size(); ++j) {
      std::copy_n(k[j].begin() + static_cast<long>(h * dh), dh, kh[j].begin());
      std::copy_n(v[j].begin() + static_cast<long>(h * dh), dh, vh[j].begin());
    }
    for (std::size_t i = 0; i < qh.size(); ++i) {
      std::vector<double> scores(kh.size());
      for (std::size_t j = 0; j < kh.size(); ++j) {
        double s = 0.0;
        for (std::size_t d = 0; d < dh; ++d) s += qh[i][d] * kh[j][d];
        scores[j] = s / std::sqrt(static_cast<double>(dh));
      }
      const double m = *std::max_element(scores.begin(), scores.end());
      double z = 0.0;
      for (double s : scores) z += std::exp(s - m);
      for (std::size_t d = 0; d < dh; ++d) {
        double acc = 0.0;
        for (std::size_t j = 0; j < kh.size(); ++j) acc += std::exp(scores[j] - m) / z * vh[j][d];
        context[i][h * dh + d] = acc;
      }
    }
  }
  return linear(context, a.output);
}

Mat layer_norm(const Mat& x, const LayerNormParams& p) {
  Mat y = x;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double n = static_cast<double>(x[r].size());
    double mean = 0.0;
    for (double v : x[r]) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x[r]) var += (v - mean) * (v - mean);
    var /= n;
    for (std::size_t i = 0; i < x[r].size(); ++i) {
      y[r][i] = p.gamma[i] * (x[r][i] - mean) / std::sqrt(var + p.eps) + p.beta[i];
    }
  }
  return y;
}

}  // namespace

std::vector<double> normalize(std::span<const double> values) {
  double lo = values[0];
  for (double v : values) lo = std::min(lo, v);
  double hi = values[0];
  for (double v : values) hi = std::max(hi, v);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - lo) / (hi - lo));
  return out;
}

FeatureMap conv3x3s2(const FeatureMap& input, const ConvLayer& layer) {
  const std::size_t oh = (input.height() + 2 - 3) / 2 + 1;
  const std::size_t ow = (input.width() + 2 - 3) / 2 + 1;
  FeatureMap out(oh, ow, layer.out_channels);
  for (std::size_t co = 0; co < layer.out_channels; ++co) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        double s = layer.bias[co];
        for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
          for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
              const long iy = static_cast<long>(2 * oy + ky) - 1;
              const long ix = static_cast<long>(2 * ox + kx) - 1;
              if (iy < 0 || ix < 0 || iy >= static_cast<long>(input.height()) ||
                  ix >= static_cast<long>(input.width())) {
                continue;
              }
              const double w = layer.weight[((co * 3 + ky) * 3 + kx) * layer.in_channels + ci];
              s += w * input.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), ci);
            }
          }
        }
        out.at(oy, ox, co) = s;
      }
    }
  }
  return out;
}

EncoderTrace encode(const FeatureMap& input, const EncoderParams& params) {
  FeatureMap pre = conv3x3s2(input, params.conv1);
  FeatureMap hidden = pre;
  for (double& v : hidden.data()) v = std::max(v, 0.0);
  return {std::move(pre), conv3x3s2(hidden, params.conv2)};
}

double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

FeatureMap concat_project(const FeatureMap& f2d, const FeatureMap& f3d, const Linear& projection) {
  const Mat a = rows_of(f2d);
  const Mat b = rows_of(f3d);
  Mat joined(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    joined[p] = a[p];
    joined[p].insert(joined[p].end(), b[p].begin(), b[p].end());
  }
  return from_rows(linear(joined, projection), f2d.height(), f2d.width(), projection.out);
}

FeatureMap cross_attention(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params) {
  const Mat q = rows_of(f2d);
  const Mat att = attention(params.attention, q, rows_of(f3d));
  Mat out = q;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t c = 0; c < out[i].size(); ++c) out[i][c] += att[i][c];
  }
  return from_rows(out, f2d.height(), f2d.width(), f2d.channels());
}

FeatureMap self_attention(const FeatureMap& f2d, const FeatureMap& f3d, const FusionParams& params) {
  Mat x = rows_of(f2d);
  const Mat b = rows_of(f3d);
  x.insert(x.end(), b.begin(), b.end());

  const Mat n1 = layer_norm(x, params.norm1);
  const Mat att = attention(params.attention, n1, n1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t c = 0; c < x[i].size(); ++c) x[i][c] += att[i][c];
  }
  Mat hidden = linear(layer_norm(x, params.norm2), params.ffn_in);
  for (auto& row : hidden) {
    for (double& v : row) v = std::max(v, 0.0);
  }
  const Mat ffn = linear(hidden, params.ffn_out);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t c = 0; c < x[i].size(); ++c) x[i][c] += ffn[i][c];
  }
  x.resize(f2d.positions());
  return from_rows(x, f2d.height(), f2d.width(), f2d.channels());
}

double dataset_loss(std::span<const Trajectory> trajectories) {
  std::vector<ActionPair> steps;
  for (const Trajectory& t : trajectories) steps.insert(steps.end(), t.begin(), t.end());
  double sum = 0.0;
  for (const ActionPair& s : steps) {
    double sx = 0.0;
    for (int i = 0; i < 3; ++i) sx += std::pow(s.predicted.xyz[i] - s.target.xyz[i], 2);
    double sq = 0.0;
    for (int i = 0; i < 4; ++i) sq += std::pow(s.predicted.quat[i] - s.target.quat[i], 2);
    const double p = std::min(std::max(s.predicted.open, 1e-7), 1.0 - 1e-7);
    const double bce = s.target.open == 1.0 ? -std::log(p) : -std::log(1.0 - p);
    sum += sx / 3.0 + sq / 4.0 + bce;
  }
  return sum / static_cast<double>(steps.size());
}

}  // namespace pseudo3d::oracle
