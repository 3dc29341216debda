// Copyright 2026 The hmcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hmcal/decoders.h"

#include <cmath>
#include <numbers>

#include "hmcal/error.h"

namespace hmcal {

Mlp::Mlp(int input_dim, int width, int hidden_layers, int output_dim) {
  if (input_dim < 1 || output_dim < 1 || width < 1 || hidden_layers < 0) {
    Fail(ErrorKind::kConfig, "invalid MLP shape");
  }
  dims_.clear();
  dims_.push_back(input_dim);
  for (int i = 0; i < hidden_layers; ++i) dims_.push_back(width);
  dims_.push_back(output_dim);
  for (int l = 0; l < num_layers(); ++l) {
    offsets_.push_back(num_params_);
    num_params_ += dims_[l + 1] * dims_[l] + dims_[l + 1];
  }
}

Eigen::MatrixXd Mlp::Forward(const double* params, const Eigen::MatrixXd& x,
                             Cache* cache) const {
  using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
  using ConstVec = Eigen::Map<const Eigen::VectorXd>;
  if (cache) {
    cache->activations.resize(num_layers());
    cache->activations[0] = x;
  }
  Eigen::MatrixXd h = x;
  for (int l = 0; l < num_layers(); ++l) {
    const int in = dims_[l];
    const int out = dims_[l + 1];
    ConstMap w(params + offsets_[l], out, in);
    ConstVec b(params + offsets_[l] + out * in, out);
    Eigen::MatrixXd z = w * h;
    z.colwise() += b;
    if (l + 1 == num_layers()) return z;
    // tanh(z) = 1 - 2 / (exp(2z) + 1); Eigen vectorizes exp but not tanh.
    h = (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
    if (cache) cache->activations[l + 1] = h;
  }
  return h;
}

void Mlp::Backward(const double* params, const Cache& cache,
                   const Eigen::MatrixXd& d_out, double* grad,
                   Eigen::MatrixXd* d_x) const {
  using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
  Eigen::MatrixXd dz = d_out;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const int in = dims_[l];
    const int out = dims_[l + 1];
    const Eigen::MatrixXd& a = cache.activations[l];
    Eigen::Map<Eigen::MatrixXd> gw(grad + offsets_[l], out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad + offsets_[l] + out * in, out);
    const Eigen::MatrixXd gw_local = dz * a.transpose();
    const Eigen::VectorXd gb_local = dz.rowwise().sum();
    gw += gw_local;
    gb += gb_local;
    if (l == 0 && !d_x) return;
    ConstMap w(params + offsets_[l], out, in);
    Eigen::MatrixXd da = w.transpose() * dz;
    if (l == 0) {
      *d_x = std::move(da);
      return;
    }
    dz = (da.array() * (1.0 - a.array().square())).matrix();
  }
}

void Mlp::Init(double* params, Rng& rng) const {
  for (int l = 0; l < num_layers(); ++l) {
    const int in = dims_[l];
    const int out = dims_[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    double* w = params + offsets_[l];
    for (int i = 0; i < out * in; ++i) w[i] = rng.Uniform(-limit, limit);
    for (int i = 0; i < out; ++i) w[out * in + i] = 0.0;
  }
}

void Mlp::ZeroLastLayer(double* params) const {
  const int l = num_layers() - 1;
  const int n = dims_[l + 1] * dims_[l] + dims_[l + 1];
  std::fill(params + offsets_[l], params + offsets_[l] + n, 0.0);
}

int EncodedDirectionDim(int freqs) { return 3 + 6 * freqs; }

Eigen::MatrixXd EncodeDirections(const Eigen::Matrix3Xd& dirs, int freqs) {
  Eigen::MatrixXd out(EncodedDirectionDim(freqs), dirs.cols());
  out.topRows<3>() = dirs;
  for (int k = 0; k < freqs; ++k) {
    const double scale = std::ldexp(std::numbers::pi, k);
    const Eigen::ArrayXXd arg = scale * dirs.array();
    out.middleRows(3 + 6 * k, 3) = arg.sin().matrix();
    out.middleRows(6 + 6 * k, 3) = arg.cos().matrix();
  }
  return out;
}

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Decoders::Decoders(DecoderConfig config)
    : config_(config),
      density_(config.feature_dim, config.width, config.hidden_layers,
               1 + config.geo_dim),
      color_(config.geo_dim + EncodedDirectionDim(config.direction_freqs),
             config.width, config.hidden_layers, 3) {
  if (config.direction_freqs < 0) Fail(ErrorKind::kConfig, "direction_freqs < 0");
  params_.assign(density_.num_params() + color_.num_params(), 0.0);
}

void Decoders::Init(Rng& rng) {
  density_.Init(params_.data(), rng);
  color_.Init(params_.data() + density_.num_params(), rng);
}

void Decoders::Forward(const Eigen::MatrixXd& features,
                       const Eigen::Matrix3Xd& dirs, int group,
                       Eigen::VectorXd* sigma, Eigen::Matrix3Xd* rgb,
                       Cache* cache) const {
  const Eigen::Index s = features.cols();
  if (group < 1 || dirs.cols() * group != s) {
    Fail(ErrorKind::kInput, "directions do not cover the feature columns");
  }
  Cache local;
  Cache& c = cache ? *cache : local;
  c.density_out = density_.Forward(density_params(), features, &c.density);
  const int enc_dim = EncodedDirectionDim(config_.direction_freqs);
  const Eigen::MatrixXd enc = EncodeDirections(dirs, config_.direction_freqs);
  Eigen::MatrixXd color_in(color_.input_dim(), s);
  color_in.topRows(config_.geo_dim) = c.density_out.bottomRows(config_.geo_dim);
  for (Eigen::Index r = 0; r < dirs.cols(); ++r) {
    color_in.block(config_.geo_dim, r * group, enc_dim, group).colwise() = enc.col(r);
  }
  c.color_out = color_.Forward(color_params(), color_in, &c.color);
  c.dirs = dirs;
  c.group = group;
  sigma->resize(s);
  rgb->resize(3, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    (*sigma)(i) = Softplus(c.density_out(0, i));
    for (int ch = 0; ch < 3; ++ch) (*rgb)(ch, i) = Sigmoid(c.color_out(ch, i));
  }
}

void Decoders::Backward(const Cache& cache, const Eigen::VectorXd& d_sigma,
                        const Eigen::Matrix3Xd& d_rgb, double* grad,
                        Eigen::MatrixXd* d_features,
                        Eigen::Matrix3Xd* d_dirs) const {
  const Eigen::Index s = d_sigma.size();
  const int geo = config_.geo_dim;
  Eigen::MatrixXd d_color_out(3, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    for (int ch = 0; ch < 3; ++ch) {
      const double y = Sigmoid(cache.color_out(ch, i));
      d_color_out(ch, i) = d_rgb(ch, i) * y * (1.0 - y);
    }
  }
  Eigen::MatrixXd d_color_in;
  color_.Backward(color_params(), cache.color, d_color_out,
                  grad + density_.num_params(), &d_color_in);

  Eigen::MatrixXd d_density_out(1 + geo, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    d_density_out(0, i) = d_sigma(i) * Sigmoid(cache.density_out(0, i));
  }
  d_density_out.bottomRows(geo) = d_color_in.topRows(geo);
  density_.Backward(density_params(), cache.density, d_density_out, grad,
                    d_features);

  if (d_dirs) {
    const Eigen::Index rays = cache.dirs.cols();
    const int enc_dim = EncodedDirectionDim(config_.direction_freqs);
    Eigen::MatrixXd dd(enc_dim, rays);
    for (Eigen::Index r = 0; r < rays; ++r) {
      dd.col(r) = d_color_in.block(geo, r * cache.group, enc_dim, cache.group).rowwise().sum();
    }
    *d_dirs = dd.topRows(3);
    for (int k = 0; k < config_.direction_freqs; ++k) {
      const double scale = std::ldexp(std::numbers::pi, k);
      const Eigen::ArrayXXd arg = scale * cache.dirs.array();
      *d_dirs += (scale * (dd.middleRows(3 + 6 * k, 3).array() * arg.cos() -
                           dd.middleRows(6 + 6 * k, 3).array() * arg.sin()))
                     .matrix();
    }
  }
}

}  // namespace hmcal
