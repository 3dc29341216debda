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

#ifndef HMCAL_DECODERS_H_
#define HMCAL_DECODERS_H_

#include <vector>

#include <Eigen/Core>

#include "hmcal/rng.h"

namespace hmcal {

// Fully connected network with tanh hidden layers and a linear output layer.
// Owns no parameters; operates on a flat parameter block laid out layer by
// layer as [W (out x in, column-major), b].
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input_dim, int width, int hidden_layers, int output_dim);

  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  int num_layers() const { return static_cast<int>(dims_.size()) - 1; }
  int num_params() const { return num_params_; }

  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // input, then each hidden output
  };

  // x: input_dim x S. Returns output_dim x S.
  Eigen::MatrixXd Forward(const double* params, const Eigen::MatrixXd& x,
                          Cache* cache) const;
  // Accumulates parameter gradients into `grad` and optionally writes d x.
  void Backward(const double* params, const Cache& cache,
                const Eigen::MatrixXd& d_out, double* grad,
                Eigen::MatrixXd* d_x) const;

  // Glorot-uniform weights, zero biases.
  void Init(double* params, Rng& rng) const;
  // Zeroes the weights and biases of the last layer.
  void ZeroLastLayer(double* params) const;

 private:
  std::vector<int> dims_ = {0, 0};
  std::vector<int> offsets_;
  int num_params_ = 0;
};

struct DecoderConfig {
  int feature_dim = 32;  // fused input length L*F
  int width = 64;
  int hidden_layers = 2;
  int geo_dim = 15;
  int direction_freqs = 4;
};

int EncodedDirectionDim(int freqs);
// gamma(d) = [d, sin(2^k pi d), cos(2^k pi d)] for k < freqs.
Eigen::MatrixXd EncodeDirections(const Eigen::Matrix3Xd& dirs, int freqs);

double Softplus(double x);
double Sigmoid(double x);

class Decoders {
 public:
  explicit Decoders(DecoderConfig config);

  const DecoderConfig& config() const { return config_; }
  const Mlp& density_mlp() const { return density_; }
  const Mlp& color_mlp() const { return color_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  const double* density_params() const { return params_.data(); }
  const double* color_params() const {
    return params_.data() + density_.num_params();
  }

  void Init(Rng& rng);

  struct Cache {
    Mlp::Cache density;
    Mlp::Cache color;
    Eigen::MatrixXd density_out;  // (1 + geo_dim) x S
    Eigen::MatrixXd color_out;    // 3 x S, pre-squash
    Eigen::Matrix3Xd dirs;        // 3 x R
    int group = 1;
  };

  // features: feature_dim x S; dirs: 3 x R unit vectors with S = R * group,
  // direction r shared by samples [r * group, (r + 1) * group).
  void Forward(const Eigen::MatrixXd& features, const Eigen::Matrix3Xd& dirs,
               int group, Eigen::VectorXd* sigma, Eigen::Matrix3Xd* rgb,
               Cache* cache) const;

  // Given d loss / d sigma and d loss / d rgb, accumulates parameter
  // gradients and writes d loss / d features and (optionally) / d dirs
  // (3 x R).
  void Backward(const Cache& cache, const Eigen::VectorXd& d_sigma,
                const Eigen::Matrix3Xd& d_rgb, double* grad,
                Eigen::MatrixXd* d_features, Eigen::Matrix3Xd* d_dirs) const;

 private:
  DecoderConfig config_;
  Mlp density_;
  Mlp color_;
  std::vector<double> params_;
};

}  // namespace hmcal

#endif  // HMCAL_DECODERS_H_
