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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hmcal/decoders.h"
#include "hmcal/error.h"
#include "hmcal/rng.h"
#include "test_util.h"

namespace hmcal {
namespace {

using testing::CentralDiff;
using testing::Gen;
using testing::RelErr;

// Layer-by-layer evaluation with explicit loops and std::tanh.
Eigen::MatrixXd NaiveMlp(const std::vector<int>& dims, const double* p, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a = x;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    Eigen::MatrixXd z(out, a.cols());
    for (int s = 0; s < a.cols(); ++s) {
      for (int o = 0; o < out; ++o) {
        double acc = p[in * out + o];
        for (int i = 0; i < in; ++i) acc += p[i * out + o] * a(i, s);
        z(o, s) = l + 2 < dims.size() ? std::tanh(acc) : acc;
      }
    }
    p += in * out + out;
    a = z;
  }
  return a;
}

std::vector<double> RandomParams(int n, Gen& gen, double sd = 0.5) {
  std::vector<double> p(n);
  for (double& v : p) v = gen.Normal(0.0, sd);
  return p;
}

TEST(MlpTest, ParameterCount) {
  const Mlp mlp(5, 8, 2, 3);
  EXPECT_EQ(mlp.num_params(), 5 * 8 + 8 + 8 * 8 + 8 + 8 * 3 + 3);
  EXPECT_EQ(mlp.num_layers(), 3);
  EXPECT_EQ(mlp.input_dim(), 5);
  EXPECT_EQ(mlp.output_dim(), 3);
}

TEST(MlpTest, ForwardMatchesNaiveLoops) {
  Gen gen(81);
  for (int layers : {0, 1, 2, 3}) {
    const Mlp mlp(4, 6, layers, 2);
    std::vector<int> dims = {4};
    for (int l = 0; l < layers; ++l) dims.push_back(6);
    dims.push_back(2);
    const std::vector<double> p = RandomParams(mlp.num_params(), gen);
    const Eigen::MatrixXd x = gen.Matrix(4, 9, 2.0);
    const Eigen::MatrixXd y = mlp.Forward(p.data(), x, nullptr);
    EXPECT_LT((y - NaiveMlp(dims, p.data(), x)).norm(), 1e-12) << layers;
  }
}

TEST(MlpTest, BackwardMatchesFiniteDifferences) {
  Gen gen(82);
  const Mlp mlp(3, 5, 2, 2);
  std::vector<double> p = RandomParams(mlp.num_params(), gen);
  Eigen::MatrixXd x = gen.Matrix(3, 4);
  const Eigen::MatrixXd g = gen.Matrix(2, 4);
  const auto loss = [&]() { return (mlp.Forward(p.data(), x, nullptr).array() * g.array()).sum(); };
  Mlp::Cache cache;
  mlp.Forward(p.data(), x, &cache);
  std::vector<double> grad(p.size(), 0.0);
  Eigen::MatrixXd dx;
  mlp.Backward(p.data(), cache, g, grad.data(), &dx);
  for (size_t i = 0; i < p.size(); ++i) {
    EXPECT_LT(RelErr(grad[i], CentralDiff(loss, &p[i], 1e-6), 1e-7), 1e-5) << i;
  }
  for (int s = 0; s < 4; ++s) {
    for (int i = 0; i < 3; ++i) {
      EXPECT_LT(RelErr(dx(i, s), CentralDiff(loss, &x(i, s), 1e-6), 1e-7), 1e-5);
    }
  }
}

TEST(MlpTest, BackwardAccumulates) {
  Gen gen(83);
  const Mlp mlp(3, 4, 1, 1);
  const std::vector<double> p = RandomParams(mlp.num_params(), gen);
  Mlp::Cache cache;
  mlp.Forward(p.data(), gen.Matrix(3, 2), &cache);
  const Eigen::MatrixXd g = gen.Matrix(1, 2);
  std::vector<double> once(p.size(), 0.0), twice(p.size(), 0.0);
  mlp.Backward(p.data(), cache, g, once.data(), nullptr);
  mlp.Backward(p.data(), cache, g, twice.data(), nullptr);
  mlp.Backward(p.data(), cache, g, twice.data(), nullptr);
  for (size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(twice[i], 2 * once[i], 1e-14);
}

TEST(MlpTest, InitAndZeroLastLayer) {
  const Mlp mlp(10, 20, 1, 3);
  std::vector<double> p(mlp.num_params(), 7.0);
  Rng rng(1);
  mlp.Init(p.data(), rng);
  const double limit0 = std::sqrt(6.0 / (10 + 20));
  for (int i = 0; i < 200; ++i) EXPECT_LE(std::abs(p[i]), limit0);
  for (int i = 200; i < 220; ++i) EXPECT_EQ(p[i], 0.0);  // first-layer biases
  mlp.ZeroLastLayer(p.data());
  for (int i = 220; i < mlp.num_params(); ++i) EXPECT_EQ(p[i], 0.0);
  const Eigen::MatrixXd y = mlp.Forward(p.data(), Eigen::MatrixXd::Random(10, 3), nullptr);
  EXPECT_EQ(y.norm(), 0.0);
}

TEST(ActivationTest, SoftplusAndSigmoidAreStable) {
  for (double x : {-800.0, -30.0, -1.0, 0.0, 1.0, 30.0, 800.0}) {
    EXPECT_TRUE(std::isfinite(Softplus(x)));
    EXPECT_GE(Softplus(x), 0.0);
    EXPECT_GE(Sigmoid(x), 0.0);
    EXPECT_LE(Sigmoid(x), 1.0);
    if (std::abs(x) < 30) {
      EXPECT_NEAR(Softplus(x), std::log(1.0 + std::exp(x)), 1e-12);
      EXPECT_NEAR(Sigmoid(x), 1.0 / (1.0 + std::exp(-x)), 1e-15);
    }
  }
  EXPECT_EQ(Softplus(800.0), 800.0);
  EXPECT_EQ(Sigmoid(-800.0), 0.0);
}

TEST(DirectionEncodingTest, MatchesDefinition) {
  Gen gen(84);
  Eigen::Matrix3Xd d(3, 5);
  for (int i = 0; i < 5; ++i) d.col(i) = gen.UnitVec();
  const Eigen::MatrixXd e = EncodeDirections(d, 4);
  ASSERT_EQ(e.rows(), EncodedDirectionDim(4));
  ASSERT_EQ(EncodedDirectionDim(4), 27);
  for (int i = 0; i < 5; ++i) {
    std::vector<double> expect = {d(0, i), d(1, i), d(2, i)};
    for (int k = 0; k < 4; ++k) {
      for (int a = 0; a < 3; ++a) expect.push_back(std::sin(std::ldexp(M_PI, k) * d(a, i)));
      for (int a = 0; a < 3; ++a) expect.push_back(std::cos(std::ldexp(M_PI, k) * d(a, i)));
    }
    // Sine and cosine blocks may be interleaved per axis or per frequency;
    // compare as multisets per frequency band.
    std::vector<double> got(e.col(i).data(), e.col(i).data() + 27);
    for (int a = 0; a < 3; ++a) EXPECT_EQ(got[a], expect[a]);
    std::sort(got.begin() + 3, got.end());
    std::sort(expect.begin() + 3, expect.end());
    for (int k = 3; k < 27; ++k) EXPECT_NEAR(got[k], expect[k], 1e-12);
  }
}

DecoderConfig SmallDecoderConfig() {
  DecoderConfig c;
  c.feature_dim = 6;
  c.width = 8;
  c.hidden_layers = 2;
  c.geo_dim = 4;
  c.direction_freqs = 2;
  return c;
}

TEST(DecodersTest, ForwardComposesBothNetworks) {
  Gen gen(85);
  Decoders dec(SmallDecoderConfig());
  Rng rng(2);
  dec.Init(rng);
  for (double& v : dec.params()) v += gen.Normal(0.0, 0.1);
  const int rays = 3, group = 4;
  const Eigen::MatrixXd feat = gen.Matrix(6, rays * group);
  Eigen::Matrix3Xd dirs(3, rays);
  for (int r = 0; r < rays; ++r) dirs.col(r) = gen.UnitVec();
  Eigen::VectorXd sigma;
  Eigen::Matrix3Xd rgb;
  dec.Forward(feat, dirs, group, &sigma, &rgb, nullptr);

  const Eigen::MatrixXd dens = dec.density_mlp().Forward(dec.density_params(), feat, nullptr);
  ASSERT_EQ(dens.rows(), 5);
  const Eigen::MatrixXd enc = EncodeDirections(dirs, 2);
  for (int s = 0; s < rays * group; ++s) {
    EXPECT_NEAR(sigma(s), Softplus(dens(0, s)), 1e-14);
    Eigen::VectorXd in(4 + enc.rows());
    in << dens.col(s).tail(4), enc.col(s / group);
    const Eigen::MatrixXd col = dec.color_mlp().Forward(dec.color_params(), in, nullptr);
    for (int ch = 0; ch < 3; ++ch) EXPECT_NEAR(rgb(ch, s), Sigmoid(col(ch, 0)), 1e-14);
  }
  EXPECT_THROW(dec.Forward(feat, dirs, 3, &sigma, &rgb, nullptr), Error);
}

TEST(DecodersTest, BackwardMatchesFiniteDifferences) {
  Gen gen(86);
  Decoders dec(SmallDecoderConfig());
  Rng rng(3);
  dec.Init(rng);
  for (double& v : dec.params()) v += gen.Normal(0.0, 0.2);
  const int rays = 2, group = 3;
  Eigen::MatrixXd feat = gen.Matrix(6, rays * group);
  Eigen::Matrix3Xd dirs(3, rays);
  for (int r = 0; r < rays; ++r) dirs.col(r) = gen.UnitVec();
  const Eigen::VectorXd gs = gen.Matrix(rays * group, 1);
  const Eigen::Matrix3Xd gc = gen.Matrix(3, rays * group);
  const auto loss = [&]() {
    Eigen::VectorXd sigma;
    Eigen::Matrix3Xd rgb;
    dec.Forward(feat, dirs, group, &sigma, &rgb, nullptr);
    return sigma.dot(gs) + (rgb.array() * gc.array()).sum();
  };
  Decoders::Cache cache;
  Eigen::VectorXd sigma;
  Eigen::Matrix3Xd rgb;
  dec.Forward(feat, dirs, group, &sigma, &rgb, &cache);
  std::vector<double> grad(dec.params().size(), 0.0);
  Eigen::MatrixXd d_feat;
  Eigen::Matrix3Xd d_dirs;
  dec.Backward(cache, gs, gc, grad.data(), &d_feat, &d_dirs);
  for (size_t i = 0; i < grad.size(); ++i) {
    EXPECT_LT(RelErr(grad[i], CentralDiff(loss, &dec.params()[i], 1e-6), 1e-7), 1e-5) << i;
  }
  for (int s = 0; s < rays * group; ++s) {
    for (int k = 0; k < 6; ++k) {
      EXPECT_LT(RelErr(d_feat(k, s), CentralDiff(loss, &feat(k, s), 1e-6), 1e-7), 1e-5);
    }
  }
  for (int r = 0; r < rays; ++r) {
    for (int a = 0; a < 3; ++a) {
      EXPECT_LT(RelErr(d_dirs(a, r), CentralDiff(loss, &dirs(a, r), 1e-6), 1e-7), 1e-5);
    }
  }
}

}  // namespace
}  // namespace hmcal
