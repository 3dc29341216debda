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

#include "hmcal/error.h"
#include "hmcal/planefield.h"
#include "hmcal/rng.h"
#include "test_util.h"

namespace hmcal {
namespace {

using testing::CentralDiff;
using testing::Gen;
using testing::RelErr;

PlaneFieldConfig SmallConfig() {
  PlaneFieldConfig c;
  c.spatial_resolution = {4, 8};
  c.time_resolution = 4;
  c.feature_dim = 4;
  c.bounds.lo = Eigen::Vector3d(-1.0, -0.5, 0.0);
  c.bounds.hi = Eigen::Vector3d(1.0, 1.5, 2.0);
  return c;
}

PlaneField RandomField(const PlaneFieldConfig& c, Gen& gen) {
  PlaneField f(c);
  for (double& v : f.params()) v = gen.Uniform(0.5, 1.5);
  return f;
}

int AxisNodes(const PlaneFieldConfig& c, int level, int axis) {
  return axis == 3 ? c.time_resolution : c.spatial_resolution[level];
}

// Bilinear lookup written directly from the node definition: node k of an
// n-node axis sits at normalized position k / (n - 1).
double NaivePlane(const PlaneField& f, int level, int plane, int k, double u0, double u1) {
  const PlaneLayout& lay = f.layout(level, plane);
  const auto node = [&](int r, int c) {
    return f.params()[lay.offset + (static_cast<size_t>(r) * lay.cols + c) * f.feature_dim() + k];
  };
  double p0 = u0 * (lay.rows - 1), p1 = u1 * (lay.cols - 1);
  int r0 = std::min(static_cast<int>(std::floor(p0)), lay.rows - 2);
  int c0 = std::min(static_cast<int>(std::floor(p1)), lay.cols - 2);
  const double a = p0 - r0, b = p1 - c0;
  return (1 - a) * (1 - b) * node(r0, c0) + (1 - a) * b * node(r0, c0 + 1) +
         a * (1 - b) * node(r0 + 1, c0) + a * b * node(r0 + 1, c0 + 1);
}

Eigen::VectorXd NaiveLevel(const PlaneField& f, const Eigen::Vector3d& x, double t, int level) {
  const PlaneFieldConfig& c = f.config();
  Eigen::Vector4d u;
  for (int a = 0; a < 3; ++a) {
    u(a) = std::clamp((x(a) - c.bounds.lo(a)) / (c.bounds.hi(a) - c.bounds.lo(a)), 0.0, 1.0);
  }
  u(3) = std::clamp(t, 0.0, 1.0);
  Eigen::VectorXd out = Eigen::VectorXd::Ones(f.feature_dim());
  for (int p = 0; p < kNumPlanes; ++p) {
    for (int k = 0; k < f.feature_dim(); ++k) {
      out(k) *= NaivePlane(f, level, p, k, u(kPlaneAxes[p][0]), u(kPlaneAxes[p][1]));
    }
  }
  return out;
}

Eigen::Vector3d RandomPoint(const PlaneFieldConfig& c, Gen& gen, double pad = 0.0) {
  Eigen::Vector3d x;
  for (int a = 0; a < 3; ++a) x(a) = gen.Uniform(c.bounds.lo(a) - pad, c.bounds.hi(a) + pad);
  return x;
}

TEST(PlaneFieldTest, LayoutIsDenseAndOrdered) {
  const PlaneFieldConfig c = SmallConfig();
  const PlaneField f(c);
  size_t expect = 0;
  for (int l = 0; l < 2; ++l) {
    for (int p = 0; p < kNumPlanes; ++p) {
      const PlaneLayout& lay = f.layout(l, p);
      EXPECT_EQ(lay.offset, expect);
      EXPECT_EQ(lay.rows, AxisNodes(c, l, kPlaneAxes[p][0]));
      EXPECT_EQ(lay.cols, AxisNodes(c, l, kPlaneAxes[p][1]));
      EXPECT_EQ(f.plane(l, p).size(), static_cast<size_t>(lay.rows * lay.cols * 4));
      expect += lay.rows * lay.cols * 4;
    }
  }
  EXPECT_EQ(f.params().size(), expect);
  EXPECT_EQ(f.fused_dim(), 8);
}

TEST(PlaneFieldTest, RejectsInvalidConfigs) {
  PlaneFieldConfig c = SmallConfig();
  c.spatial_resolution = {1};
  EXPECT_THROW(PlaneField{c}, Error);
  c = SmallConfig();
  c.time_resolution = 1;
  EXPECT_THROW(PlaneField{c}, Error);
  c = SmallConfig();
  c.feature_dim = 0;
  EXPECT_THROW(PlaneField{c}, Error);
  c = SmallConfig();
  c.bounds.hi.x() = c.bounds.lo.x();
  EXPECT_THROW(PlaneField{c}, Error);
  c = SmallConfig();
  c.spatial_resolution.clear();
  EXPECT_THROW(PlaneField{c}, Error);
}

TEST(PlaneFieldTest, DefaultInitRanges) {
  PlaneField f(SmallConfig());
  Rng rng(3);
  f.InitDefault(rng);
  for (int l = 0; l < 2; ++l) {
    for (int p = 0; p < kNumPlanes; ++p) {
      for (double v : f.plane(l, p)) {
        if (IsSpaceTimePlane(p)) {
          EXPECT_EQ(v, 1.0);
        } else {
          EXPECT_LE(std::abs(v), 0.1);
        }
      }
    }
  }
}

TEST(PlaneFieldTest, NormalizeClampsAndFlags) {
  const PlaneField f(SmallConfig());
  std::array<bool, 4> clamped;
  Eigen::Vector4d u = f.Normalize(Eigen::Vector3d(0.0, 0.5, 1.0), 0.25, &clamped);
  EXPECT_EQ(u, Eigen::Vector4d(0.5, 0.5, 0.5, 0.25));
  EXPECT_EQ(clamped, (std::array<bool, 4>{false, false, false, false}));
  u = f.Normalize(Eigen::Vector3d(-3.0, 0.5, 9.0), 1.5, &clamped);
  EXPECT_EQ(u, Eigen::Vector4d(0.0, 0.5, 1.0, 1.0));
  EXPECT_EQ(clamped, (std::array<bool, 4>{true, false, true, true}));
}

TEST(PlaneFieldTest, SamplingMatchesNaiveBilinearProduct) {
  Gen gen(71);
  const PlaneFieldConfig c = SmallConfig();
  const PlaneField f = RandomField(c, gen);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Vector3d x = RandomPoint(c, gen, 0.3);
    const double t = gen.Uniform(-0.2, 1.2);
    for (int l = 0; l < 2; ++l) {
      EXPECT_LT((SamplePlaneFeatures(f, x, t, l) - NaiveLevel(f, x, t, l)).norm(), 1e-12);
    }
  }
}

TEST(PlaneFieldTest, NodesReproduceStoredValues) {
  Gen gen(72);
  const PlaneFieldConfig c = SmallConfig();
  PlaneField f(c);
  f.Fill(1.0);
  // Only plane XY of level 1 varies; at its nodes the product equals the entry.
  const PlaneLayout& lay = f.layout(1, kPlaneXY);
  for (double& v : f.plane(1, kPlaneXY)) v = gen.Uniform(-2, 2);
  for (int r = 0; r < lay.rows; ++r) {
    for (int col = 0; col < lay.cols; ++col) {
      const Eigen::Vector3d x(c.bounds.lo.x() + 2.0 * r / (lay.rows - 1),
                              c.bounds.lo.y() + 2.0 * col / (lay.cols - 1), 0.7);
      const Eigen::VectorXd feat = SamplePlaneFeatures(f, x, 0.3, 1);
      for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(feat(k), f.plane(1, kPlaneXY)[(r * lay.cols + col) * 4 + k], 1e-12);
      }
    }
  }
}

TEST(PlaneFieldTest, FuseConcatenatesWeightedLevels) {
  Gen gen(73);
  const PlaneFieldConfig c = SmallConfig();
  const PlaneField f = RandomField(c, gen);
  const Eigen::Vector3d x = RandomPoint(c, gen);
  const std::vector<double> w = {0.3, 0.8};
  const Eigen::VectorXd fused = FuseFeatures(f, x, 0.4, w);
  ASSERT_EQ(fused.size(), 8);
  EXPECT_LT((fused.head(4) - 0.3 * NaiveLevel(f, x, 0.4, 0)).norm(), 1e-12);
  EXPECT_LT((fused.tail(4) - 0.8 * NaiveLevel(f, x, 0.4, 1)).norm(), 1e-12);
}

TEST(FieldEncoderTest, ForwardMatchesPointwiseFusion) {
  Gen gen(74);
  const PlaneFieldConfig c = SmallConfig();
  const PlaneField f = RandomField(c, gen);
  const int s = 37;
  Eigen::Matrix3Xd pts(3, s);
  std::vector<double> times(s);
  for (int i = 0; i < s; ++i) {
    pts.col(i) = RandomPoint(c, gen, 0.2);
    times[i] = gen.Uniform(-0.1, 1.1);
  }
  const std::vector<double> w = {1.0, 0.0};
  FieldEncoder enc(f);
  const Eigen::MatrixXd feat = enc.Forward(pts, times, w);
  for (int i = 0; i < s; ++i) {
    EXPECT_LT((feat.col(i) - FuseFeatures(f, pts.col(i), times[i], w)).norm(), 1e-12);
  }
}

TEST(FieldEncoderTest, BackwardMatchesFiniteDifferences) {
  Gen gen(75);
  const PlaneFieldConfig c = SmallConfig();
  PlaneField f = RandomField(c, gen);
  const int s = 6;
  Eigen::Matrix3Xd pts(3, s);
  std::vector<double> times(s);
  for (int i = 0; i < s; ++i) {
    pts.col(i) = RandomPoint(c, gen);
    times[i] = gen.Uniform(0.05, 0.95);
  }
  const std::vector<double> w = {0.7, 0.4};
  const Eigen::MatrixXd g = gen.Matrix(8, s);
  const auto loss = [&]() {
    FieldEncoder e(f);
    return (e.Forward(pts, times, w).array() * g.array()).sum();
  };
  FieldEncoder enc(f);
  enc.Forward(pts, times, w);
  std::vector<double> grad(f.params().size(), 0.0);
  Eigen::Matrix3Xd d_pts;
  std::vector<double> d_times;
  enc.Backward(g, &grad, &d_pts, &d_times);

  const double h = 1e-6;
  for (size_t i = 0; i < f.params().size(); ++i) {
    if (grad[i] == 0.0 && gen.Uniform() > 0.05) continue;
    const double fd = CentralDiff(loss, &f.params()[i], h);
    EXPECT_LT(RelErr(grad[i], fd, 1e-6), 1e-4) << "param " << i;
  }
  for (int i = 0; i < s; ++i) {
    for (int a = 0; a < 3; ++a) {
      const double fd = CentralDiff(loss, &pts(a, i), h);
      EXPECT_LT(RelErr(d_pts(a, i), fd, 1e-6), 1e-4);
    }
    const double fd = CentralDiff(loss, &times[i], h);
    EXPECT_LT(RelErr(d_times[i], fd, 1e-6), 1e-4);
  }
}

TEST(FieldEncoderTest, ClampedCoordinatesHaveZeroGradient) {
  Gen gen(76);
  const PlaneFieldConfig c = SmallConfig();
  const PlaneField f = RandomField(c, gen);
  Eigen::Matrix3Xd pts(3, 1);
  pts.col(0) = Eigen::Vector3d(5.0, 0.5, -4.0);
  std::vector<double> times = {1.7};
  FieldEncoder enc(f);
  enc.Forward(pts, times, std::vector<double>{1.0, 1.0});
  std::vector<double> grad(f.params().size(), 0.0);
  Eigen::Matrix3Xd d_pts;
  std::vector<double> d_times;
  enc.Backward(Eigen::MatrixXd::Ones(8, 1), &grad, &d_pts, &d_times);
  EXPECT_EQ(d_pts(0, 0), 0.0);
  EXPECT_NE(d_pts(1, 0), 0.0);
  EXPECT_EQ(d_pts(2, 0), 0.0);
  EXPECT_EQ(d_times[0], 0.0);
}

TEST(UpsampleTest, FineNodesInterpolateTheCoarseLevel) {
  Gen gen(77);
  PlaneFieldConfig c = SmallConfig();
  c.spatial_resolution = {3, 7, 12};
  PlaneField f = RandomField(c, gen);
  const std::vector<double> before(f.params());
  UpsampleInit(&f, 2);
  for (int p = 0; p < kNumPlanes; ++p) {
    const PlaneLayout& fine = f.layout(2, p);
    for (int r = 0; r < fine.rows; ++r) {
      for (int col = 0; col < fine.cols; ++col) {
        const double u0 = static_cast<double>(r) / (fine.rows - 1);
        const double u1 = static_cast<double>(col) / (fine.cols - 1);
        for (int k = 0; k < c.feature_dim; ++k) {
          EXPECT_NEAR(f.plane(2, p)[(r * fine.cols + col) * c.feature_dim + k],
                      NaivePlane(f, 1, p, k, u0, u1), 1e-12);
        }
      }
    }
  }
  // Lower levels are untouched.
  for (size_t i = 0; i < f.layout(2, 0).offset; ++i) EXPECT_EQ(f.params()[i], before[i]);
}

TEST(UpsampleTest, FineLevelReproducesCoarseFunctionOnNestedGrids) {
  Gen gen(78);
  PlaneFieldConfig c = SmallConfig();
  c.spatial_resolution = {3, 5};  // fine nodes include every coarse node
  PlaneField f = RandomField(c, gen);
  UpsampleInit(&f, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d x = RandomPoint(c, gen);
    const double t = gen.Uniform();
    EXPECT_LT((SamplePlaneFeatures(f, x, t, 1) - SamplePlaneFeatures(f, x, t, 0)).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace hmcal
