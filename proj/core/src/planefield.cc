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

#include "hmcal/planefield.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hmcal/error.h"

namespace hmcal {
namespace {

int AxisResolution(const PlaneFieldConfig& config, int level, int axis) {
  return axis == 3 ? config.time_resolution : config.spatial_resolution[level];
}

// Node position along an axis with n nodes: cell index and fraction, with the
// last cell absorbing u == 1.
inline void Locate(double u, int n, int* cell, double* frac) {
  const double pos = u * (n - 1);
  int c = static_cast<int>(pos);
  if (c > n - 2) c = n - 2;
  *cell = c;
  *frac = pos - c;
}

}  // namespace

void ValidateFieldConfig(const PlaneFieldConfig& config) {
  if (config.spatial_resolution.empty()) {
    Fail(ErrorKind::kConfig, "plane field needs at least one level");
  }
  for (int r : config.spatial_resolution) {
    if (r < 2) Fail(ErrorKind::kConfig, "spatial resolution must be >= 2");
  }
  if (config.time_resolution < 2) {
    Fail(ErrorKind::kConfig, "time resolution must be >= 2");
  }
  if (config.feature_dim < 1) Fail(ErrorKind::kConfig, "feature_dim must be >= 1");
  if (!((config.bounds.hi - config.bounds.lo).minCoeff() > 0.0)) {
    Fail(ErrorKind::kConfig, "scene bounds must have positive extent");
  }
}

PlaneField::PlaneField(PlaneFieldConfig config) : config_(std::move(config)) {
  ValidateFieldConfig(config_);
  size_t offset = 0;
  for (int l = 0; l < num_levels(); ++l) {
    for (int p = 0; p < kNumPlanes; ++p) {
      PlaneLayout layout;
      layout.rows = AxisResolution(config_, l, kPlaneAxes[p][0]);
      layout.cols = AxisResolution(config_, l, kPlaneAxes[p][1]);
      layout.offset = offset;
      offset += static_cast<size_t>(layout.rows) * layout.cols *
                config_.feature_dim;
      layouts_.push_back(layout);
    }
  }
  params_.assign(offset, 0.0);
}

std::span<double> PlaneField::plane(int level, int p) {
  const PlaneLayout& l = layout(level, p);
  return {params_.data() + l.offset,
          static_cast<size_t>(l.rows) * l.cols * config_.feature_dim};
}

std::span<const double> PlaneField::plane(int level, int p) const {
  const PlaneLayout& l = layout(level, p);
  return {params_.data() + l.offset,
          static_cast<size_t>(l.rows) * l.cols * config_.feature_dim};
}

void PlaneField::InitDefault(Rng& rng, double space_range) {
  for (int l = 0; l < num_levels(); ++l) {
    for (int p = 0; p < kNumPlanes; ++p) {
      for (double& v : plane(l, p)) {
        v = IsSpaceTimePlane(p) ? 1.0 : rng.Uniform(-space_range, space_range);
      }
    }
  }
}

void PlaneField::Fill(double value) {
  std::fill(params_.begin(), params_.end(), value);
}

Eigen::Vector4d PlaneField::Normalize(const Eigen::Vector3d& x, double t,
                                      std::array<bool, 4>* clamped) const {
  Eigen::Vector4d u;
  for (int a = 0; a < 3; ++a) {
    u(a) = (x(a) - config_.bounds.lo(a)) /
           (config_.bounds.hi(a) - config_.bounds.lo(a));
  }
  u(3) = t;
  for (int a = 0; a < 4; ++a) {
    const bool out = !(u(a) >= 0.0 && u(a) <= 1.0);
    if (clamped) (*clamped)[a] = out;
    if (out) u(a) = u(a) > 1.0 ? 1.0 : 0.0;
  }
  return u;
}

Eigen::VectorXd SamplePlaneFeatures(const PlaneField& field,
                                    const Eigen::Vector3d& x, double t,
                                    int level) {
  if (level < 0 || level >= field.num_levels()) {
    Fail(ErrorKind::kInput, "level out of range");
  }
  const int f = field.feature_dim();
  const Eigen::Vector4d u = field.Normalize(x, t);
  Eigen::VectorXd out = Eigen::VectorXd::Ones(f);
  for (int p = 0; p < kNumPlanes; ++p) {
    const PlaneLayout& lay = field.layout(level, p);
    int r0;
    int c0;
    double fr;
    double fc;
    Locate(u(kPlaneAxes[p][0]), lay.rows, &r0, &fr);
    Locate(u(kPlaneAxes[p][1]), lay.cols, &c0, &fc);
    const double* base =
        field.params().data() + lay.offset + (static_cast<size_t>(r0) * lay.cols + c0) * f;
    const size_t rs = static_cast<size_t>(lay.cols) * f;
    for (int k = 0; k < f; ++k) {
      const double g = (1 - fr) * (1 - fc) * base[k] + fr * (1 - fc) * base[rs + k] +
                       (1 - fr) * fc * base[f + k] + fr * fc * base[rs + f + k];
      out(k) *= g;
    }
  }
  return out;
}

Eigen::VectorXd FuseFeatures(const PlaneField& field, const Eigen::Vector3d& x,
                             double t, std::span<const double> level_weights) {
  const int f = field.feature_dim();
  Eigen::VectorXd out(field.fused_dim());
  for (int l = 0; l < field.num_levels(); ++l) {
    out.segment(l * f, f) = level_weights[l] * SamplePlaneFeatures(field, x, t, l);
  }
  return out;
}

const Eigen::MatrixXd& FieldEncoder::Forward(
    const Eigen::Matrix3Xd& points, std::span<const double> times,
    std::span<const double> level_weights) {
  const int f = field_.feature_dim();
  const int levels = field_.num_levels();
  count_ = static_cast<int>(points.cols());
  level_weights_.assign(level_weights.begin(), level_weights.end());
  clamped_.resize(count_);
  corners_.resize(static_cast<size_t>(count_) * levels * kNumPlanes);
  plane_vals_.resize(static_cast<size_t>(count_) * levels * kNumPlanes * f);
  features_.resize(levels * f, count_);
  const double* params = field_.params().data();

  for (int s = 0; s < count_; ++s) {
    const Eigen::Vector4d u = field_.Normalize(points.col(s), times[s], &clamped_[s]);
    for (int l = 0; l < levels; ++l) {
      double* feat = features_.col(s).data() + l * f;
      if (level_weights_[l] == 0.0) {
        std::fill(feat, feat + f, 0.0);
        continue;
      }
      std::fill(feat, feat + f, 1.0);
      for (int p = 0; p < kNumPlanes; ++p) {
        const PlaneLayout& lay = field_.layout(l, p);
        const size_t idx = (static_cast<size_t>(s) * levels + l) * kNumPlanes + p;
        Corner& c = corners_[idx];
        int r0;
        int c0;
        Locate(u(kPlaneAxes[p][0]), lay.rows, &r0, &c.fr);
        Locate(u(kPlaneAxes[p][1]), lay.cols, &c0, &c.fc);
        c.base = lay.offset + (static_cast<size_t>(r0) * lay.cols + c0) * f;
        c.row_step = static_cast<size_t>(lay.cols) * f;
        c.col_step = f;
        const double w00 = (1 - c.fr) * (1 - c.fc);
        const double w10 = c.fr * (1 - c.fc);
        const double w01 = (1 - c.fr) * c.fc;
        const double w11 = c.fr * c.fc;
        const double* p00 = params + c.base;
        const double* p10 = p00 + c.row_step;
        const double* p01 = p00 + c.col_step;
        const double* p11 = p10 + c.col_step;
        double* vals = plane_vals_.data() + idx * f;
        for (int k = 0; k < f; ++k) {
          vals[k] = w00 * p00[k] + w10 * p10[k] + w01 * p01[k] + w11 * p11[k];
          feat[k] *= vals[k];
        }
      }
      for (int k = 0; k < f; ++k) feat[k] *= level_weights_[l];
    }
  }
  return features_;
}

void FieldEncoder::Backward(const Eigen::MatrixXd& d_features,
                            std::vector<double>* field_grad,
                            Eigen::Matrix3Xd* d_points,
                            std::vector<double>* d_times) const {
  const int f = field_.feature_dim();
  const int levels = field_.num_levels();
  const double* params = field_.params().data();
  double* grad = field_grad ? field_grad->data() : nullptr;
  if (d_points) d_points->setZero(3, count_);
  if (d_times) d_times->assign(count_, 0.0);
  Eigen::Vector3d inv_extent;
  for (int a = 0; a < 3; ++a) {
    inv_extent(a) = 1.0 / (field_.config().bounds.hi(a) - field_.config().bounds.lo(a));
  }
  std::vector<double> df(f);
  std::vector<double> dg(f);

  for (int s = 0; s < count_; ++s) {
    Eigen::Vector4d du = Eigen::Vector4d::Zero();
    for (int l = 0; l < levels; ++l) {
      const double w = level_weights_[l];
      if (w == 0.0) continue;
      for (int k = 0; k < f; ++k) df[k] = w * d_features(l * f + k, s);
      const size_t first = (static_cast<size_t>(s) * levels + l) * kNumPlanes;
      const double* vals = plane_vals_.data() + first * f;
      for (int p = 0; p < kNumPlanes; ++p) {
        // d f_l / d g_p = product of the other five planes.
        for (int k = 0; k < f; ++k) {
          double others = 1.0;
          for (int q = 0; q < kNumPlanes; ++q) {
            if (q != p) others *= vals[q * f + k];
          }
          dg[k] = df[k] * others;
        }
        const Corner& c = corners_[first + p];
        const PlaneLayout& lay = field_.layout(l, p);
        const double* p00 = params + c.base;
        const double* p10 = p00 + c.row_step;
        const double* p01 = p00 + c.col_step;
        const double* p11 = p10 + c.col_step;
        double d_fr = 0.0;
        double d_fc = 0.0;
        for (int k = 0; k < f; ++k) {
          d_fr += dg[k] * ((1 - c.fc) * (p10[k] - p00[k]) + c.fc * (p11[k] - p01[k]));
          d_fc += dg[k] * ((1 - c.fr) * (p01[k] - p00[k]) + c.fr * (p11[k] - p10[k]));
        }
        du(kPlaneAxes[p][0]) += d_fr * (lay.rows - 1);
        du(kPlaneAxes[p][1]) += d_fc * (lay.cols - 1);
        if (grad) {
          const double w00 = (1 - c.fr) * (1 - c.fc);
          const double w10 = c.fr * (1 - c.fc);
          const double w01 = (1 - c.fr) * c.fc;
          const double w11 = c.fr * c.fc;
          double* g00 = grad + c.base;
          double* g10 = g00 + c.row_step;
          double* g01 = g00 + c.col_step;
          double* g11 = g10 + c.col_step;
          for (int k = 0; k < f; ++k) {
            g00[k] += w00 * dg[k];
            g10[k] += w10 * dg[k];
            g01[k] += w01 * dg[k];
            g11[k] += w11 * dg[k];
          }
        }
      }
    }
    for (int a = 0; a < 4; ++a) {
      if (clamped_[s][a]) du(a) = 0.0;
    }
    if (d_points) {
      for (int a = 0; a < 3; ++a) (*d_points)(a, s) = du(a) * inv_extent(a);
    }
    if (d_times) (*d_times)[s] = du(3);
  }
}

void UpsampleInit(PlaneField* field, int level) {
  if (level <= 0) return;
  if (level >= field->num_levels()) Fail(ErrorKind::kInput, "level out of range");
  const int f = field->feature_dim();
  for (int p = 0; p < kNumPlanes; ++p) {
    const PlaneLayout& coarse = field->layout(level - 1, p);
    const PlaneLayout& fine = field->layout(level, p);
    const double* src = field->params().data() + coarse.offset;
    double* dst = field->params().data() + fine.offset;
    for (int r = 0; r < fine.rows; ++r) {
      // Exact rational node position keeps shared nodes exact.
      const double pr = static_cast<double>(r * (coarse.rows - 1)) / (fine.rows - 1);
      int r0 = std::min(static_cast<int>(pr), coarse.rows - 2);
      const double fr = pr - r0;
      for (int c = 0; c < fine.cols; ++c) {
        const double pc = static_cast<double>(c * (coarse.cols - 1)) / (fine.cols - 1);
        int c0 = std::min(static_cast<int>(pc), coarse.cols - 2);
        const double fc = pc - c0;
        const double* p00 = src + (static_cast<size_t>(r0) * coarse.cols + c0) * f;
        const double* p10 = p00 + static_cast<size_t>(coarse.cols) * f;
        const double* p01 = p00 + f;
        const double* p11 = p10 + f;
        double* out = dst + (static_cast<size_t>(r) * fine.cols + c) * f;
        for (int k = 0; k < f; ++k) {
          out[k] = (1 - fr) * (1 - fc) * p00[k] + fr * (1 - fc) * p10[k] +
                   (1 - fr) * fc * p01[k] + fr * fc * p11[k];
        }
      }
    }
  }
}

}  // namespace hmcal
