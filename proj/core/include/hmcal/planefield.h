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

#ifndef HMCAL_PLANEFIELD_H_
#define HMCAL_PLANEFIELD_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hmcal/rng.h"

namespace hmcal {

// Six planes per level, indexed as below. Space-time planes share the time
// resolution; their first axis is spatial.
enum PlaneIndex : int { kPlaneXY = 0, kPlaneYZ, kPlaneZX, kPlaneXT, kPlaneYT, kPlaneZT };
inline constexpr int kNumPlanes = 6;
// Coordinate index (x=0, y=1, z=2, t=3) of the (row, col) axes of each plane.
inline constexpr int kPlaneAxes[kNumPlanes][2] = {
    {0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};

inline bool IsSpaceTimePlane(int plane) { return plane >= kPlaneXT; }

struct Aabb {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(-1.0);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(1.0);
};

struct PlaneFieldConfig {
  std::vector<int> spatial_resolution = {8, 16};
  int time_resolution = 16;
  int feature_dim = 16;
  Aabb bounds;
};

void ValidateFieldConfig(const PlaneFieldConfig& config);

struct PlaneLayout {
  int rows = 0;  // nodes along the first axis
  int cols = 0;  // nodes along the second axis
  size_t offset = 0;
};

// Multiresolution factorized 4D feature field. All plane entries live in one
// flat parameter vector; plane (level, p) stores node (r, c) feature k at
// offset + (r * cols + c) * F + k. Grid nodes sit on the box corners
// (normalized coordinate u maps to node position u * (n - 1)).
class PlaneField {
 public:
  explicit PlaneField(PlaneFieldConfig config);

  const PlaneFieldConfig& config() const { return config_; }
  int num_levels() const { return static_cast<int>(config_.spatial_resolution.size()); }
  int feature_dim() const { return config_.feature_dim; }
  int fused_dim() const { return num_levels() * feature_dim(); }
  const PlaneLayout& layout(int level, int plane) const {
    return layouts_[level * kNumPlanes + plane];
  }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::span<double> plane(int level, int plane);
  std::span<const double> plane(int level, int plane) const;

  // Space-only planes uniform in [-space_range, space_range], space-time
  // planes exactly 1.
  void InitDefault(Rng& rng, double space_range = 0.1);
  void Fill(double value);

  // Maps a world point and normalized time to [0,1]^4, clamping; `clamped`
  // marks coordinates that were outside.
  Eigen::Vector4d Normalize(const Eigen::Vector3d& x, double t,
                            std::array<bool, 4>* clamped = nullptr) const;

 private:
  PlaneFieldConfig config_;
  std::vector<PlaneLayout> layouts_;
  std::vector<double> params_;
};

// Hadamard product over the six planes of bilinearly interpolated features at
// level `level` (0-based). Out-of-range points are clamped to the box.
Eigen::VectorXd SamplePlaneFeatures(const PlaneField& field,
                                    const Eigen::Vector3d& x, double t,
                                    int level);

// Weighted concatenation of all level features.
Eigen::VectorXd FuseFeatures(const PlaneField& field, const Eigen::Vector3d& x,
                             double t, std::span<const double> level_weights);

// Batched feature evaluation that keeps what the backward pass needs.
class FieldEncoder {
 public:
  explicit FieldEncoder(const PlaneField& field) : field_(field) {}

  // points: 3 x S world positions; times: S normalized times. Returns the
  // fused (L*F) x S feature matrix.
  const Eigen::MatrixXd& Forward(const Eigen::Matrix3Xd& points,
                                 std::span<const double> times,
                                 std::span<const double> level_weights);

  // Accumulates d loss / d plane entries into `field_grad` (same layout as
  // params) and writes d loss / d point (3 x S) and d loss / d time (S).
  void Backward(const Eigen::MatrixXd& d_features, std::vector<double>* field_grad,
                Eigen::Matrix3Xd* d_points, std::vector<double>* d_times) const;

 private:
  struct Corner {
    size_t base = 0;       // entry offset of node (r0, c0)
    size_t row_step = 0;   // entry stride to r0 + 1
    size_t col_step = 0;   // entry stride to c0 + 1
    double fr = 0.0;
    double fc = 0.0;
  };

  const PlaneField& field_;
  int count_ = 0;
  std::vector<double> level_weights_;
  std::vector<std::array<bool, 4>> clamped_;
  std::vector<Corner> corners_;     // [s][level][plane]
  std::vector<double> plane_vals_;  // [s][level][plane][F]
  Eigen::MatrixXd features_;
};

// Initializes level `level` (0-based, >= 1) from level - 1 by bilinear
// interpolation at the finer node positions. Level 0 is left untouched.
void UpsampleInit(PlaneField* field, int level);

}  // namespace hmcal

#endif  // HMCAL_PLANEFIELD_H_
