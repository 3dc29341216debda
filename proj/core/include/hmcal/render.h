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

#ifndef HMCAL_RENDER_H_
#define HMCAL_RENDER_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "hmcal/decoders.h"
#include "hmcal/planefield.h"
#include "hmcal/posealign.h"

namespace hmcal {

struct RenderConfig {
  int samples = 32;
  double near = 1.0;
  double far = 5.0;
  Eigen::Vector3d background = Eigen::Vector3d::Ones();
  bool jitter = true;
};

void ValidateRenderConfig(const RenderConfig& config);

struct Ray {
  Eigen::Vector3d origin;
  Eigen::Vector3d direction;  // unit length
};

// Ray through pixel coordinates (px, py); pixel (x, y) has its center at
// (x + 0.5, y + 0.5).
Ray GenerateRay(const CameraPose& pose, const Intrinsics& intrinsics, double px,
                double py);

// Rays with a normalized field time each. `jitter` holds one value in [0, 1)
// per ray sample (rays x samples, ray-major); empty means sample midpoints.
struct RayBatch {
  Eigen::Matrix3Xd origins;
  Eigen::Matrix3Xd directions;
  std::vector<double> times;
  std::vector<double> jitter;

  int size() const { return static_cast<int>(origins.cols()); }
  void Resize(int n);
  void Set(int i, const Ray& ray, double time);
};

struct RenderOutput {
  Eigen::Matrix3Xd rgb;
  Eigen::VectorXd transmittance;  // after the last sample
  Eigen::MatrixXd weights;        // samples x rays, filled on request
};

struct RenderParams {
  const PlaneField* field = nullptr;
  const Decoders* decoders = nullptr;
  std::span<const double> level_weights;
  RenderConfig config;
  int threads = 1;
};

RenderOutput RenderBatch(const RenderParams& params, const RayBatch& batch,
                         bool want_weights = false);

struct RenderGradients {
  std::vector<double> field;      // same layout as PlaneField::params
  std::vector<double> decoders;   // same layout as Decoders::params
  Eigen::Matrix3Xd d_origins;     // 3 x rays
  Eigen::Matrix3Xd d_directions;  // 3 x rays
  Eigen::VectorXd d_times;        // rays
};

struct LossTerms {
  double photometric = 0.0;
  double density_mean = 0.0;
};

// Mean squared L2 color error over the batch plus `density_weight` times the
// mean density over all ray samples. Gradients are accumulated in a fixed
// chunk order, so results do not depend on the thread count. `grads` may be
// null.
LossTerms LossAndGradients(const RenderParams& params, const RayBatch& batch,
                           const Eigen::Matrix3Xd& targets,
                           double density_weight, RenderGradients* grads);

// Mean over pixels of the squared L2 color residual.
double PhotometricLoss(const Eigen::Matrix3Xd& rendered,
                       const Eigen::Matrix3Xd& target);

}  // namespace hmcal

#endif  // HMCAL_RENDER_H_
