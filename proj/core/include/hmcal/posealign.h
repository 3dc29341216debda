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

#ifndef HMCAL_POSEALIGN_H_
#define HMCAL_POSEALIGN_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmcal/skeleton.h"
#include "hmcal/timesync.h"

namespace hmcal {

// x -> scale_dst * R * (x - centroid_src) / scale_src + centroid_dst.
struct SimilarityTransform {
  double scale_src = 1.0;
  double scale_dst = 1.0;
  Eigen::Vector3d centroid_src = Eigen::Vector3d::Zero();
  Eigen::Vector3d centroid_dst = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  Eigen::Vector3d Apply(const Eigen::Vector3d& x) const;
  Eigen::MatrixX3d ApplyRows(const Eigen::MatrixX3d& rows) const;
  double Scale() const { return scale_dst / scale_src; }
  SimilarityTransform Inverse() const;
  // this o other: first `other`, then this.
  SimilarityTransform Compose(const SimilarityTransform& other) const;
  bool IsIdentity() const;

  // Builds x -> scale * R * x + translation.
  static SimilarityTransform FromScaleRotationTranslation(
      double scale, const Eigen::Matrix3d& rotation,
      const Eigen::Vector3d& translation);
};

// Closed-form alignment of corresponded point rows: centroids, RMS scales and
// R = U V^T from the SVD of Y_hat X_hat^T. When det(U V^T) < 0 the last
// singular vector is negated so R is a proper rotation. Needs >= 3 points and
// a cross-covariance of rank >= 2 (coplanar sets are fine, collinear are not).
SimilarityTransform Procrustes(const Eigen::MatrixX3d& src,
                               const Eigen::MatrixX3d& dst);

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
};

// World-to-camera extrinsics: x_cam = R x_world + tau.
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  int timestamp = 0;

  Eigen::Vector3d Center() const { return -rotation.transpose() * translation; }
  static CameraPose FromCenter(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& center, int timestamp = 0);
};

// One pose for a static camera, one per frame for a moving camera.
struct CameraTrajectory {
  std::string camera_id;
  std::vector<CameraPose> poses;
  Intrinsics intrinsics;

  bool IsStatic() const { return poses.size() == 1; }
  // Static cameras ignore `frame`; moving cameras look up the timestamp.
  const CameraPose& PoseAt(int frame) const;
};

void ValidateTrajectory(const CameraTrajectory& traj);

// Transforms mapping each camera's motion frame onto the anchor's. Each
// non-anchor camera stacks global joints of all people over the frames whose
// aligned global time exists in both sequences. Sequences at different frame
// rates are first resampled to the highest rate (the rate of `offsets`).
std::vector<SimilarityTransform> AlignMotions(
    const std::vector<MotionSequence>& seqs, const GlobalOffsets& offsets,
    int anchor, const SkeletonModel& model);

// Maps camera centers through `transform`, composes rotations with R^T and
// recomputes translations. The identity transform returns `traj` unchanged.
CameraTrajectory ApplyToTrajectory(const CameraTrajectory& traj,
                                   const SimilarityTransform& transform);
CameraPose ApplyToPose(const CameraPose& pose,
                       const SimilarityTransform& transform);

}  // namespace hmcal

#endif  // HMCAL_POSEALIGN_H_
