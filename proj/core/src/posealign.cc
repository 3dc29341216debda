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

#include "hmcal/posealign.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "hmcal/error.h"

namespace hmcal {

Eigen::Vector3d SimilarityTransform::Apply(const Eigen::Vector3d& x) const {
  return scale_dst * (rotation * ((x - centroid_src) / scale_src)) +
         centroid_dst;
}

Eigen::MatrixX3d SimilarityTransform::ApplyRows(const Eigen::MatrixX3d& rows) const {
  Eigen::MatrixX3d out(rows.rows(), 3);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    out.row(r) = Apply(Eigen::Vector3d(rows.row(r).transpose())).transpose();
  }
  return out;
}

SimilarityTransform SimilarityTransform::Inverse() const {
  SimilarityTransform inv;
  inv.scale_src = scale_dst;
  inv.scale_dst = scale_src;
  inv.centroid_src = centroid_dst;
  inv.centroid_dst = centroid_src;
  inv.rotation = rotation.transpose();
  return inv;
}

SimilarityTransform SimilarityTransform::Compose(
    const SimilarityTransform& other) const {
  const double s = Scale() * other.Scale();
  const Eigen::Matrix3d r = rotation * other.rotation;
  const Eigen::Vector3d t = Apply(other.Apply(Eigen::Vector3d(Eigen::Vector3d::Zero())));
  return FromScaleRotationTranslation(s, r, t);
}

bool SimilarityTransform::IsIdentity() const {
  return scale_src == scale_dst && centroid_src == centroid_dst &&
         rotation == Eigen::Matrix3d::Identity();
}

SimilarityTransform SimilarityTransform::FromScaleRotationTranslation(
    double scale, const Eigen::Matrix3d& rotation,
    const Eigen::Vector3d& translation) {
  SimilarityTransform t;
  t.scale_src = 1.0;
  t.scale_dst = scale;
  t.rotation = rotation;
  t.centroid_dst = translation;
  return t;
}

SimilarityTransform Procrustes(const Eigen::MatrixX3d& src,
                               const Eigen::MatrixX3d& dst) {
  if (src.rows() != dst.rows()) {
    Fail(ErrorKind::kInput, "Procrustes point sets differ in size: " +
                                std::to_string(src.rows()) + " vs " +
                                std::to_string(dst.rows()));
  }
  const Eigen::Index n = src.rows();
  if (n < 3) {
    Fail(ErrorKind::kDegenerate,
         "Procrustes needs at least 3 points, got " + std::to_string(n));
  }
  SimilarityTransform out;
  out.centroid_src = src.colwise().mean().transpose();
  out.centroid_dst = dst.colwise().mean().transpose();
  const Eigen::MatrixX3d xc = src.rowwise() - out.centroid_src.transpose();
  const Eigen::MatrixX3d yc = dst.rowwise() - out.centroid_dst.transpose();
  out.scale_src = std::sqrt(xc.squaredNorm() / static_cast<double>(n));
  out.scale_dst = std::sqrt(yc.squaredNorm() / static_cast<double>(n));
  if (!(out.scale_src > 0.0) || !(out.scale_dst > 0.0)) {
    Fail(ErrorKind::kDegenerate, "Procrustes point set has zero spread");
  }
  // Y_hat X_hat^T with points as columns.
  const Eigen::Matrix3d cross =
      (yc / out.scale_dst).transpose() * (xc / out.scale_src);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (!(sv(1) > 1e-12 * sv(0))) {
    Fail(ErrorKind::kDegenerate,
         "Procrustes cross-covariance has rank < 2 (collinear points)");
  }
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  out.rotation = u * v.transpose();
  return out;
}

CameraPose CameraPose::FromCenter(const Eigen::Matrix3d& rotation,
                                  const Eigen::Vector3d& center,
                                  int timestamp) {
  CameraPose p;
  p.rotation = rotation;
  p.translation = -rotation * center;
  p.timestamp = timestamp;
  return p;
}

const CameraPose& CameraTrajectory::PoseAt(int frame) const {
  if (poses.empty()) Fail(ErrorKind::kInput, camera_id + " has no poses");
  if (IsStatic()) return poses.front();
  const auto it = std::lower_bound(
      poses.begin(), poses.end(), frame,
      [](const CameraPose& p, int t) { return p.timestamp < t; });
  if (it == poses.end()) return poses.back();
  if (it->timestamp == frame || it == poses.begin()) return *it;
  // Nearest earlier pose for frames missing from the trajectory.
  return *(it - 1);
}

void ValidateTrajectory(const CameraTrajectory& traj) {
  if (traj.poses.empty()) {
    Fail(ErrorKind::kInput, traj.camera_id + ": trajectory has no poses");
  }
  for (size_t k = 1; k < traj.poses.size(); ++k) {
    if (traj.poses[k].timestamp <= traj.poses[k - 1].timestamp) {
      Fail(ErrorKind::kInput,
           traj.camera_id + ": timestamps must be strictly increasing");
    }
  }
  const Intrinsics& in = traj.intrinsics;
  if (!(in.fx > 0.0) || !(in.fy > 0.0) || in.width < 0 || in.height < 0) {
    Fail(ErrorKind::kInput, traj.camera_id + ": invalid intrinsics");
  }
}

std::vector<SimilarityTransform> AlignMotions(
    const std::vector<MotionSequence>& seqs, const GlobalOffsets& offsets,
    int anchor, const SkeletonModel& model) {
  const int n = static_cast<int>(seqs.size());
  if (static_cast<int>(offsets.offsets.size()) != n) {
    Fail(ErrorKind::kInput, "offset count does not match camera count");
  }
  if (anchor < 0 || anchor >= n) Fail(ErrorKind::kInput, "anchor out of range");
  double rate = 0.0;
  for (const auto& s : seqs) rate = std::max(rate, s.fps);

  std::vector<std::vector<Eigen::MatrixX3d>> joints(n);
  for (int i = 0; i < n; ++i) {
    const MotionSequence resampled =
        seqs[i].fps == rate ? seqs[i] : ResampleMotion(seqs[i], rate, model);
    joints[i].reserve(resampled.size());
    for (const auto& f : resampled.frames) {
      joints[i].push_back(FrameGlobalJoints(f, model));
    }
  }

  std::vector<SimilarityTransform> out(n);
  for (int i = 0; i < n; ++i) {
    if (i == anchor) continue;
    // Camera i frame t is global time t - d_i, i.e. anchor frame
    // t - d_i + d_anchor.
    const int shift = offsets.offsets[anchor] - offsets.offsets[i];
    std::vector<int> frames_i;
    for (int t = 0; t < static_cast<int>(joints[i].size()); ++t) {
      const int ta = t + shift;
      if (ta >= 0 && ta < static_cast<int>(joints[anchor].size())) {
        frames_i.push_back(t);
      }
    }
    if (frames_i.empty()) {
      Fail(ErrorKind::kNoOverlap, "cameras " + seqs[i].camera_id + " and " +
                                      seqs[anchor].camera_id +
                                      " share no aligned frames");
    }
    const Eigen::Index rows_per_frame = joints[i][frames_i[0]].rows();
    Eigen::MatrixX3d src(rows_per_frame * frames_i.size(), 3);
    Eigen::MatrixX3d dst(rows_per_frame * frames_i.size(), 3);
    for (size_t k = 0; k < frames_i.size(); ++k) {
      const int t = frames_i[k];
      const Eigen::MatrixX3d& ji = joints[i][t];
      const Eigen::MatrixX3d& ja = joints[anchor][t + shift];
      if (ji.rows() != rows_per_frame || ja.rows() != rows_per_frame) {
        Fail(ErrorKind::kCorrespondence,
             "person count differs between " + seqs[i].camera_id + " and " +
                 seqs[anchor].camera_id);
      }
      src.middleRows(rows_per_frame * k, rows_per_frame) = ji;
      dst.middleRows(rows_per_frame * k, rows_per_frame) = ja;
    }
    out[i] = Procrustes(src, dst);
  }
  return out;
}

CameraPose ApplyToPose(const CameraPose& pose,
                       const SimilarityTransform& transform) {
  const Eigen::Vector3d center = transform.Apply(pose.Center());
  CameraPose out;
  out.rotation = pose.rotation * transform.rotation.transpose();
  out.translation = -out.rotation * center;
  out.timestamp = pose.timestamp;
  return out;
}

CameraTrajectory ApplyToTrajectory(const CameraTrajectory& traj,
                                   const SimilarityTransform& transform) {
  if (transform.IsIdentity()) return traj;
  CameraTrajectory out = traj;
  for (auto& p : out.poses) p = ApplyToPose(p, transform);
  return out;
}

}  // namespace hmcal
