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

#include "hmcal/skeleton.h"

#include <cmath>
#include <string>

#include "hmcal/error.h"
#include "hmcal/so3.h"

namespace hmcal {
namespace {

constexpr std::array<const char*, kNumJoints> kJointNames = {
    "pelvis",         "left_hip",       "right_hip",  "spine1",
    "left_knee",      "right_knee",     "spine2",     "left_ankle",
    "right_ankle",    "spine3",         "left_foot",  "right_foot",
    "neck",           "left_collar",    "right_collar", "head",
    "left_shoulder",  "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist",     "right_wrist"};

// Bone groups driving the shape coefficients 1..3.
enum BoneGroup { kTorso = 0, kLegs = 1, kArms = 2 };

SkeletonModel MakeDefault() {
  const std::array<int, kNumJoints> parents = {
      -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19};
  // x: left, y: forward, z: up.
  const std::array<Eigen::Vector3d, kNumJoints> offsets = {
      Eigen::Vector3d(0.0, 0.0, 0.0),       // pelvis
      Eigen::Vector3d(0.09, 0.0, -0.08),    // left_hip
      Eigen::Vector3d(-0.09, 0.0, -0.08),   // right_hip
      Eigen::Vector3d(0.0, -0.02, 0.12),    // spine1
      Eigen::Vector3d(0.01, 0.0, -0.38),    // left_knee
      Eigen::Vector3d(-0.01, 0.0, -0.38),   // right_knee
      Eigen::Vector3d(0.0, 0.0, 0.13),      // spine2
      Eigen::Vector3d(0.0, -0.02, -0.40),   // left_ankle
      Eigen::Vector3d(0.0, -0.02, -0.40),   // right_ankle
      Eigen::Vector3d(0.0, 0.01, 0.05),     // spine3
      Eigen::Vector3d(0.0, 0.12, -0.05),    // left_foot
      Eigen::Vector3d(0.0, 0.12, -0.05),    // right_foot
      Eigen::Vector3d(0.0, -0.01, 0.21),    // neck
      Eigen::Vector3d(0.07, 0.0, 0.12),     // left_collar
      Eigen::Vector3d(-0.07, 0.0, 0.12),    // right_collar
      Eigen::Vector3d(0.0, 0.04, 0.09),     // head
      Eigen::Vector3d(0.11, 0.0, 0.03),     // left_shoulder
      Eigen::Vector3d(-0.11, 0.0, 0.03),    // right_shoulder
      Eigen::Vector3d(0.26, 0.0, 0.0),      // left_elbow
      Eigen::Vector3d(-0.26, 0.0, 0.0),     // right_elbow
      Eigen::Vector3d(0.25, 0.0, 0.0),      // left_wrist
      Eigen::Vector3d(-0.25, 0.0, 0.0),     // right_wrist
  };
  const std::array<BoneGroup, kNumJoints> groups = {
      kTorso, kLegs, kLegs, kTorso, kLegs, kLegs, kTorso, kLegs,
      kLegs,  kTorso, kLegs, kLegs, kTorso, kArms, kArms, kTorso,
      kArms,  kArms,  kArms, kArms, kArms,  kArms};
  Eigen::Matrix<double, kNumJoints, kNumShapeCoeffs> shape_map;
  shape_map.setZero();
  for (int j = 0; j < kNumJoints; ++j) {
    shape_map(j, 0) = 0.05;  // overall stature
    shape_map(j, 1 + groups[j]) = 0.05;
  }
  return SkeletonModel(parents, offsets, shape_map);
}

void CheckStateCount(const MotionFrame& frame, const char* what) {
  if (frame.joints_only()) {
    Fail(ErrorKind::kInput, std::string("joints-only frame lacks ") + what +
                                " joints");
  }
}

Eigen::MatrixX3d StackJoints(const std::vector<HumanState>& states,
                             const SkeletonModel& model, bool global) {
  Eigen::MatrixX3d out(kNumJoints * static_cast<int>(states.size()), 3);
  for (size_t k = 0; k < states.size(); ++k) {
    const JointSet js = global ? GlobalJoints(states[k], model)
                               : CanonicalJoints(states[k], model);
    out.middleRows(kNumJoints * static_cast<int>(k), kNumJoints) =
        js.positions;
  }
  return out;
}

}  // namespace

std::array<Eigen::Vector3d, kNumJoints> HumanState::MakeZeroPose() {
  std::array<Eigen::Vector3d, kNumJoints> pose;
  for (auto& r : pose) r.setZero();
  return pose;
}

const SkeletonModel& SkeletonModel::Default() {
  static const SkeletonModel model = MakeDefault();
  return model;
}

SkeletonModel::SkeletonModel(
    std::array<int, kNumJoints> parents,
    std::array<Eigen::Vector3d, kNumJoints> rest_offsets,
    Eigen::Matrix<double, kNumJoints, kNumShapeCoeffs> shape_map)
    : parents_(parents), rest_offsets_(rest_offsets), shape_map_(shape_map) {
  if (parents_[0] != -1) Fail(ErrorKind::kConfig, "joint 0 must be the root");
  for (int j = 1; j < kNumJoints; ++j) {
    if (parents_[j] < 0 || parents_[j] >= j) {
      Fail(ErrorKind::kConfig,
           "parent of joint " + std::to_string(j) + " must precede it");
    }
  }
}

double SkeletonModel::BoneScale(
    int joint, const std::array<double, kNumShapeCoeffs>& shape) const {
  double s = 1.0;
  for (int m = 0; m < kNumShapeCoeffs; ++m) s += shape_map_(joint, m) * shape[m];
  return s;
}

const char* SkeletonModel::JointName(int joint) { return kJointNames[joint]; }

Eigen::Matrix<double, kNumJoints, 3> SkeletonModel::Pose(
    const Eigen::Vector3d& root_rotation,
    const std::array<Eigen::Vector3d, kNumJoints>& body_pose,
    const std::array<double, kNumShapeCoeffs>& shape) const {
  std::array<Eigen::Matrix3d, kNumJoints> rot;
  Eigen::Matrix<double, kNumJoints, 3> pos;
  rot[0] = so3::Exp(root_rotation) * so3::Exp(body_pose[0]);
  pos.row(0).setZero();
  for (int j = 1; j < kNumJoints; ++j) {
    const int p = parents_[j];
    rot[j] = rot[p] * so3::Exp(body_pose[j]);
    pos.row(j) = pos.row(p) +
                 (rot[p] * (BoneScale(j, shape) * rest_offsets_[j])).transpose();
  }
  return pos;
}

JointSet CanonicalJoints(const HumanState& state, const SkeletonModel& model) {
  JointSet out;
  out.frame = JointFrame::kCanonical;
  out.positions =
      model.Pose(Eigen::Vector3d::Zero(), state.body_pose, state.shape);
  return out;
}

JointSet GlobalJoints(const HumanState& state, const SkeletonModel& model) {
  JointSet out = CanonicalJoints(state, model);
  out.frame = JointFrame::kGlobal;
  const Eigen::Matrix3d r = so3::Exp(state.root_orientation);
  out.positions = (out.positions * r.transpose()).rowwise() +
                  state.root_position.transpose();
  return out;
}

Eigen::MatrixX3d FrameCanonicalJoints(const MotionFrame& frame,
                                      const SkeletonModel& model) {
  if (frame.joints_canonical) return *frame.joints_canonical;
  CheckStateCount(frame, "canonical");
  return StackJoints(frame.states, model, /*global=*/false);
}

Eigen::MatrixX3d FrameGlobalJoints(const MotionFrame& frame,
                                   const SkeletonModel& model) {
  if (frame.joints_global) return *frame.joints_global;
  CheckStateCount(frame, "global");
  return StackJoints(frame.states, model, /*global=*/true);
}

double StateDistance(const std::vector<HumanState>& a,
                     const std::vector<HumanState>& b,
                     const SkeletonModel& model) {
  if (a.size() != b.size()) {
    Fail(ErrorKind::kCorrespondence,
         "state lists hold " + std::to_string(a.size()) + " and " +
             std::to_string(b.size()) + " people");
  }
  return (StackJoints(a, model, false) - StackJoints(b, model, false)).norm();
}

MotionSequence ResampleMotion(const MotionSequence& seq, double target_fps,
                              const SkeletonModel& model) {
  if (!(target_fps >= seq.fps)) {
    Fail(ErrorKind::kUnsupported,
         "downsampling from " + std::to_string(seq.fps) + " to " +
             std::to_string(target_fps) + " fps is not supported");
  }
  if (target_fps == seq.fps || seq.frames.empty()) {
    MotionSequence same = seq;
    same.fps = target_fps;
    return same;
  }
  const int m = seq.size();
  std::vector<Eigen::MatrixX3d> canon(m);
  std::vector<Eigen::MatrixX3d> global(m);
  for (int i = 0; i < m; ++i) {
    canon[i] = FrameCanonicalJoints(seq.frames[i], model);
    global[i] = FrameGlobalJoints(seq.frames[i], model);
  }
  MotionSequence out;
  out.camera_id = seq.camera_id;
  out.fps = target_fps;
  out.num_humans = seq.num_humans;
  // Largest k with k * fps / target <= m - 1, with slack for rounding.
  const int count =
      static_cast<int>(std::floor((m - 1) * target_fps / seq.fps + 1e-9)) + 1;
  out.frames.resize(count);
  for (int k = 0; k < count; ++k) {
    const double src = k * seq.fps / target_fps;
    int i0 = static_cast<int>(std::floor(src));
    double frac = src - i0;
    if (frac > 1.0 - 1e-9) {
      ++i0;
      frac = 0.0;
    } else if (frac < 1e-9) {
      frac = 0.0;
    }
    i0 = std::min(i0, m - 1);
    MotionFrame& f = out.frames[k];
    if (frac == 0.0) {
      f.joints_canonical = canon[i0];
      f.joints_global = global[i0];
    } else {
      f.joints_canonical = (1.0 - frac) * canon[i0] + frac * canon[i0 + 1];
      f.joints_global = (1.0 - frac) * global[i0] + frac * global[i0 + 1];
    }
  }
  return out;
}

void ValidateMotion(const MotionSequence& seq) {
  if (!(seq.fps > 0.0)) Fail(ErrorKind::kInput, "fps must be positive");
  if (seq.num_humans < 1) Fail(ErrorKind::kInput, "motion needs >= 1 person");
  const int rows = kNumJoints * seq.num_humans;
  for (int t = 0; t < seq.size(); ++t) {
    const MotionFrame& f = seq.frames[t];
    const std::string where =
        seq.camera_id + " frame " + std::to_string(t) + ": ";
    if (!f.joints_only() &&
        static_cast<int>(f.states.size()) != seq.num_humans) {
      Fail(ErrorKind::kCorrespondence,
           where + "expected " + std::to_string(seq.num_humans) + " people");
    }
    for (const auto* js : {&f.joints_canonical, &f.joints_global}) {
      if (js->has_value() && (*js)->rows() != rows) {
        Fail(ErrorKind::kCorrespondence, where + "joint set has " +
                                             std::to_string((*js)->rows()) +
                                             " rows, expected " +
                                             std::to_string(rows));
      }
    }
    if (f.joints_only() &&
        !(f.joints_canonical.has_value() && f.joints_global.has_value())) {
      Fail(ErrorKind::kInput, where + "joints-only frame needs both joint sets");
    }
  }
}

}  // namespace hmcal
