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


#include <array>
#include <vector>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "hmcal/error.h"
#include "hmcal/skeleton.h"
#include "test_util.h"

namespace hmcal {
namespace {

using testing::Gen;

HumanState RandomState(Gen& gen, double pose_scale = 0.4, bool with_shape = true) {
  HumanState s;
  s.root_orientation = gen.UnitVec() * gen.Uniform(0.0, 3.0);
  for (auto& j : s.body_pose) j = gen.Vec3(-pose_scale, pose_scale);
  if (with_shape) {
    for (double& b : s.shape) b = gen.Normal(0.0, 0.1);
  }
  s.root_position = gen.Vec3(-2.0, 2.0);
  return s;
}

// Forward kinematics as a chain of rigid transforms T_j = T_p * Tr(o_j) * R_j.
Eigen::Matrix<double, kNumJoints, 3> ChainFk(const SkeletonModel& model,
                                             const HumanState& s, bool global) {
  std::array<Eigen::Isometry3d, kNumJoints> t;
  const auto rot = [](const Eigen::Vector3d& w) -> Eigen::Matrix3d {
    if (w.norm() == 0.0) return Eigen::Matrix3d::Identity();
    return Eigen::AngleAxisd(w.norm(), w.normalized()).toRotationMatrix();
  };
  Eigen::Isometry3d root = Eigen::Isometry3d::Identity();
  if (global) {
    root.translate(s.root_position);
    root.rotate(rot(s.root_orientation));
  }
  t[0] = root;
  t[0].rotate(rot(s.body_pose[0]));
  Eigen::Matrix<double, kNumJoints, 3> out;
  out.row(0) = t[0].translation().transpose();
  for (int j = 1; j < kNumJoints; ++j) {
    const int p = model.parent(j);
    t[j] = t[p];
    t[j].translate(model.BoneScale(j, s.shape) * model.rest_offset(j));
    t[j].rotate(rot(s.body_pose[j]));
    out.row(j) = t[j].translation().transpose();
  }
  return out;
}

TEST(SkeletonTest, TreeIsTopologicallyOrdered) {
  const SkeletonModel& m = SkeletonModel::Default();
  EXPECT_LT(m.parent(0), 0);
  for (int j = 1; j < kNumJoints; ++j) {
    EXPECT_GE(m.parent(j), 0);
    EXPECT_LT(m.parent(j), j);
    EXPECT_NE(std::string(SkeletonModel::JointName(j)), "");
  }
}

TEST(SkeletonTest, RestPoseIsLeftRightSymmetric) {
  const SkeletonModel& m = SkeletonModel::Default();
  const Eigen::Matrix<double, kNumJoints, 3> p =
      m.Pose(Eigen::Vector3d::Zero(), HumanState::MakeZeroPose(), {});
  // Every joint off the sagittal plane has a mirrored partner.
  for (int j = 0; j < kNumJoints; ++j) {
    if (std::abs(p(j, 0)) < 1e-12) continue;
    bool found = false;
    for (int k = 0; k < kNumJoints; ++k) {
      if ((p.row(k) - Eigen::RowVector3d(-p(j, 0), p(j, 1), p(j, 2))).norm() < 1e-12) {
        found = true;
      }
    }
    EXPECT_TRUE(found) << SkeletonModel::JointName(j);
  }
}

TEST(SkeletonTest, ForwardKinematicsMatchesTransformChain) {
  Gen gen(21);
  const SkeletonModel& m = SkeletonModel::Default();
  for (int trial = 0; trial < 100; ++trial) {
    const HumanState s = RandomState(gen);
    EXPECT_LT((CanonicalJoints(s, m).positions - ChainFk(m, s, false)).norm(), 1e-12);
    EXPECT_LT((GlobalJoints(s, m).positions - ChainFk(m, s, true)).norm(), 1e-12);
  }
}

TEST(SkeletonTest, BoneLengthsFollowShapeScale) {
  Gen gen(22);
  const SkeletonModel& m = SkeletonModel::Default();
  const HumanState s = RandomState(gen);
  const auto p = CanonicalJoints(s, m).positions;
  for (int j = 1; j < kNumJoints; ++j) {
    const double len = (p.row(j) - p.row(m.parent(j))).norm();
    EXPECT_NEAR(len, m.BoneScale(j, s.shape) * m.rest_offset(j).norm(), 1e-12);
  }
}

TEST(SkeletonTest, CanonicalJointsIgnoreRootOrientationAndPosition) {
  Gen gen(23);
  const SkeletonModel& m = SkeletonModel::Default();
  for (int trial = 0; trial < 50; ++trial) {
    HumanState a = RandomState(gen);
    HumanState b = a;
    b.root_orientation = gen.UnitVec() * gen.Uniform(0.0, 3.0);
    b.root_position = gen.Vec3(-5, 5);
    EXPECT_EQ(CanonicalJoints(a, m).positions, CanonicalJoints(b, m).positions);
    EXPECT_EQ(CanonicalJoints(a, m).positions.row(0).norm(), 0.0);
  }
}

TEST(SkeletonTest, GlobalJointsAreRigidlyMovedCanonicalJoints) {
  Gen gen(24);
  const SkeletonModel& m = SkeletonModel::Default();
  for (int trial = 0; trial < 50; ++trial) {
    const HumanState s = RandomState(gen);
    const Eigen::Matrix3d r =
        Eigen::AngleAxisd(s.root_orientation.norm(), s.root_orientation.normalized())
            .toRotationMatrix();
    const Eigen::MatrixX3d expect =
        (CanonicalJoints(s, m).positions * r.transpose()).rowwise() +
        s.root_position.transpose();
    EXPECT_LT((GlobalJoints(s, m).positions - expect).norm(), 1e-12);
  }
}

TEST(SkeletonTest, StateDistanceIsAMetricOnCanonicalJoints) {
  Gen gen(25);
  const SkeletonModel& m = SkeletonModel::Default();
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<HumanState> a = {RandomState(gen), RandomState(gen)};
    const std::vector<HumanState> b = {RandomState(gen), RandomState(gen)};
    const std::vector<HumanState> c = {RandomState(gen), RandomState(gen)};
    EXPECT_EQ(StateDistance(a, a, m), 0.0);
    EXPECT_DOUBLE_EQ(StateDistance(a, b, m), StateDistance(b, a, m));
    EXPECT_LE(StateDistance(a, c, m), StateDistance(a, b, m) + StateDistance(b, c, m) + 1e-12);
  }
  EXPECT_THROW(StateDistance({HumanState{}}, {}, m), Error);
}

TEST(SkeletonTest, StackedJointsArePersonMajor) {
  Gen gen(26);
  const SkeletonModel& m = SkeletonModel::Default();
  MotionFrame f;
  f.states = {RandomState(gen), RandomState(gen)};
  const Eigen::MatrixX3d g = FrameGlobalJoints(f, m);
  ASSERT_EQ(g.rows(), 2 * kNumJoints);
  EXPECT_EQ(Eigen::MatrixX3d(g.topRows(kNumJoints)), GlobalJoints(f.states[0], m).positions);
  EXPECT_EQ(Eigen::MatrixX3d(g.bottomRows(kNumJoints)), GlobalJoints(f.states[1], m).positions);
}

MotionSequence RandomSequence(Gen& gen, int frames, double fps) {
  MotionSequence seq;
  seq.camera_id = "cam";
  seq.fps = fps;
  for (int i = 0; i < frames; ++i) {
    MotionFrame f;
    f.states = {RandomState(gen)};
    seq.frames.push_back(f);
  }
  return seq;
}

TEST(ResampleTest, SameRateIsUnchanged) {
  Gen gen(27);
  const MotionSequence seq = RandomSequence(gen, 5, 30.0);
  const MotionSequence out = ResampleMotion(seq, 30.0, SkeletonModel::Default());
  ASSERT_EQ(out.size(), 5);
  EXPECT_FALSE(out.frames[0].joints_only());
}

TEST(ResampleTest, UpsamplingInterpolatesLinearly) {
  Gen gen(28);
  const SkeletonModel& m = SkeletonModel::Default();
  const MotionSequence seq = RandomSequence(gen, 9, 24.0);
  const MotionSequence out = ResampleMotion(seq, 30.0, m);
  // Frames k with k * 24 / 30 <= 8.
  ASSERT_EQ(out.size(), 11);
  EXPECT_EQ(out.fps, 30.0);
  for (int k = 0; k < out.size(); ++k) {
    const double src = k * 24.0 / 30.0;
    const int i0 = static_cast<int>(std::floor(src + 1e-12));
    const double a = src - i0;
    const Eigen::MatrixX3d g0 = FrameGlobalJoints(seq.frames[i0], m);
    const Eigen::MatrixX3d expect =
        a < 1e-12 ? g0
                  : Eigen::MatrixX3d((1 - a) * g0 + a * FrameGlobalJoints(seq.frames[i0 + 1], m));
    ASSERT_TRUE(out.frames[k].joints_only());
    EXPECT_LT((*out.frames[k].joints_global - expect).norm(), 1e-12) << k;
  }
}

TEST(ResampleTest, DownsamplingIsUnsupported) {
  Gen gen(29);
  const MotionSequence seq = RandomSequence(gen, 4, 30.0);
  try {
    ResampleMotion(seq, 24.0, SkeletonModel::Default());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnsupported);
  }
}

TEST(ValidateMotionTest, RejectsInconsistentPeopleCounts) {
  Gen gen(30);
  MotionSequence seq = RandomSequence(gen, 3, 30.0);
  ValidateMotion(seq);
  seq.frames[1].states.push_back(RandomState(gen));
  try {
    ValidateMotion(seq);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCorrespondence);
  }
}

TEST(ValidateMotionTest, JointsOnlyFramesNeedBothSets) {
  MotionSequence seq;
  MotionFrame f;
  f.joints_global = Eigen::MatrixX3d::Zero(kNumJoints, 3);
  seq.frames.push_back(f);
  EXPECT_THROW(ValidateMotion(seq), Error);
  seq.frames[0].joints_canonical = Eigen::MatrixX3d::Zero(kNumJoints, 3);
  ValidateMotion(seq);
  seq.frames[0].joints_canonical = Eigen::MatrixX3d::Zero(5, 3);
  EXPECT_THROW(ValidateMotion(seq), Error);
}

}  // namespace
}  // namespace hmcal
