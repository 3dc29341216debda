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

#ifndef HMCAL_SKELETON_H_
#define HMCAL_SKELETON_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hmcal {

inline constexpr int kNumJoints = 22;
inline constexpr int kNumShapeCoeffs = 16;

// Parametric state of one tracked person at one frame.
struct HumanState {
  Eigen::Vector3d root_orientation = Eigen::Vector3d::Zero();  // axis-angle
  std::array<Eigen::Vector3d, kNumJoints> body_pose = MakeZeroPose();
  std::array<double, kNumShapeCoeffs> shape{};
  Eigen::Vector3d root_position = Eigen::Vector3d::Zero();

  static std::array<Eigen::Vector3d, kNumJoints> MakeZeroPose();
};

enum class JointFrame { kCanonical, kGlobal };

// Joint positions of K people stacked person-major: rows [22k, 22k + 22).
struct JointSet {
  Eigen::MatrixX3d positions;
  JointFrame frame = JointFrame::kCanonical;
};

// A fixed 22-joint kinematic tree standing in for a learned body model. Joint
// j is rotated by body_pose[j] in its parent's frame; bone j (parent -> j)
// has length scaled by 1 + shape_map.row(j) . shape.
class SkeletonModel {
 public:
  // Symmetric humanoid, z-up, meters; pelvis root.
  static const SkeletonModel& Default();

  SkeletonModel(std::array<int, kNumJoints> parents,
                std::array<Eigen::Vector3d, kNumJoints> rest_offsets,
                Eigen::Matrix<double, kNumJoints, kNumShapeCoeffs> shape_map);

  int parent(int joint) const { return parents_[joint]; }
  const Eigen::Vector3d& rest_offset(int joint) const {
    return rest_offsets_[joint];
  }
  double BoneScale(int joint,
                   const std::array<double, kNumShapeCoeffs>& shape) const;
  static const char* JointName(int joint);

  // Forward kinematics with root at the origin; the root rotation is
  // Exp(root_rotation) * Exp(body_pose[0]).
  Eigen::Matrix<double, kNumJoints, 3> Pose(
      const Eigen::Vector3d& root_rotation,
      const std::array<Eigen::Vector3d, kNumJoints>& body_pose,
      const std::array<double, kNumShapeCoeffs>& shape) const;

 private:
  std::array<int, kNumJoints> parents_;
  std::array<Eigen::Vector3d, kNumJoints> rest_offsets_;
  Eigen::Matrix<double, kNumJoints, kNumShapeCoeffs> shape_map_;
};

// S(0, theta, beta): invariant to root orientation and root position.
JointSet CanonicalJoints(const HumanState& state, const SkeletonModel& model);
// S(phi, theta, beta) + gamma.
JointSet GlobalJoints(const HumanState& state, const SkeletonModel& model);

// One frame of a motion track. Either `states` holds K people, or the frame
// is joints-only and carries precomputed 22K x 3 joint sets.
struct MotionFrame {
  std::vector<HumanState> states;
  std::optional<Eigen::MatrixX3d> joints_canonical;
  std::optional<Eigen::MatrixX3d> joints_global;

  bool joints_only() const { return states.empty(); }
};

struct MotionSequence {
  std::string camera_id;
  double fps = 30.0;
  int num_humans = 1;
  std::vector<MotionFrame> frames;

  int size() const { return static_cast<int>(frames.size()); }
};

// Stacked joints of all people of a frame; precomputed joints win over states.
Eigen::MatrixX3d FrameCanonicalJoints(const MotionFrame& frame,
                                      const SkeletonModel& model);
Eigen::MatrixX3d FrameGlobalJoints(const MotionFrame& frame,
                                   const SkeletonModel& model);

// Frobenius norm between the stacked canonical joints of two K-person lists.
double StateDistance(const std::vector<HumanState>& a,
                     const std::vector<HumanState>& b,
                     const SkeletonModel& model);

// Linear interpolation of joint positions to a higher frame rate. Output
// frame k sits at source time k * fps / target_fps; frames are joints-only
// unless target_fps == fps, in which case the input is returned unchanged.
MotionSequence ResampleMotion(const MotionSequence& seq, double target_fps,
                              const SkeletonModel& model);

// Validates type invariants (K consistent across frames, joint-set shapes).
void ValidateMotion(const MotionSequence& seq);

}  // namespace hmcal

#endif  // HMCAL_SKELETON_H_
