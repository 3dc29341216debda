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

#ifndef HMCAL_SYNTH_H_
#define HMCAL_SYNTH_H_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hmcal/calibration.h"
#include "hmcal/image.h"
#include "hmcal/planefield.h"
#include "hmcal/posealign.h"
#include "hmcal/rng.h"
#include "hmcal/skeleton.h"

namespace hmcal {

struct NoiseSpec {
  double joint_sigma = 0.0;  // meters, on joint positions
  double pose_sigma = 0.0;   // radians, on body-pose components
  double shape_sigma = 0.0;  // on shape coefficients, one draw per sequence

  bool IsZero() const {
    return joint_sigma == 0.0 && pose_sigma == 0.0 && shape_sigma == 0.0;
  }
};

// Named pose-noise levels: "sigma0.01", "sigma0.02", "sigma0.05", "sigma0.1",
// "sigma0.2".
const std::vector<std::pair<std::string, double>>& NoisePresets();

struct SceneSpec {
  int num_cameras = 10;
  int num_humans = 1;
  int frames = 120;
  double fps = 30.0;
  // Optional per-camera rates; empty uses `fps` everywhere.
  std::vector<double> camera_fps;
  int max_offset = 20;   // common-rate frames
  int min_overlap = 60;  // common-rate frames shared by every pair
  NoiseSpec noise;
  bool randomize_frames = true;  // per-video similarity frames
  bool random_scale = false;     // per-video scale != 1 (joints-only motion)
  int num_moving_cameras = 0;
  int image_width = 0;  // 0 disables rendering
  int image_height = 0;
  uint64_t seed = 0;

  double CameraFps(int camera) const;
  double CommonRate() const;
};

void ValidateSceneSpec(const SceneSpec& spec);

// Five cameras at 24 fps, the rest at 30 fps.
SceneSpec MixedFpsSpec(SceneSpec base);

struct SceneInfo {
  Aabb bounds;
  Eigen::Vector3d background = Eigen::Vector3d::Ones();
  double near = 1.0;
  double far = 5.0;
  double frame_rate = 30.0;  // common rate of offsets and global time
};

struct Blob {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double sigma = 0.1;    // spatial standard deviation
  double density = 1.0;  // peak extinction per unit length
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
};

struct GroundTruth {
  std::vector<int> offsets;                      // local f -> global f*scale - offset
  std::vector<SimilarityTransform> sim3;         // world -> per-video frame
  std::vector<CameraTrajectory> world_trajectories;
};

struct Dataset {
  std::string id;
  SceneInfo scene;
  std::vector<MotionSequence> motions;        // per-video frames, noisy
  std::vector<CameraTrajectory> cameras;      // per-video frames
  std::vector<std::vector<Image>> images;     // [camera][frame], may be empty
  GroundTruth gt;
};

// World-frame motion of the synthetic people at continuous time.
class SyntheticMotion {
 public:
  SyntheticMotion(int num_humans, Rng& rng);
  int num_humans() const { return static_cast<int>(humans_.size()); }
  HumanState At(int human, double seconds) const;

 private:
  struct Wave {
    double amplitude[3];
    double frequency[3];
    double phase[3];
    double Eval(double s) const;
  };
  struct Human {
    Eigen::Vector3d home;
    std::array<double, kNumShapeCoeffs> shape{};
    std::array<std::array<Wave, 3>, kNumJoints> pose;
    std::array<Wave, 3> root_rot;
    std::array<Wave, 3> root_pos;
    double home_yaw = 0.0;
  };
  std::vector<Human> humans_;
};

// Joint-attached blobs of every person plus the static landmarks.
std::vector<Blob> SceneBlobs(const SyntheticMotion& motion, double seconds,
                             const SkeletonModel& model);
std::vector<Blob> LandmarkBlobs();

// Analytic render: each blob's Gaussian optical depth along the ray within
// [near, far], composited front to back by closest-approach depth.
Image RenderBlobScene(const std::vector<Blob>& blobs, const CameraPose& pose,
                      const Intrinsics& intrinsics, const SceneInfo& scene);

SceneInfo DefaultSceneInfo(double frame_rate);

Dataset Generate(const SceneSpec& spec);

// Adds zero-mean Gaussian noise: pose and shape noise on state frames, joint
// noise on joint positions (state frames become joints-only). One shape draw
// per sequence and person. `seed` drives all draws.
std::vector<MotionSequence> Perturb(const std::vector<MotionSequence>& motions,
                                    const NoiseSpec& noise, uint64_t seed,
                                    const SkeletonModel& model);

// Ground-truth calibration in the world frame, camera 0 as anchor.
CalibrationState GroundTruthCalibration(const Dataset& data);

// Calibration with every non-anchor static camera rotated by `rot_deg`
// about a random axis, its center moved by `center_fraction` of the camera
// extent in a random direction, and its offset shifted by +-offset_frames.
CalibrationState PerturbCalibration(const CalibrationState& gt, double rot_deg,
                                    double center_fraction, double offset_frames,
                                    uint64_t seed);

}  // namespace hmcal

#endif  // HMCAL_SYNTH_H_
