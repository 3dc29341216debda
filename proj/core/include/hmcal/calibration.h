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

#ifndef HMCAL_CALIBRATION_H_
#define HMCAL_CALIBRATION_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmcal/evalkit.h"
#include "hmcal/posealign.h"

namespace hmcal {

// Learnable calibration of one camera. A static camera's pose is its base
// pose with a world-frame rotation delta applied to the camera-to-world
// rotation and a delta added to the center: R = R0 Exp(rot_delta)^T,
// center = c0 + center_delta. Moving cameras keep their base trajectory.
struct CameraCalibration {
  std::string camera_id;
  CameraTrajectory base;
  double fps = 30.0;
  Eigen::Vector3d rot_delta = Eigen::Vector3d::Zero();
  Eigen::Vector3d center_delta = Eigen::Vector3d::Zero();
  // Frames at the common rate: local frame f shows global time
  // f * frame_scale - offset.
  double offset = 0.0;
  bool anchor = false;

  bool PoseRefinable() const { return !anchor && base.IsStatic(); }
  bool OffsetRefinable() const { return !anchor; }
  CameraPose PoseAt(int frame) const;
};

struct CalibrationState {
  double frame_rate = 30.0;  // common rate the offsets are expressed in
  std::vector<CameraCalibration> cameras;

  int size() const { return static_cast<int>(cameras.size()); }
  double FrameScale(int camera) const { return frame_rate / cameras[camera].fps; }
  double GlobalTime(int camera, double local_frame) const {
    return local_frame * FrameScale(camera) - cameras[camera].offset;
  }
  // First pose per camera with its current offset.
  CalibInput ToCalibInput() const;
};

// Maps global time (common-rate frames) onto the field's [0, 1] axis.
struct TimeMapping {
  double lo = 0.0;
  double hi = 1.0;

  double Normalize(double global) const { return (global - lo) / (hi - lo); }
  // Covers every camera's frames at the given offsets, padded by `margin`.
  static TimeMapping Covering(const CalibrationState& state,
                              const std::vector<int>& frame_counts, double margin);
};

}  // namespace hmcal

#endif  // HMCAL_CALIBRATION_H_
