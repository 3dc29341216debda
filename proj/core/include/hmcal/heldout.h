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

#ifndef HMCAL_HELDOUT_H_
#define HMCAL_HELDOUT_H_

#include <cstdint>
#include <vector>

#include "hmcal/calibration.h"
#include "hmcal/refine.h"

namespace hmcal {

struct HeldoutConfig {
  int iterations = 200;
  int batch_rays = 512;
  double lr_pose = 1e-3;
  double lr_offset = 1e-2;
  bool optimize_offset = true;
  int patience = 50;  // iterations without improvement before stopping
  uint64_t seed = 0;
};

struct HeldoutResult {
  CameraCalibration camera;  // best-seen state
  double initial_loss = 0.0;
  double best_loss = 0.0;
  int iterations_run = 0;
  bool stopped_early = false;  // no improvement within the patience window
};

// Optimizes only the test camera's pose delta and offset against the
// photometric loss of a fixed pixel set; the model is read-only. The field is
// queried with every level at full weight.
HeldoutResult HeldoutTestTimeOpt(const Model& model, const TimeMapping& timing,
                                 const TrainView& view,
                                 const CameraCalibration& init, double frame_rate,
                                 const RefineConfig& config,
                                 const HeldoutConfig& heldout);

// Expresses a ground-truth test camera in the estimate's frame using the
// similarity that maps ground-truth training centers onto estimated ones.
CameraPose MapIntoEstimateFrame(const std::vector<CameraPose>& train_gt,
                                const std::vector<CameraPose>& train_est,
                                const CameraPose& test_gt);

}  // namespace hmcal

#endif  // HMCAL_HELDOUT_H_
