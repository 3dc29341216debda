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

#ifndef HMCAL_EVALKIT_H_
#define HMCAL_EVALKIT_H_

#include <limits>
#include <string>
#include <vector>

#include "hmcal/image.h"
#include "hmcal/posealign.h"

namespace hmcal {

// Aligns estimated cameras onto reference cameras by Procrustes on camera
// centers: o~ = s_ref R ((o_est - t_est) / s_est) + t_ref, R~ = R_est R^T,
// tau~ = -R~ o~. Needs >= 3 cameras with non-collinear centers.
std::vector<CameraPose> AlignCameraSets(const std::vector<CameraPose>& est,
                                        const std::vector<CameraPose>& ref);

struct CameraError {
  std::string camera_id;
  double rotation_deg = 0.0;
  double translation = 0.0;  // scene units, after alignment
  double offset = 0.0;       // frames, after removing the shared shift
};

struct CalibReport {
  std::string dataset_id;
  std::string stage;  // "init" or "refine"
  double scene_extent = 1.0;
  std::vector<CameraError> cameras;
  CameraError mean;
};

struct CalibInput {
  std::vector<std::string> camera_ids;
  std::vector<CameraPose> poses;
  std::vector<double> offsets;  // frames
};

// Rotation error is the geodesic angle between aligned and reference
// rotations; translation error is the distance between aligned centers;
// offset error is |est - gt - c| with c the mean difference.
CalibReport CalibErrors(const CalibInput& est, const CalibInput& gt);

// Diagonal of the bounding box of the camera centers.
double CameraExtent(const std::vector<CameraPose>& poses);

// Stands in for +infinity PSNR (identical images) in serialized reports.
inline constexpr double kPsnrIdenticalSentinel =
    std::numeric_limits<double>::infinity();

struct ImageMetrics {
  double psnr = 0.0;
  double ssim = 0.0;
};

// PSNR = 10 log10(1 / MSE); SSIM uses an 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, dynamic range 1, valid-region mean over channels.
ImageMetrics ComputeImageMetrics(const Image& rendered, const Image& reference);
double Psnr(const Image& rendered, const Image& reference);
double Ssim(const Image& rendered, const Image& reference);

// Human-readable table, one row per camera with init and refine columns.
std::string FormatReportTable(const CalibReport& init,
                              const CalibReport* refine);

}  // namespace hmcal

#endif  // HMCAL_EVALKIT_H_
