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

#ifndef HMCAL_FORMATS_H_
#define HMCAL_FORMATS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hmcal/calibration.h"
#include "hmcal/evalkit.h"
#include "hmcal/posealign.h"
#include "hmcal/refine.h"
#include "hmcal/skeleton.h"
#include "hmcal/synth.h"
#include "hmcal/timesync.h"

namespace hmcal {

// All readers raise ErrorKind::kData naming the file on malformed input.
// Doubles are written with round-trip precision, so write -> read -> write
// reproduces files byte for byte.

std::string MotionToJson(const MotionSequence& seq);
MotionSequence MotionFromJson(const std::string& text);
void WriteMotion(const MotionSequence& seq, const std::filesystem::path& path);
MotionSequence ReadMotion(const std::filesystem::path& path);

void WriteCamera(const CameraTrajectory& traj, const std::filesystem::path& path);
CameraTrajectory ReadCamera(const std::filesystem::path& path);

void WritePoses(const std::vector<CameraTrajectory>& cams,
                const std::filesystem::path& path);
std::vector<CameraTrajectory> ReadPoses(const std::filesystem::path& path);

void WriteSim3(const std::vector<std::string>& camera_ids,
               const std::vector<SimilarityTransform>& transforms,
               const std::filesystem::path& path);
std::vector<SimilarityTransform> ReadSim3(const std::filesystem::path& path);

struct OffsetsFile {
  GlobalOffsets offsets;
  AlignmentMatrices matrices;
  std::vector<std::string> camera_ids;
};
void WriteOffsets(const OffsetsFile& file, const std::filesystem::path& path);
OffsetsFile ReadOffsets(const std::filesystem::path& path);

// Dataset directory: dataset.json (id, camera order, scene), motions/,
// cameras/, images/<cam>/<frame:06d>.ppm and gt.json when ground truth is
// known.
void WriteDataset(const Dataset& data, const std::filesystem::path& dir);
// Missing image files load as empty images; `load_images` = false skips them.
Dataset ReadDataset(const std::filesystem::path& dir, bool load_images = true);
bool HasGroundTruth(const std::filesystem::path& dir);

struct RefinedFile {
  CalibrationState calibration;
  TimeMapping timing;
  TrainSchedule schedule;
  int steps = 0;
};
void WriteRefined(const RefinedFile& file, const std::filesystem::path& path);
RefinedFile ReadRefined(const std::filesystem::path& path);

std::string MetricsLine(const MetricsRecord& rec);

struct ImageMetricRow {
  std::string camera_id;
  int frame = 0;
  ImageMetrics metrics;
};

struct ReportFile {
  CalibReport init;
  std::optional<CalibReport> refine;
  std::vector<ImageMetricRow> images;
};
void WriteReport(const ReportFile& report, const std::filesystem::path& path);
ReportFile ReadReport(const std::filesystem::path& path);

}  // namespace hmcal

#endif  // HMCAL_FORMATS_H_
