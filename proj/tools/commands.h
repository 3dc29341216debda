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


#ifndef HMCAL_TOOLS_COMMANDS_H_
#define HMCAL_TOOLS_COMMANDS_H_

#include <filesystem>
#include <ostream>
#include <vector>

#include "config.h"
#include "hmcal/calibration.h"
#include "hmcal/error.h"
#include "hmcal/formats.h"

namespace hmcal::cli {

// Files inside the output directory.
inline constexpr char kOffsetsFile[] = "offsets.json";
inline constexpr char kPosesFile[] = "poses.json";
inline constexpr char kSim3File[] = "sim3.json";
inline constexpr char kRefinedFile[] = "refined.json";
inline constexpr char kMetricsFile[] = "metrics.jsonl";
inline constexpr char kReportFile[] = "report.json";
inline constexpr char kReportTableFile[] = "report.txt";
inline constexpr char kConfigFile[] = "config.json";
inline constexpr char kCheckpointDir[] = "checkpoints";
inline constexpr char kFinalCheckpoint[] = "final.ckpt";

// 0 success, 2 config error, 3 data error, 4 numerical failure.
int ExitCodeFor(ErrorKind kind);

// Writes the dataset (and, with noise_sweep, one sibling directory per
// pose-noise preset named dataset_<preset>). Returns the dataset directory.
std::filesystem::path CmdSimulate(const PipelineConfig& config, std::ostream& log);
// Reads motions, writes offsets.json with the pairwise matrices and the rate
// the offsets are expressed in.
void CmdSync(const PipelineConfig& config, std::ostream& log);
// Reads offsets.json, writes poses.json and sim3.json.
void CmdPose(const PipelineConfig& config, std::ostream& log);
// Reads images, offsets.json and poses.json; writes refined.json,
// metrics.jsonl and checkpoints/.
void CmdRefine(const PipelineConfig& config, std::ostream& log);
// Reads ground truth, offsets.json, poses.json and, when present,
// refined.json and checkpoints/final.ckpt; writes report.json and report.txt.
void CmdEval(const PipelineConfig& config, std::ostream& log);
// Runs the enabled stages in order.
void CmdPipeline(const PipelineConfig& config, std::ostream& log);

// Initial calibration and training settings derived from the pose and sync
// outputs. Field bounds are a cube around the anchor's joints scaled by
// bounds_scale; near/far enclose that cube from every camera.
struct RefineSetup {
  CalibrationState init;
  RefineConfig config;
};
RefineSetup BuildRefineSetup(const PipelineConfig& config, const Dataset& data,
                             const OffsetsFile& offsets,
                             const std::vector<CameraTrajectory>& poses);

}  // namespace hmcal::cli

#endif  // HMCAL_TOOLS_COMMANDS_H_
