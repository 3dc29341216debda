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


#include "commands.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "hmcal/checkpoint.h"
#include "hmcal/evalkit.h"
#include "hmcal/posealign.h"
#include "hmcal/refine.h"
#include "hmcal/skeleton.h"
#include "hmcal/synth.h"
#include "hmcal/timesync.h"

namespace hmcal::cli {
namespace fs = std::filesystem;
namespace {

void RequireFile(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) {
    Fail(ErrorKind::kData, "missing " + what + ": expected " + path.string());
  }
}

Dataset LoadDataset(const PipelineConfig& config, bool images) {
  const fs::path dir = config.DatasetDir();
  RequireFile(dir / "dataset.json", "dataset");
  return ReadDataset(dir, images);
}

std::vector<std::string> CameraIds(const Dataset& data) {
  std::vector<std::string> ids;
  for (const CameraTrajectory& c : data.cameras) ids.push_back(c.camera_id);
  return ids;
}

OffsetsFile LoadOffsets(const PipelineConfig& config, const Dataset& data) {
  const fs::path path = config.out_dir / kOffsetsFile;
  RequireFile(path, "sync output");
  OffsetsFile f = ReadOffsets(path);
  if (f.camera_ids != CameraIds(data)) {
    Fail(ErrorKind::kData, path.string() + " does not match the dataset cameras");
  }
  return f;
}

std::vector<CameraTrajectory> LoadPoses(const PipelineConfig& config,
                                        const Dataset& data) {
  const fs::path path = config.out_dir / kPosesFile;
  RequireFile(path, "pose output");
  std::vector<CameraTrajectory> poses = ReadPoses(path);
  std::vector<std::string> ids;
  for (const CameraTrajectory& p : poses) ids.push_back(p.camera_id);
  if (ids != CameraIds(data)) {
    Fail(ErrorKind::kData, path.string() + " does not match the dataset cameras");
  }
  return poses;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kData, "cannot write " + path.string());
  out << text;
}

CalibInput InitEstimate(const OffsetsFile& offsets,
                        const std::vector<CameraTrajectory>& poses) {
  CalibInput in;
  for (size_t i = 0; i < poses.size(); ++i) {
    in.camera_ids.push_back(poses[i].camera_id);
    in.poses.push_back(poses[i].poses.front());
    in.offsets.push_back(offsets.offsets.offsets[i]);
  }
  return in;
}

std::vector<int> EvalFrames(int count, int wanted) {
  std::vector<int> frames;
  if (count <= 0 || wanted <= 0) return frames;
  if (wanted == 1) return {count / 2};
  for (int k = 0; k < wanted; ++k) {
    const int f = static_cast<int>((static_cast<int64_t>(k) * (count - 1)) / (wanted - 1));
    if (frames.empty() || frames.back() != f) frames.push_back(f);
  }
  return frames;
}

}  // namespace

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return 2;
    case ErrorKind::kNumerical: return 4;
    default: return 3;
  }
}

fs::path CmdSimulate(const PipelineConfig& config, std::ostream& log) {
  SceneSpec spec = config.scene;
  if (config.mixed_fps) spec = MixedFpsSpec(spec);
  ValidateSceneSpec(spec);
  const fs::path dir = config.DatasetDir();
  Dataset data = Generate(spec);
  WriteDataset(data, dir);
  log << "simulate: " << data.cameras.size() << " cameras, " << spec.frames
      << " frames -> " << dir.string() << "\n";
  if (config.noise_sweep) {
    for (const auto& [name, sigma] : NoisePresets()) {
      SceneSpec noisy = spec;
      noisy.noise.pose_sigma = sigma;
      Dataset variant = Generate(noisy);
      variant.id = data.id + "-" + name;
      const fs::path vdir = config.out_dir / ("dataset_" + name);
      WriteDataset(variant, vdir);
      log << "simulate: pose noise " << sigma << " -> " << vdir.string() << "\n";
    }
  }
  return dir;
}

void CmdSync(const PipelineConfig& config, std::ostream& log) {
  const Dataset data = LoadDataset(config, false);
  const SkeletonModel& model = SkeletonModel::Default();
  OffsetsFile file;
  file.matrices = BuildMatrices(data.motions, model, config.dtw, config.threads);
  file.offsets = GlobalAlign(file.matrices);
  switch (config.anchor_mode) {
    case AnchorMode::kCost:
      file.offsets = Reanchor(file.offsets, SelectAnchorByCost(file.matrices.cost));
      break;
    case AnchorMode::kFirst:
      file.offsets = Reanchor(file.offsets, 0);
      break;
    case AnchorMode::kPair:
      break;
  }
  file.camera_ids = CameraIds(data);
  fs::create_directories(config.out_dir);
  WriteOffsets(file, config.out_dir / kOffsetsFile);
  log << "sync: anchor " << file.camera_ids[file.offsets.anchor] << ", offsets at "
      << file.matrices.frame_rate << " fps -> "
      << (config.out_dir / kOffsetsFile).string() << "\n";
}

void CmdPose(const PipelineConfig& config, std::ostream& log) {
  const Dataset data = LoadDataset(config, false);
  const OffsetsFile offsets = LoadOffsets(config, data);
  const std::vector<SimilarityTransform> transforms =
      AlignMotions(data.motions, offsets.offsets, offsets.offsets.anchor,
                   SkeletonModel::Default());
  std::vector<CameraTrajectory> poses;
  for (size_t i = 0; i < data.cameras.size(); ++i) {
    poses.push_back(ApplyToTrajectory(data.cameras[i], transforms[i]));
  }
  fs::create_directories(config.out_dir);
  WritePoses(poses, config.out_dir / kPosesFile);
  WriteSim3(offsets.camera_ids, transforms, config.out_dir / kSim3File);
  log << "pose: " << poses.size() << " cameras in the frame of "
      << offsets.camera_ids[offsets.offsets.anchor] << " -> "
      << (config.out_dir / kPosesFile).string() << "\n";
}

RefineSetup BuildRefineSetup(const PipelineConfig& config, const Dataset& data,
                             const OffsetsFile& offsets,
                             const std::vector<CameraTrajectory>& poses) {
  RefineSetup setup;
  const int anchor = offsets.offsets.anchor;
  setup.init.frame_rate = offsets.matrices.frame_rate;
  for (size_t i = 0; i < poses.size(); ++i) {
    CameraCalibration cam;
    cam.camera_id = poses[i].camera_id;
    cam.base = poses[i];
    cam.fps = data.motions[i].fps;
    cam.offset = offsets.offsets.offsets[i];
    cam.anchor = static_cast<int>(i) == anchor;
    setup.init.cameras.push_back(cam);
  }

  const SkeletonModel& model = SkeletonModel::Default();
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (const MotionFrame& frame : data.motions[anchor].frames) {
    const Eigen::MatrixX3d joints = FrameGlobalJoints(frame, model);
    lo = lo.cwiseMin(joints.colwise().minCoeff().transpose());
    hi = hi.cwiseMax(joints.colwise().maxCoeff().transpose());
  }
  if (!lo.allFinite() || !hi.allFinite()) {
    Fail(ErrorKind::kData, "anchor motion has no finite joints");
  }
  const Eigen::Vector3d center = 0.5 * (lo + hi);
  const double half = config.bounds_scale * std::max(0.5 * (hi - lo).maxCoeff(), 1e-3);
  RefineConfig rc = config.refine;
  rc.field.bounds.lo = center.array() - half;
  rc.field.bounds.hi = center.array() + half;

  const double radius = half * std::sqrt(3.0);
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (const CameraTrajectory& t : poses) {
    for (const CameraPose& p : t.poses) {
      const double d = (p.Center() - center).norm();
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
  }
  rc.render.near = std::max(0.05 * half, dmin - radius);
  rc.render.far = dmax + radius;
  rc.render.background = data.scene.background;
  rc.checkpoint_dir = config.out_dir / kCheckpointDir;
  setup.config = rc;
  return setup;
}

void CmdRefine(const PipelineConfig& config, std::ostream& log) {
  const Dataset data = LoadDataset(config, true);
  const OffsetsFile offsets = LoadOffsets(config, data);
  const std::vector<CameraTrajectory> poses = LoadPoses(config, data);
  const RefineSetup setup = BuildRefineSetup(config, data, offsets, poses);

  TrainData train;
  for (size_t i = 0; i < data.cameras.size(); ++i) {
    TrainView view{data.cameras[i].camera_id,
                   i < data.images.size() ? data.images[i] : std::vector<Image>{}};
    if (view.frames.empty()) {
      Fail(ErrorKind::kData, "no images for camera " + view.camera_id + " under " +
                                 (config.DatasetDir() / "images").string());
    }
    train.views.push_back(std::move(view));
  }

  fs::create_directories(config.out_dir);
  std::ofstream metrics(config.out_dir / kMetricsFile, std::ios::binary);
  if (!metrics) Fail(ErrorKind::kData, "cannot write " + (config.out_dir / kMetricsFile).string());
  const int total = setup.config.schedule.total_steps;
  TrainHooks hooks;
  if (HasGroundTruth(config.DatasetDir())) {
    hooks.ground_truth = GroundTruthCalibration(data).ToCalibInput();
  }
  hooks.on_metrics = [&](const MetricsRecord& rec) {
    metrics << MetricsLine(rec) << "\n";
    metrics.flush();
    log << "refine: step " << rec.step << " loss " << rec.loss << "\n";
  };
  hooks.on_checkpoint = [&](const Checkpoint& ck) {
    if (ck.step != total) return;
    fs::create_directories(setup.config.checkpoint_dir);
    WriteCheckpoint(ck, setup.config.checkpoint_dir / kFinalCheckpoint);
  };
  const TrainResult result =
      AblateSchedule(train, setup.init, setup.config, config.ablation, hooks);
  if (result.skipped_rays > 0) {
    log << "warning: " << result.skipped_rays
        << " sampled rays fell on missing frames and were skipped\n";
  }

  RefinedFile refined;
  refined.calibration = result.calibration;
  refined.timing = result.timing;
  refined.schedule = setup.config.schedule;
  refined.steps = total;
  WriteRefined(refined, config.out_dir / kRefinedFile);
  log << "refine: " << total << " steps -> " << (config.out_dir / kRefinedFile).string()
      << "\n";
}

void CmdEval(const PipelineConfig& config, std::ostream& log) {
  const fs::path dir = config.DatasetDir();
  RequireFile(dir / "dataset.json", "dataset");
  if (!HasGroundTruth(dir)) {
    Fail(ErrorKind::kData, "eval needs ground truth: expected " + (dir / "gt.json").string());
  }
  const fs::path refined_path = config.out_dir / kRefinedFile;
  const fs::path ckpt_path = config.out_dir / kCheckpointDir / kFinalCheckpoint;
  const bool has_refine = fs::exists(refined_path);
  const bool want_images = has_refine && config.eval_frames > 0 && fs::exists(ckpt_path);

  const Dataset data = ReadDataset(dir, want_images);
  const OffsetsFile offsets = LoadOffsets(config, data);
  const std::vector<CameraTrajectory> poses = LoadPoses(config, data);
  const CalibInput gt = GroundTruthCalibration(data).ToCalibInput();

  ReportFile report;
  report.init = CalibErrors(InitEstimate(offsets, poses), gt);
  report.init.dataset_id = data.id;
  report.init.stage = "init";
  if (has_refine) {
    const RefinedFile refined = ReadRefined(refined_path);
    report.refine = CalibErrors(refined.calibration.ToCalibInput(), gt);
    report.refine->dataset_id = data.id;
    report.refine->stage = "refine";
    if (want_images) {
      const Checkpoint ck = ReadCheckpoint(ckpt_path);
      Model model(ck.field_config, ck.decoder_config);
      model.field.params() = ck.field;
      model.decoders.params() = ck.decoders;
      const RefineSetup setup = BuildRefineSetup(config, data, offsets, poses);
      const std::vector<double> weights = refined.schedule.LevelWeights(refined.steps);
      for (int c = 0; c < ck.calibration.size(); ++c) {
        const std::vector<Image>& frames = data.images.at(c);
        for (int f : EvalFrames(static_cast<int>(frames.size()), config.eval_frames)) {
          if (frames[f].empty()) continue;
          const Image img = RenderFrame(model, ck.calibration, ck.timing, c, f, weights,
                                        setup.config.render, config.threads);
          report.images.push_back(
              {ck.calibration.cameras[c].camera_id, f, ComputeImageMetrics(img, frames[f])});
        }
      }
    }
  }

  fs::create_directories(config.out_dir);
  WriteReport(report, config.out_dir / kReportFile);
  std::ostringstream table;
  table << FormatReportTable(report.init, report.refine ? &*report.refine : nullptr);
  if (!report.images.empty()) {
    table << "\nview synthesis\ncamera frame psnr ssim\n";
    for (const ImageMetricRow& row : report.images) {
      table << row.camera_id << " " << row.frame << " " << row.metrics.psnr << " "
            << row.metrics.ssim << "\n";
    }
  }
  WriteText(config.out_dir / kReportTableFile, table.str());
  log << table.str();
}

void CmdPipeline(const PipelineConfig& config, std::ostream& log) {
  if (config.stages.simulate) CmdSimulate(config, log);
  if (config.stages.sync) CmdSync(config, log);
  if (config.stages.pose) CmdPose(config, log);
  if (config.stages.refine) CmdRefine(config, log);
  if (config.stages.eval) CmdEval(config, log);
}

}  // namespace hmcal::cli
