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

#ifndef HMCAL_REFINE_H_
#define HMCAL_REFINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmcal/calibration.h"
#include "hmcal/checkpoint.h"
#include "hmcal/decoders.h"
#include "hmcal/image.h"
#include "hmcal/planefield.h"
#include "hmcal/regularizers.h"
#include "hmcal/render.h"
#include "hmcal/schedule.h"

namespace hmcal {

struct TrainView {
  std::string camera_id;
  std::vector<Image> frames;  // an empty image marks a missing frame
};

// Views are matched to CalibrationState cameras by index.
struct TrainData {
  std::vector<TrainView> views;
  std::vector<int> FrameCounts() const;
};

struct OptimizerConfig {
  double lr_planes = 1e-2;
  double lr_decoders = 1e-3;
  double lr_pose = 1e-3;
  double lr_offset = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-15;
  // Learning rates follow a cosine from 1 to this factor over training;
  // 1 keeps them constant.
  double lr_final_factor = 1.0;
};

class Adam {
 public:
  Adam() = default;
  Adam(size_t size, double beta1, double beta2, double epsilon);
  void Step(std::span<double> params, std::span<const double> grad, double lr);
  int steps() const { return t_; }

 private:
  double beta1_ = 0.9;
  double beta2_ = 0.99;
  double epsilon_ = 1e-15;
  int t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

struct RefineConfig {
  PlaneFieldConfig field;
  DecoderConfig decoder;  // feature_dim is taken from the field
  RenderConfig render;
  TrainSchedule schedule;
  RegularizerWeights regularizers;
  OptimizerConfig optimizer;
  int batch_rays = 256;
  double time_margin = 4.0;  // frames of padding on the field's time axis
  uint64_t seed = 0;
  int threads = 1;
  int log_every = 500;
  int checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::filesystem::path checkpoint_dir;
};

void ValidateRefineConfig(const RefineConfig& config);

struct Model {
  PlaneField field;
  Decoders decoders;

  Model(const PlaneFieldConfig& field_config, DecoderConfig decoder_config);
  void Init(Rng& rng);
};

struct PixelSample {
  int camera = 0;
  int frame = 0;
  int x = 0;
  int y = 0;
};

struct StepGradients {
  RenderGradients render;
  std::vector<Eigen::Vector3d> rot_delta;
  std::vector<Eigen::Vector3d> center_delta;
  std::vector<double> offset;
};

struct BatchLoss {
  double total = 0.0;
  double photometric = 0.0;
  double density = 0.0;
  RegularizerValues field;
  int rays = 0;  // kept after dropping out-of-range times
};

// Loss of one batch at the given calibration: photometric error, weighted
// density L1 and field regularizers (scaled by `reg_scale`). `jitter` holds
// render.samples values per pixel sample (empty: midpoints). Samples whose
// global time falls outside the field's time axis are dropped. When `grads`
// is set, fills gradients for the field, decoders and every camera's
// calibration parameters.
BatchLoss EvaluateBatch(const Model& model, const CalibrationState& state,
                        const TimeMapping& timing, const TrainData& data,
                        std::span<const PixelSample> samples,
                        std::span<const double> jitter,
                        std::span<const double> level_weights,
                        const RefineConfig& config, double reg_scale,
                        StepGradients* grads);

struct MetricsRecord {
  int step = 0;
  double loss = 0.0;
  // NaN when no ground truth was supplied.
  double rot_err_deg = 0.0;
  double trans_err = 0.0;
  double dt_err = 0.0;
};

struct TrainHooks {
  std::optional<CalibInput> ground_truth;
  // Invoked at step 0 and every checkpoint_every steps, and after the last.
  std::function<void(const Checkpoint&)> on_checkpoint;
  // Invoked with every metrics record as it is produced.
  std::function<void(const MetricsRecord&)> on_metrics;
};

struct TrainResult {
  Model model;
  CalibrationState calibration;
  TimeMapping timing;
  std::vector<MetricsRecord> log;
  int skipped_rays = 0;  // rays on missing frames
};

TrainResult Train(const TrainData& data, const CalibrationState& init,
                  const RefineConfig& config, const TrainHooks& hooks = {});

enum class AblationMode { kFull, kNoCoarseToFine, kNoCurriculum };

const char* AblationModeName(AblationMode mode);
AblationMode ParseAblationMode(const std::string& name);

// Runs Train with one schedule mechanism disabled.
TrainResult AblateSchedule(const TrainData& data, const CalibrationState& init,
                           const RefineConfig& config, AblationMode mode,
                           const TrainHooks& hooks = {});

Checkpoint MakeCheckpoint(int step, const Model& model,
                          const CalibrationState& state, const TimeMapping& timing);

// Renders one full frame of a camera at its calibrated pose and offset.
Image RenderFrame(const Model& model, const CalibrationState& state,
                  const TimeMapping& timing, int camera, int frame,
                  std::span<const double> level_weights,
                  const RenderConfig& render, int threads);

}  // namespace hmcal

#endif  // HMCAL_REFINE_H_
