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

#include "hmcal/refine.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "hmcal/error.h"
#include "hmcal/so3.h"

namespace hmcal {
namespace {

double LrFactor(const OptimizerConfig& opt, int step, int total) {
  if (opt.lr_final_factor == 1.0 || total <= 1) return 1.0;
  const double x = static_cast<double>(step) / (total - 1);
  return opt.lr_final_factor +
         (1.0 - opt.lr_final_factor) * 0.5 * (1.0 + std::cos(x * std::numbers::pi));
}

void RecordMetrics(int step, double loss, const CalibrationState& state,
                   const TrainHooks& hooks, std::vector<MetricsRecord>* log) {
  MetricsRecord rec;
  rec.step = step;
  rec.loss = loss;
  rec.rot_err_deg = rec.trans_err = rec.dt_err =
      std::numeric_limits<double>::quiet_NaN();
  if (hooks.ground_truth && state.size() >= 3) {
    const CalibReport report = CalibErrors(state.ToCalibInput(), *hooks.ground_truth);
    rec.rot_err_deg = report.mean.rotation_deg;
    rec.trans_err = report.mean.translation;
    rec.dt_err = report.mean.offset;
  }
  log->push_back(rec);
  if (hooks.on_metrics) hooks.on_metrics(rec);
}

}  // namespace

std::vector<int> TrainData::FrameCounts() const {
  std::vector<int> counts;
  for (const TrainView& v : views) counts.push_back(static_cast<int>(v.frames.size()));
  return counts;
}

Adam::Adam(size_t size, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(size, 0.0), v_(size, 0.0) {}

void Adam::Step(std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    Fail(ErrorKind::kInput, "Adam parameter size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + epsilon_);
  }
}

void ValidateRefineConfig(const RefineConfig& config) {
  ValidateFieldConfig(config.field);
  ValidateRenderConfig(config.render);
  ValidateSchedule(config.schedule);
  if (config.schedule.num_levels != static_cast<int>(config.field.spatial_resolution.size())) {
    Fail(ErrorKind::kConfig, "schedule levels must match field levels");
  }
  if (config.batch_rays < 1) Fail(ErrorKind::kConfig, "batch_rays must be >= 1");
  if (config.threads < 1) Fail(ErrorKind::kConfig, "threads must be >= 1");
  if (config.log_every < 1) Fail(ErrorKind::kConfig, "log_every must be >= 1");
  if (config.checkpoint_every < 0) Fail(ErrorKind::kConfig, "checkpoint_every must be >= 0");
  if (config.time_margin < 0) Fail(ErrorKind::kConfig, "time_margin must be >= 0");
}

Model::Model(const PlaneFieldConfig& field_config, DecoderConfig decoder_config)
    : field(field_config),
      decoders([&] {
        decoder_config.feature_dim =
            static_cast<int>(field_config.spatial_resolution.size()) *
            field_config.feature_dim;
        return decoder_config;
      }()) {}

void Model::Init(Rng& rng) {
  field.InitDefault(rng);
  decoders.Init(rng);
}

BatchLoss EvaluateBatch(const Model& model, const CalibrationState& state,
                        const TimeMapping& timing, const TrainData& data,
                        std::span<const PixelSample> samples,
                        std::span<const double> jitter,
                        std::span<const double> level_weights,
                        const RefineConfig& config, double reg_scale,
                        StepGradients* grads) {
  const int ns = config.render.samples;
  if (!jitter.empty() && jitter.size() != samples.size() * ns) {
    Fail(ErrorKind::kInput, "jitter must hold render.samples values per sample");
  }
  if (static_cast<int>(data.views.size()) != state.size()) {
    Fail(ErrorKind::kInput, "views and cameras differ in count");
  }
  RayBatch batch;
  batch.Resize(static_cast<int>(samples.size()));
  Eigen::Matrix3Xd targets(3, samples.size());
  std::vector<int> ray_camera;
  int kept = 0;
  for (const PixelSample& s : samples) {
    const CameraCalibration& cam = state.cameras.at(s.camera);
    const TrainView& view = data.views[s.camera];
    if (s.frame < 0 || s.frame >= static_cast<int>(view.frames.size()) ||
        view.frames[s.frame].empty()) {
      continue;
    }
    const double tau = timing.Normalize(state.GlobalTime(s.camera, s.frame));
    if (!(tau >= 0.0 && tau <= 1.0)) continue;
    const Ray ray = GenerateRay(cam.PoseAt(s.frame), cam.base.intrinsics,
                                s.x + 0.5, s.y + 0.5);
    batch.Set(kept, ray, tau);
    targets.col(kept) = view.frames[s.frame].Pixel(s.x, s.y);
    if (!jitter.empty()) {
      const size_t src = static_cast<size_t>(&s - samples.data()) * ns;
      batch.jitter.insert(batch.jitter.end(), jitter.begin() + src,
                          jitter.begin() + src + ns);
    }
    ray_camera.push_back(s.camera);
    ++kept;
  }
  batch.origins.conservativeResize(3, kept);
  batch.directions.conservativeResize(3, kept);
  batch.times.resize(kept);
  targets.conservativeResize(3, kept);

  BatchLoss out;
  out.rays = kept;
  RenderParams params{&model.field, &model.decoders, level_weights, config.render,
                      config.threads};
  RenderGradients local;
  RenderGradients& rg = grads ? grads->render : local;
  if (kept > 0) {
    const LossTerms terms = LossAndGradients(
        params, batch, targets, config.regularizers.density_l1 * reg_scale, &rg);
    out.photometric = terms.photometric;
    out.density = terms.density_mean;
  } else {
    rg.field.assign(model.field.params().size(), 0.0);
    rg.decoders.assign(model.decoders.params().size(), 0.0);
    rg.d_origins.resize(3, 0);
    rg.d_directions.resize(3, 0);
    rg.d_times.resize(0);
  }
  out.field = FieldRegularizers(model.field, config.regularizers, reg_scale,
                                grads ? &rg.field : nullptr);
  const RegularizerWeights& w = config.regularizers;
  out.total = out.photometric +
              reg_scale * (w.density_l1 * out.density + w.tv_space * out.field.tv_space +
                           w.smooth_time * out.field.smooth_time +
                           w.l1_time * out.field.l1_time);
  if (!grads) return out;

  const int n = state.size();
  grads->rot_delta.assign(n, Eigen::Vector3d::Zero());
  grads->center_delta.assign(n, Eigen::Vector3d::Zero());
  grads->offset.assign(n, 0.0);
  const double dtau_doffset = -1.0 / (timing.hi - timing.lo);
  for (int r = 0; r < kept; ++r) {
    const int c = ray_camera[r];
    const CameraCalibration& cam = state.cameras[c];
    if (cam.PoseRefinable()) {
      const Eigen::Vector3d d = batch.directions.col(r);
      grads->rot_delta[c] += so3::LeftJacobian(cam.rot_delta).transpose() *
                             d.cross(Eigen::Vector3d(rg.d_directions.col(r)));
      grads->center_delta[c] += rg.d_origins.col(r);
    }
    if (cam.OffsetRefinable()) grads->offset[c] += rg.d_times(r) * dtau_doffset;
  }
  return out;
}

Checkpoint MakeCheckpoint(int step, const Model& model,
                          const CalibrationState& state, const TimeMapping& timing) {
  Checkpoint ck;
  ck.step = step;
  ck.field_config = model.field.config();
  ck.field = model.field.params();
  ck.decoder_config = model.decoders.config();
  ck.decoders = model.decoders.params();
  ck.calibration = state;
  ck.timing = timing;
  return ck;
}

TrainResult Train(const TrainData& data, const CalibrationState& init,
                  const RefineConfig& config, const TrainHooks& hooks) {
  ValidateRefineConfig(config);
  if (static_cast<int>(data.views.size()) != init.size() || init.size() == 0) {
    Fail(ErrorKind::kInput, "training views must match calibration cameras");
  }
  for (int i = 0; i < init.size(); ++i) {
    ValidateTrajectory(init.cameras[i].base);
    if (data.views[i].frames.empty()) {
      Fail(ErrorKind::kData, "camera " + init.cameras[i].camera_id + " has no frames");
    }
  }
  const TrainSchedule& schedule = config.schedule;
  const OptimizerConfig& opt = config.optimizer;
  Rng root(config.seed);
  Rng init_rng = root.Fork(1);
  Rng sampler = root.Fork(2);

  TrainResult result{Model(config.field, config.decoder), init,
                     TimeMapping::Covering(init, data.FrameCounts(), config.time_margin),
                     {}, 0};
  Model& model = result.model;
  CalibrationState& state = result.calibration;
  model.Init(init_rng);
  const int n = state.size();

  Adam field_adam(model.field.params().size(), opt.beta1, opt.beta2, opt.epsilon);
  Adam decoder_adam(model.decoders.params().size(), opt.beta1, opt.beta2, opt.epsilon);
  Adam pose_adam(6 * n, opt.beta1, opt.beta2, opt.epsilon);
  Adam offset_adam(n, opt.beta1, opt.beta2, opt.epsilon);
  std::vector<double> pose_params(6 * n);
  std::vector<double> pose_grad(6 * n);
  std::vector<double> offset_params(n);

  auto checkpoint = [&](int step) {
    const int every = config.checkpoint_every;
    const bool due = step == 0 || step == schedule.total_steps ||
                     (every > 0 && step % every == 0);
    const bool write = every > 0 && !config.checkpoint_dir.empty();
    if (!due || (!write && !hooks.on_checkpoint)) return;
    const Checkpoint ck = MakeCheckpoint(step, model, state, result.timing);
    if (hooks.on_checkpoint) hooks.on_checkpoint(ck);
    if (write) {
      std::filesystem::create_directories(config.checkpoint_dir);
      char name[32];
      std::snprintf(name, sizeof(name), "step_%07d.ckpt", step);
      WriteCheckpoint(ck, config.checkpoint_dir / name);
    }
  };

  std::vector<PixelSample> samples(config.batch_rays);
  std::vector<double> jitter;
  StepGradients grads;
  checkpoint(0);
  for (int step = 0; step < schedule.total_steps; ++step) {
    for (int level : schedule.UpsampleLevels(step)) UpsampleInit(&model.field, level);
    const std::vector<double> level_weights = schedule.LevelWeights(step);

    for (PixelSample& s : samples) {
      s.camera = static_cast<int>(sampler.UniformInt(0, n - 1));
      const TrainView& view = data.views[s.camera];
      s.frame = static_cast<int>(
          sampler.UniformInt(0, static_cast<int64_t>(view.frames.size()) - 1));
      const Intrinsics& k = state.cameras[s.camera].base.intrinsics;
      s.x = static_cast<int>(sampler.UniformInt(0, k.width - 1));
      s.y = static_cast<int>(sampler.UniformInt(0, k.height - 1));
      if (view.frames[s.frame].empty()) ++result.skipped_rays;
    }
    jitter.clear();
    if (config.render.jitter) {
      jitter.resize(samples.size() * config.render.samples);
      for (double& u : jitter) u = sampler.Uniform();
    }

    const BatchLoss loss =
        EvaluateBatch(model, state, result.timing, data, samples, jitter,
                      level_weights, config, schedule.RegularizerScale(step), &grads);
    if (!std::isfinite(loss.total)) {
      if (!config.checkpoint_dir.empty()) {
        std::filesystem::create_directories(config.checkpoint_dir);
        WriteCheckpoint(MakeCheckpoint(step, model, state, result.timing),
                        config.checkpoint_dir / "nonfinite.ckpt");
      }
      Fail(ErrorKind::kNumerical,
           "non-finite loss at step " + std::to_string(step) +
               " (photometric " + std::to_string(loss.photometric) + ", density " +
               std::to_string(loss.density) + ")");
    }
    if (step % config.log_every == 0) {
      RecordMetrics(step, loss.total, state, hooks, &result.log);
    }

    const double f = LrFactor(opt, step, schedule.total_steps);
    field_adam.Step(model.field.params(), grads.render.field, opt.lr_planes * f);
    decoder_adam.Step(model.decoders.params(), grads.render.decoders,
                      opt.lr_decoders * f);
    if (schedule.PosesActive(step)) {
      for (int i = 0; i < n; ++i) {
        const CameraCalibration& c = state.cameras[i];
        const bool on = c.PoseRefinable();
        for (int a = 0; a < 3; ++a) {
          pose_params[6 * i + a] = c.rot_delta(a);
          pose_params[6 * i + 3 + a] = c.center_delta(a);
          pose_grad[6 * i + a] = on ? grads.rot_delta[i](a) : 0.0;
          pose_grad[6 * i + 3 + a] = on ? grads.center_delta[i](a) : 0.0;
        }
      }
      pose_adam.Step(pose_params, pose_grad, opt.lr_pose * f);
      for (int i = 0; i < n; ++i) {
        CameraCalibration& c = state.cameras[i];
        if (!c.PoseRefinable()) continue;
        for (int a = 0; a < 3; ++a) {
          c.rot_delta(a) = pose_params[6 * i + a];
          c.center_delta(a) = pose_params[6 * i + 3 + a];
        }
      }
    }
    if (schedule.OffsetsActive(step)) {
      for (int i = 0; i < n; ++i) {
        offset_params[i] = state.cameras[i].offset;
        if (!state.cameras[i].OffsetRefinable()) grads.offset[i] = 0.0;
      }
      offset_adam.Step(offset_params, grads.offset, opt.lr_offset * f);
      for (int i = 0; i < n; ++i) {
        if (state.cameras[i].OffsetRefinable()) state.cameras[i].offset = offset_params[i];
      }
    }
    checkpoint(step + 1);
  }

  // Final record on the last batch's loss at the final calibration.
  if (schedule.total_steps > 0) {
    std::vector<double> level_weights = schedule.LevelWeights(schedule.total_steps);
    const BatchLoss loss =
        EvaluateBatch(model, state, result.timing, data, samples, {}, level_weights,
                      config, schedule.RegularizerScale(schedule.total_steps), nullptr);
    RecordMetrics(schedule.total_steps, loss.total, state, hooks, &result.log);
  }
  return result;
}

const char* AblationModeName(AblationMode mode) {
  switch (mode) {
    case AblationMode::kFull: return "full";
    case AblationMode::kNoCoarseToFine: return "no_coarse_to_fine";
    case AblationMode::kNoCurriculum: return "no_curriculum";
  }
  return "unknown";
}

AblationMode ParseAblationMode(const std::string& name) {
  if (name == "full") return AblationMode::kFull;
  if (name == "no_coarse_to_fine") return AblationMode::kNoCoarseToFine;
  if (name == "no_curriculum") return AblationMode::kNoCurriculum;
  Fail(ErrorKind::kConfig, "unknown ablation mode '" + name + "'");
}

TrainResult AblateSchedule(const TrainData& data, const CalibrationState& init,
                           const RefineConfig& config, AblationMode mode,
                           const TrainHooks& hooks) {
  RefineConfig c = config;
  if (mode == AblationMode::kNoCoarseToFine) c.schedule.coarse_to_fine = false;
  if (mode == AblationMode::kNoCurriculum) c.schedule.curriculum = false;
  return Train(data, init, c, hooks);
}

Image RenderFrame(const Model& model, const CalibrationState& state,
                  const TimeMapping& timing, int camera, int frame,
                  std::span<const double> level_weights,
                  const RenderConfig& render, int threads) {
  const CameraCalibration& cam = state.cameras.at(camera);
  const Intrinsics& k = cam.base.intrinsics;
  const CameraPose pose = cam.PoseAt(frame);
  const double tau =
      std::clamp(timing.Normalize(state.GlobalTime(camera, frame)), 0.0, 1.0);
  RayBatch batch;
  batch.Resize(k.width * k.height);
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      batch.Set(y * k.width + x, GenerateRay(pose, k, x + 0.5, y + 0.5), tau);
    }
  }
  RenderConfig rc = render;
  rc.jitter = false;
  RenderParams params{&model.field, &model.decoders, level_weights, rc, threads};
  const RenderOutput out = RenderBatch(params, batch);
  Image img(k.width, k.height);
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) img.SetPixel(x, y, out.rgb.col(y * k.width + x));
  }
  return img;
}

}  // namespace hmcal
