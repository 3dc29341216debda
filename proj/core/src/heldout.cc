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

#include "hmcal/heldout.h"

#include <cmath>

#include "hmcal/error.h"

namespace hmcal {

HeldoutResult HeldoutTestTimeOpt(const Model& model, const TimeMapping& timing,
                                 const TrainView& view,
                                 const CameraCalibration& init, double frame_rate,
                                 const RefineConfig& config,
                                 const HeldoutConfig& heldout) {
  if (heldout.iterations < 0 || heldout.batch_rays < 1 || heldout.patience < 1) {
    Fail(ErrorKind::kConfig, "invalid held-out optimization settings");
  }
  if (view.frames.empty()) Fail(ErrorKind::kData, "test camera has no frames");
  if (!init.base.IsStatic()) {
    Fail(ErrorKind::kUnsupported, "held-out optimization needs a static camera");
  }
  CalibrationState state;
  state.frame_rate = frame_rate;
  state.cameras.push_back(init);
  state.cameras[0].anchor = false;
  TrainData data;
  data.views.push_back(view);

  RefineConfig cfg = config;
  cfg.regularizers = {0.0, 0.0, 0.0, 0.0};
  const std::vector<double> weights(model.field.num_levels(), 1.0);

  Rng rng(heldout.seed);
  std::vector<PixelSample> samples(heldout.batch_rays);
  const Intrinsics& k = init.base.intrinsics;
  for (PixelSample& s : samples) {
    s.frame = static_cast<int>(
        rng.UniformInt(0, static_cast<int64_t>(view.frames.size()) - 1));
    s.x = static_cast<int>(rng.UniformInt(0, k.width - 1));
    s.y = static_cast<int>(rng.UniformInt(0, k.height - 1));
  }

  const OptimizerConfig& opt = config.optimizer;
  Adam adam(7, opt.beta1, opt.beta2, opt.epsilon);
  std::vector<double> params(7);
  std::vector<double> grad(7);
  std::vector<double> lrs(7, heldout.lr_pose);
  lrs[6] = heldout.optimize_offset ? heldout.lr_offset : 0.0;

  HeldoutResult result;
  result.camera = state.cameras[0];
  StepGradients g;
  int since_best = 0;
  for (int it = 0; it <= heldout.iterations; ++it) {
    const BatchLoss loss = EvaluateBatch(model, state, timing, data, samples, {},
                                         weights, cfg, 0.0, &g);
    if (!std::isfinite(loss.total)) {
      Fail(ErrorKind::kNumerical, "non-finite held-out loss");
    }
    if (it == 0) {
      result.initial_loss = result.best_loss = loss.total;
    } else if (loss.total < result.best_loss) {
      result.best_loss = loss.total;
      result.camera = state.cameras[0];
      since_best = 0;
    } else if (++since_best >= heldout.patience) {
      result.stopped_early = true;
      break;
    }
    result.iterations_run = it;
    if (it == heldout.iterations) break;

    CameraCalibration& c = state.cameras[0];
    for (int a = 0; a < 3; ++a) {
      params[a] = c.rot_delta(a);
      params[3 + a] = c.center_delta(a);
      grad[a] = g.rot_delta[0](a);
      grad[3 + a] = g.center_delta[0](a);
    }
    params[6] = c.offset;
    grad[6] = heldout.optimize_offset ? g.offset[0] : 0.0;
    // One Adam state; per-parameter rates applied by rescaling the update.
    std::vector<double> before = params;
    adam.Step(params, grad, 1.0);
    for (int i = 0; i < 7; ++i) params[i] = before[i] + lrs[i] * (params[i] - before[i]);
    for (int a = 0; a < 3; ++a) {
      c.rot_delta(a) = params[a];
      c.center_delta(a) = params[3 + a];
    }
    c.offset = params[6];
  }
  return result;
}

CameraPose MapIntoEstimateFrame(const std::vector<CameraPose>& train_gt,
                                const std::vector<CameraPose>& train_est,
                                const CameraPose& test_gt) {
  if (train_gt.size() != train_est.size()) {
    Fail(ErrorKind::kInput, "training camera sets differ in size");
  }
  if (train_gt.size() < 3) {
    Fail(ErrorKind::kDegenerate, "need at least 3 training cameras");
  }
  Eigen::MatrixX3d src(train_gt.size(), 3);
  Eigen::MatrixX3d dst(train_est.size(), 3);
  for (size_t i = 0; i < train_gt.size(); ++i) {
    src.row(i) = train_gt[i].Center().transpose();
    dst.row(i) = train_est[i].Center().transpose();
  }
  return ApplyToPose(test_gt, Procrustes(src, dst));
}

}  // namespace hmcal
