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

#include "hmcal/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "hmcal/error.h"
#include "hmcal/render.h"
#include "hmcal/so3.h"

namespace hmcal {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFovDeg = 60.0;
constexpr double kBlobCoreDepth = 4.0;  // optical depth through a blob center

// Per-joint swing amplitude in radians.
double JointAmplitude(int j) {
  switch (j) {
    case 0: return 0.0;
    case 1: case 2: case 4: case 5: return 0.35;
    case 16: case 17: case 18: case 19: return 0.5;
    case 3: case 6: case 9: return 0.12;
    case 12: case 15: return 0.15;
    default: return 0.1;
  }
}

struct BlobAnchor {
  int joint;
  double sigma;
  Eigen::Vector3d color;
};

const std::vector<BlobAnchor>& JointBlobs() {
  static const std::vector<BlobAnchor> kBlobs = {
      {0, 0.12, {0.85, 0.15, 0.15}},  {15, 0.11, {0.15, 0.35, 0.85}},
      {20, 0.08, {0.95, 0.75, 0.1}},  {21, 0.08, {0.1, 0.75, 0.3}},
      {7, 0.08, {0.6, 0.2, 0.75}},    {8, 0.08, {0.1, 0.7, 0.75}},
      {18, 0.08, {0.9, 0.45, 0.1}},   {5, 0.09, {0.35, 0.35, 0.35}},
  };
  return kBlobs;
}

Blob MakeBlob(const Eigen::Vector3d& center, double sigma,
              const Eigen::Vector3d& color) {
  Blob b;
  b.center = center;
  b.sigma = sigma;
  b.density = kBlobCoreDepth / (sigma * std::sqrt(kTwoPi));
  b.color = color;
  return b;
}

Eigen::Matrix3d RandomRotation(Rng& rng) {
  Eigen::Quaterniond q(rng.Normal(), rng.Normal(), rng.Normal(), rng.Normal());
  return q.normalized().toRotationMatrix();
}

Eigen::Vector3d RandomUnitVector(Rng& rng) {
  Eigen::Vector3d v(rng.Normal(), rng.Normal(), rng.Normal());
  return v.normalized();
}

// World-to-camera rotation looking from `center` at `target`, z up.
Eigen::Matrix3d LookAt(const Eigen::Vector3d& center, const Eigen::Vector3d& target) {
  const Eigen::Vector3d forward = (target - center).normalized();
  const Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ()).normalized();
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  return r;
}

Intrinsics MakeIntrinsics(int width, int height) {
  if (width <= 0 || height <= 0) {
    width = 640;
    height = 480;
  }
  Intrinsics k;
  k.width = width;
  k.height = height;
  k.fx = k.fy = 0.5 * width / std::tan(kFovDeg * std::numbers::pi / 360.0);
  k.cx = 0.5 * width;
  k.cy = 0.5 * height;
  return k;
}

// Applies a rigid transform (rotation, translation) to a world state.
HumanState TransformState(const HumanState& s, const Eigen::Matrix3d& r,
                          const Eigen::Vector3d& t) {
  HumanState out = s;
  out.root_orientation = so3::Log(r * so3::Exp(s.root_orientation));
  out.root_position = r * s.root_position + t;
  return out;
}

void ApplyStateNoise(MotionSequence* seq, const NoiseSpec& noise, Rng& rng) {
  if (noise.pose_sigma == 0.0 && noise.shape_sigma == 0.0) return;
  std::vector<std::array<double, kNumShapeCoeffs>> shape_noise(seq->num_humans);
  for (auto& sn : shape_noise) {
    for (double& v : sn) v = noise.shape_sigma == 0.0 ? 0.0 : rng.Normal(0.0, noise.shape_sigma);
  }
  for (MotionFrame& f : seq->frames) {
    for (size_t h = 0; h < f.states.size(); ++h) {
      HumanState& s = f.states[h];
      if (noise.pose_sigma != 0.0) {
        for (int j = 1; j < kNumJoints; ++j) {
          for (int a = 0; a < 3; ++a) s.body_pose[j](a) += rng.Normal(0.0, noise.pose_sigma);
        }
      }
      if (noise.shape_sigma != 0.0) {
        for (int k = 0; k < kNumShapeCoeffs; ++k) s.shape[k] += shape_noise[h][k];
      }
    }
  }
}

void ApplyJointNoise(MotionSequence* seq, double sigma, Rng& rng,
                     const SkeletonModel& model) {
  if (sigma == 0.0) return;
  for (MotionFrame& f : seq->frames) {
    Eigen::MatrixX3d canon = FrameCanonicalJoints(f, model);
    Eigen::MatrixX3d global = FrameGlobalJoints(f, model);
    for (Eigen::Index i = 0; i < canon.size(); ++i) canon.data()[i] += rng.Normal(0.0, sigma);
    for (Eigen::Index i = 0; i < global.size(); ++i) global.data()[i] += rng.Normal(0.0, sigma);
    f.states.clear();
    f.joints_canonical = std::move(canon);
    f.joints_global = std::move(global);
  }
}

}  // namespace

const std::vector<std::pair<std::string, double>>& NoisePresets() {
  static const std::vector<std::pair<std::string, double>> kPresets = {
      {"sigma0.01", 0.01}, {"sigma0.02", 0.02}, {"sigma0.05", 0.05},
      {"sigma0.1", 0.1},   {"sigma0.2", 0.2}};
  return kPresets;
}

double SceneSpec::CameraFps(int camera) const {
  return camera_fps.empty() ? fps : camera_fps[camera];
}

double SceneSpec::CommonRate() const {
  double r = fps;
  if (!camera_fps.empty()) r = *std::max_element(camera_fps.begin(), camera_fps.end());
  return r;
}

void ValidateSceneSpec(const SceneSpec& spec) {
  if (spec.num_cameras < 1) Fail(ErrorKind::kConfig, "num_cameras must be >= 1");
  if (spec.num_humans < 1) Fail(ErrorKind::kConfig, "num_humans must be >= 1");
  if (spec.frames < 2) Fail(ErrorKind::kConfig, "frames must be >= 2");
  if (!(spec.fps > 0)) Fail(ErrorKind::kConfig, "fps must be positive");
  if (!spec.camera_fps.empty()) {
    if (static_cast<int>(spec.camera_fps.size()) != spec.num_cameras) {
      Fail(ErrorKind::kConfig, "camera_fps must list one rate per camera");
    }
    for (double f : spec.camera_fps) {
      if (!(f > 0)) Fail(ErrorKind::kConfig, "camera fps must be positive");
    }
  }
  if (spec.max_offset < 0) Fail(ErrorKind::kConfig, "max_offset must be >= 0");
  if (spec.min_overlap < 1) Fail(ErrorKind::kConfig, "min_overlap must be >= 1");
  if (spec.noise.joint_sigma < 0 || spec.noise.pose_sigma < 0 || spec.noise.shape_sigma < 0) {
    Fail(ErrorKind::kConfig, "noise sigmas must be >= 0");
  }
  if (spec.num_moving_cameras < 0 || spec.num_moving_cameras > spec.num_cameras) {
    Fail(ErrorKind::kConfig, "num_moving_cameras out of range");
  }
  if (spec.image_width < 0 || spec.image_height < 0 ||
      (spec.image_width == 0) != (spec.image_height == 0)) {
    Fail(ErrorKind::kConfig, "image size must be both zero or both positive");
  }
  const double rate = spec.CommonRate();
  double shortest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.num_cameras; ++i) {
    shortest = std::min(shortest, (spec.frames - 1) * rate / spec.CameraFps(i) + 1.0);
  }
  if (spec.min_overlap > shortest) {
    Fail(ErrorKind::kConfig,
         "overlap constraint unsatisfiable: min_overlap " +
             std::to_string(spec.min_overlap) + " exceeds the " +
             std::to_string(static_cast<int>(shortest)) + "-frame videos");
  }
}

SceneSpec MixedFpsSpec(SceneSpec base) {
  base.camera_fps.assign(base.num_cameras, 30.0);
  for (int i = 0; i < std::min(5, base.num_cameras); ++i) base.camera_fps[i] = 24.0;
  base.fps = 30.0;
  return base;
}

double SyntheticMotion::Wave::Eval(double s) const {
  double v = 0.0;
  for (int h = 0; h < 3; ++h) v += amplitude[h] * std::sin(kTwoPi * frequency[h] * s + phase[h]);
  return v;
}

SyntheticMotion::SyntheticMotion(int num_humans, Rng& rng) {
  auto make_wave = [&](double amplitude) {
    Wave w;
    for (int h = 0; h < 3; ++h) {
      w.amplitude[h] = amplitude * rng.Uniform(0.4, 1.0) / (h + 1);
      w.frequency[h] = rng.Uniform(0.15, 0.7);
      w.phase[h] = rng.Uniform(0.0, kTwoPi);
    }
    return w;
  };
  for (int k = 0; k < num_humans; ++k) {
    Human hu;
    hu.home = Eigen::Vector3d((k - 0.5 * (num_humans - 1)) * 0.7, 0.0, 0.92);
    for (double& b : hu.shape) b = rng.Normal(0.0, 0.5);
    for (int j = 0; j < kNumJoints; ++j) {
      for (int a = 0; a < 3; ++a) hu.pose[j][a] = make_wave(JointAmplitude(j));
    }
    const double yaw0 = rng.Uniform(0.0, kTwoPi);
    hu.root_rot = {make_wave(0.05), make_wave(0.05), make_wave(0.8)};
    hu.home_yaw = yaw0;
    hu.root_pos = {make_wave(0.15), make_wave(0.15), make_wave(0.02)};
    humans_.push_back(hu);
  }
}

HumanState SyntheticMotion::At(int human, double s) const {
  const Human& hu = humans_.at(human);
  HumanState st;
  st.shape = hu.shape;
  for (int j = 0; j < kNumJoints; ++j) {
    for (int a = 0; a < 3; ++a) st.body_pose[j](a) = hu.pose[j][a].Eval(s);
  }
  st.body_pose[0].setZero();
  const Eigen::Matrix3d yaw =
      so3::Exp(Eigen::Vector3d(0.0, 0.0, hu.home_yaw + hu.root_rot[2].Eval(s)));
  const Eigen::Matrix3d tilt =
      so3::Exp(Eigen::Vector3d(hu.root_rot[0].Eval(s), hu.root_rot[1].Eval(s), 0.0));
  st.root_orientation = so3::Log(yaw * tilt);
  st.root_position = hu.home + Eigen::Vector3d(hu.root_pos[0].Eval(s), hu.root_pos[1].Eval(s),
                                               hu.root_pos[2].Eval(s));
  return st;
}

std::vector<Blob> LandmarkBlobs() {
  return {
      MakeBlob({0.85, 0.85, 0.1}, 0.1, {0.2, 0.2, 0.9}),
      MakeBlob({-0.85, 0.85, 0.1}, 0.1, {0.9, 0.2, 0.6}),
      MakeBlob({0.85, -0.85, 0.1}, 0.1, {0.2, 0.8, 0.2}),
      MakeBlob({-0.85, -0.85, 0.1}, 0.1, {0.9, 0.6, 0.2}),
      MakeBlob({0.0, 0.9, 1.7}, 0.1, {0.5, 0.1, 0.1}),
      MakeBlob({0.0, -0.9, 1.7}, 0.1, {0.1, 0.4, 0.5}),
  };
}

std::vector<Blob> SceneBlobs(const SyntheticMotion& motion, double seconds,
                             const SkeletonModel& model) {
  std::vector<Blob> blobs = LandmarkBlobs();
  for (int h = 0; h < motion.num_humans(); ++h) {
    const JointSet joints = GlobalJoints(motion.At(h, seconds), model);
    const double tint = h == 0 ? 0.0 : 0.25 * h;
    for (const BlobAnchor& a : JointBlobs()) {
      Eigen::Vector3d c = a.color;
      if (tint > 0) c = (1.0 - tint) * c + tint * Eigen::Vector3d(0.5, 0.5, 0.5);
      blobs.push_back(MakeBlob(joints.positions.row(a.joint).transpose(), a.sigma, c));
    }
  }
  return blobs;
}

Image RenderBlobScene(const std::vector<Blob>& blobs, const CameraPose& pose,
                      const Intrinsics& intrinsics, const SceneInfo& scene) {
  Image img(intrinsics.width, intrinsics.height);
  struct Hit {
    double depth;
    double alpha;
    int blob;
  };
  std::vector<Hit> hits;
  for (int y = 0; y < intrinsics.height; ++y) {
    for (int x = 0; x < intrinsics.width; ++x) {
      const Ray ray = GenerateRay(pose, intrinsics, x + 0.5, y + 0.5);
      hits.clear();
      for (size_t b = 0; b < blobs.size(); ++b) {
        const Blob& blob = blobs[b];
        const Eigen::Vector3d v = blob.center - ray.origin;
        const double t = v.dot(ray.direction);
        const double r2 = std::max(0.0, v.squaredNorm() - t * t);
        const double s2 = blob.sigma * std::numbers::sqrt2;
        const double along = 0.5 * (std::erf((scene.far - t) / s2) -
                                    std::erf((scene.near - t) / s2));
        const double depth = blob.density * blob.sigma * std::sqrt(kTwoPi) *
                             std::exp(-r2 / (2.0 * blob.sigma * blob.sigma)) * along;
        if (depth > 0.0) hits.push_back({t, 1.0 - std::exp(-depth), static_cast<int>(b)});
      }
      std::stable_sort(hits.begin(), hits.end(),
                       [](const Hit& a, const Hit& b) { return a.depth < b.depth; });
      Eigen::Vector3d c = Eigen::Vector3d::Zero();
      double trans = 1.0;
      for (const Hit& h : hits) {
        c += trans * h.alpha * blobs[h.blob].color;
        trans *= 1.0 - h.alpha;
      }
      img.SetPixel(x, y, c + trans * scene.background);
    }
  }
  return img;
}

SceneInfo DefaultSceneInfo(double frame_rate) {
  SceneInfo info;
  info.bounds.lo = Eigen::Vector3d(-1.1, -1.1, -0.2);
  info.bounds.hi = Eigen::Vector3d(1.1, 1.1, 2.0);
  info.background = Eigen::Vector3d::Ones();
  info.near = 1.0;
  info.far = 5.0;
  info.frame_rate = frame_rate;
  return info;
}

Dataset Generate(const SceneSpec& spec) {
  ValidateSceneSpec(spec);
  const SkeletonModel& model = SkeletonModel::Default();
  const int n = spec.num_cameras;
  const double rate = spec.CommonRate();
  Rng root(spec.seed);
  Rng motion_rng = root.Fork(1);
  Rng camera_rng = root.Fork(2);
  Rng offset_rng = root.Fork(3);
  Rng frame_rng = root.Fork(4);

  Dataset data;
  data.id = "synth-" + std::to_string(spec.seed);
  data.scene = DefaultSceneInfo(rate);
  const SyntheticMotion motion(spec.num_humans, motion_rng);

  // Start times on the common-rate timeline; every pair keeps min_overlap.
  double shortest = std::numeric_limits<double>::infinity();
  std::vector<double> scale(n);
  for (int i = 0; i < n; ++i) {
    scale[i] = rate / spec.CameraFps(i);
    shortest = std::min(shortest, (spec.frames - 1) * scale[i] + 1.0);
  }
  const int spread = std::min<int>(spec.max_offset,
                                   static_cast<int>(std::floor(shortest - spec.min_overlap)));
  std::vector<int> start(n);
  for (int i = 0; i < n; ++i) {
    start[i] = static_cast<int>(offset_rng.UniformInt(0, spread));
    data.gt.offsets.push_back(-start[i]);
  }

  const Intrinsics k = MakeIntrinsics(spec.image_width, spec.image_height);
  const Eigen::Vector3d target(0.0, 0.0, 0.9);
  for (int i = 0; i < n; ++i) {
    const double angle = kTwoPi * i / n + camera_rng.Uniform(-0.2, 0.2);
    const double radius = camera_rng.Uniform(2.7, 3.3);
    const double height = camera_rng.Uniform(0.7, 1.9);
    const Eigen::Vector3d aim =
        target + Eigen::Vector3d(camera_rng.Normal(0.0, 0.1), camera_rng.Normal(0.0, 0.1),
                                 camera_rng.Normal(0.0, 0.1));
    CameraTrajectory traj;
    traj.camera_id = "cam" + std::to_string(i);
    traj.intrinsics = k;
    const bool moving = i >= n - spec.num_moving_cameras;
    const int poses = moving ? spec.frames : 1;
    for (int f = 0; f < poses; ++f) {
      const double seconds = (start[i] + f * scale[i]) / rate;
      const double a = angle + (moving ? 0.1 * seconds : 0.0);
      const Eigen::Vector3d center(radius * std::cos(a), radius * std::sin(a), height);
      traj.poses.push_back(CameraPose::FromCenter(LookAt(center, aim), center, f));
    }
    data.gt.world_trajectories.push_back(traj);

    SimilarityTransform t;
    if (spec.randomize_frames) {
      const double s = spec.random_scale ? std::exp(frame_rng.Uniform(std::log(0.5), std::log(2.0)))
                                         : 1.0;
      const Eigen::Matrix3d r = RandomRotation(frame_rng);
      const Eigen::Vector3d tr(frame_rng.Normal(0.0, 2.0), frame_rng.Normal(0.0, 2.0),
                               frame_rng.Normal(0.0, 2.0));
      t = SimilarityTransform::FromScaleRotationTranslation(s, r, tr);
    }
    data.gt.sim3.push_back(t);
    data.cameras.push_back(ApplyToTrajectory(traj, t));
  }

  for (int i = 0; i < n; ++i) {
    const SimilarityTransform& t = data.gt.sim3[i];
    const double s = t.Scale();
    const Eigen::Vector3d rigid_t = t.Apply(Eigen::Vector3d(Eigen::Vector3d::Zero())) / s;
    MotionSequence seq;
    seq.camera_id = data.cameras[i].camera_id;
    seq.fps = spec.CameraFps(i);
    seq.num_humans = spec.num_humans;
    for (int f = 0; f < spec.frames; ++f) {
      const double seconds = (start[i] + f * scale[i]) / rate;
      MotionFrame frame;
      for (int h = 0; h < spec.num_humans; ++h) {
        const HumanState w = motion.At(h, seconds);
        frame.states.push_back(t.IsIdentity() ? w : TransformState(w, t.rotation, rigid_t));
      }
      seq.frames.push_back(std::move(frame));
    }
    Rng noise_rng = Rng(spec.seed ^ 0x9e3779b97f4a7c15ULL).Fork(i);
    ApplyStateNoise(&seq, spec.noise, noise_rng);
    if (s != 1.0) {
      for (MotionFrame& f : seq.frames) {
        f.joints_canonical = FrameCanonicalJoints(f, model);
        f.joints_global = s * FrameGlobalJoints(f, model);
        f.states.clear();
      }
    }
    ApplyJointNoise(&seq, spec.noise.joint_sigma, noise_rng, model);
    data.motions.push_back(std::move(seq));
  }

  if (spec.image_width > 0) {
    data.images.resize(n);
    for (int i = 0; i < n; ++i) {
      const CameraTrajectory& traj = data.gt.world_trajectories[i];
      for (int f = 0; f < spec.frames; ++f) {
        const double seconds = (start[i] + f * scale[i]) / rate;
        const std::vector<Blob> blobs = SceneBlobs(motion, seconds, model);
        data.images[i].push_back(
            RenderBlobScene(blobs, traj.PoseAt(f), traj.intrinsics, data.scene).Quantized());
      }
    }
  }
  return data;
}

std::vector<MotionSequence> Perturb(const std::vector<MotionSequence>& motions,
                                    const NoiseSpec& noise, uint64_t seed,
                                    const SkeletonModel& model) {
  std::vector<MotionSequence> out = motions;
  for (size_t i = 0; i < out.size(); ++i) {
    Rng rng = Rng(seed ^ 0x9e3779b97f4a7c15ULL).Fork(i);
    ApplyStateNoise(&out[i], noise, rng);
    ApplyJointNoise(&out[i], noise.joint_sigma, rng, model);
  }
  return out;
}

CalibrationState GroundTruthCalibration(const Dataset& data) {
  CalibrationState state;
  state.frame_rate = data.scene.frame_rate;
  for (size_t i = 0; i < data.gt.world_trajectories.size(); ++i) {
    CameraCalibration c;
    c.camera_id = data.gt.world_trajectories[i].camera_id;
    c.base = data.gt.world_trajectories[i];
    c.fps = data.motions.empty() ? data.scene.frame_rate : data.motions[i].fps;
    c.offset = data.gt.offsets[i];
    c.anchor = i == 0;
    state.cameras.push_back(std::move(c));
  }
  return state;
}

CalibrationState PerturbCalibration(const CalibrationState& gt, double rot_deg,
                                    double center_fraction, double offset_frames,
                                    uint64_t seed) {
  Rng rng(seed);
  std::vector<CameraPose> firsts;
  for (const CameraCalibration& c : gt.cameras) firsts.push_back(c.base.poses.front());
  const double extent = CameraExtent(firsts);
  CalibrationState out = gt;
  for (CameraCalibration& c : out.cameras) {
    const Eigen::Vector3d axis = RandomUnitVector(rng);
    const Eigen::Vector3d dir = RandomUnitVector(rng);
    const double sign = rng.Uniform() < 0.5 ? -1.0 : 1.0;
    if (c.anchor) continue;
    c.offset += sign * offset_frames;
    if (!c.base.IsStatic()) continue;
    CameraPose& p = c.base.poses.front();
    const Eigen::Matrix3d r =
        p.rotation * so3::Exp(axis * (rot_deg * std::numbers::pi / 180.0)).transpose();
    p = CameraPose::FromCenter(r, p.Center() + center_fraction * extent * dir, p.timestamp);
  }
  return out;
}

}  // namespace hmcal
