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

#include "hmcal/formats.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hmcal/error.h"
#include "json.hpp"

namespace hmcal {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json Vec(const Eigen::Vector3d& v) { return json::array({v(0), v(1), v(2)}); }

Eigen::Vector3d ToVec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected [3] array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json Mat(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

Eigen::Matrix3d ToMat(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected [3][3] array");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) m.row(r) = ToVec(j[r]).transpose();
  return m;
}

json Rows(const Eigen::MatrixX3d& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

Eigen::MatrixX3d ToRows(const json& j) {
  Eigen::MatrixX3d m(j.size(), 3);
  for (size_t r = 0; r < j.size(); ++r) m.row(r) = ToVec(j[r]).transpose();
  return m;
}

json Number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double ToNumber(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::runtime_error("unexpected string number '" + s + "'");
  }
  return j.get<double>();
}

json IntrinsicsJson(const Intrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
          {"width", k.width}, {"height", k.height}};
}

Intrinsics ToIntrinsics(const json& j) {
  Intrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  return k;
}

json TrajectoryJson(const CameraTrajectory& traj) {
  json frames = json::array();
  for (const CameraPose& p : traj.poses) {
    frames.push_back({{"t", p.timestamp}, {"R", Mat(p.rotation)}, {"tau", Vec(p.translation)}});
  }
  return {{"camera_id", traj.camera_id},
          {"frames", frames},
          {"intrinsics", IntrinsicsJson(traj.intrinsics)}};
}

CameraTrajectory ToTrajectory(const json& j) {
  CameraTrajectory traj;
  traj.camera_id = j.at("camera_id").get<std::string>();
  for (const json& f : j.at("frames")) {
    CameraPose p;
    p.timestamp = f.at("t").get<int>();
    p.rotation = ToMat(f.at("R"));
    p.translation = ToVec(f.at("tau"));
    traj.poses.push_back(p);
  }
  traj.intrinsics = ToIntrinsics(j.at("intrinsics"));
  return traj;
}

json Sim3Json(const SimilarityTransform& t) {
  return {{"scale_src", t.scale_src},       {"scale_dst", t.scale_dst},
          {"centroid_src", Vec(t.centroid_src)}, {"centroid_dst", Vec(t.centroid_dst)},
          {"rotation", Mat(t.rotation)}};
}

SimilarityTransform ToSim3(const json& j) {
  SimilarityTransform t;
  t.scale_src = j.at("scale_src").get<double>();
  t.scale_dst = j.at("scale_dst").get<double>();
  t.centroid_src = ToVec(j.at("centroid_src"));
  t.centroid_dst = ToVec(j.at("centroid_dst"));
  t.rotation = ToMat(j.at("rotation"));
  return t;
}

json ReportJson(const CalibReport& r) {
  auto err = [](const CameraError& e) {
    return json{{"camera_id", e.camera_id},
                {"rotation_deg", Number(e.rotation_deg)},
                {"translation", Number(e.translation)},
                {"offset", Number(e.offset)}};
  };
  json cams = json::array();
  for (const CameraError& e : r.cameras) cams.push_back(err(e));
  return {{"dataset_id", r.dataset_id}, {"stage", r.stage},
          {"scene_extent", r.scene_extent}, {"cameras", cams}, {"mean", err(r.mean)}};
}

CalibReport ToReport(const json& j) {
  auto err = [](const json& e) {
    CameraError c;
    c.camera_id = e.at("camera_id").get<std::string>();
    c.rotation_deg = ToNumber(e.at("rotation_deg"));
    c.translation = ToNumber(e.at("translation"));
    c.offset = ToNumber(e.at("offset"));
    return c;
  };
  CalibReport r;
  r.dataset_id = j.at("dataset_id").get<std::string>();
  r.stage = j.at("stage").get<std::string>();
  r.scene_extent = j.at("scene_extent").get<double>();
  for (const json& c : j.at("cameras")) r.cameras.push_back(err(c));
  r.mean = err(j.at("mean"));
  return r;
}

json SceneJson(const SceneInfo& s) {
  return {{"bounds_lo", Vec(s.bounds.lo)}, {"bounds_hi", Vec(s.bounds.hi)},
          {"background", Vec(s.background)}, {"near", s.near}, {"far", s.far},
          {"frame_rate", s.frame_rate}};
}

SceneInfo ToScene(const json& j) {
  SceneInfo s;
  s.bounds.lo = ToVec(j.at("bounds_lo"));
  s.bounds.hi = ToVec(j.at("bounds_hi"));
  s.background = ToVec(j.at("background"));
  s.near = j.at("near").get<double>();
  s.far = j.at("far").get<double>();
  s.frame_rate = j.at("frame_rate").get<double>();
  return s;
}

void WriteText(const std::string& text, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kData, "cannot write " + path.string());
  out << text << '\n';
  if (!out) Fail(ErrorKind::kData, "failed writing " + path.string());
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kData, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses and converts, reporting any JSON error against `path`.
template <typename Fn>
auto ParseFile(const fs::path& path, Fn&& convert) {
  const std::string text = ReadText(path);
  try {
    return convert(json::parse(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    Fail(ErrorKind::kData, "malformed " + path.string() + ": " + e.what());
  }
}

json MotionJson(const MotionSequence& seq) {
  json frames = json::array();
  for (const MotionFrame& f : seq.frames) {
    if (f.joints_only()) {
      if (!f.joints_canonical || !f.joints_global) {
        Fail(ErrorKind::kInput, "joints-only frame lacks joint sets");
      }
      frames.push_back({{"joints_canonical", Rows(*f.joints_canonical)},
                        {"joints_global", Rows(*f.joints_global)}});
      continue;
    }
    json states = json::array();
    for (const HumanState& s : f.states) {
      json theta = json::array();
      for (const Eigen::Vector3d& v : s.body_pose) theta.push_back(Vec(v));
      states.push_back({{"phi", Vec(s.root_orientation)},
                        {"theta", theta},
                        {"beta", s.shape},
                        {"gamma", Vec(s.root_position)}});
    }
    frames.push_back({{"states", states}});
  }
  return {{"camera_id", seq.camera_id}, {"fps", seq.fps}, {"humans", seq.num_humans},
          {"frames", frames}};
}

MotionSequence ToMotion(const json& j) {
  MotionSequence seq;
  seq.camera_id = j.at("camera_id").get<std::string>();
  seq.fps = j.at("fps").get<double>();
  seq.num_humans = j.at("humans").get<int>();
  for (const json& f : j.at("frames")) {
    MotionFrame frame;
    if (f.contains("states")) {
      for (const json& s : f.at("states")) {
        HumanState st;
        st.root_orientation = ToVec(s.at("phi"));
        const json& theta = s.at("theta");
        if (theta.size() != kNumJoints) throw std::runtime_error("theta must have 22 rows");
        for (int k = 0; k < kNumJoints; ++k) st.body_pose[k] = ToVec(theta[k]);
        const json& beta = s.at("beta");
        if (beta.size() != kNumShapeCoeffs) throw std::runtime_error("beta must have 16 values");
        for (int k = 0; k < kNumShapeCoeffs; ++k) st.shape[k] = beta[k].get<double>();
        st.root_position = ToVec(s.at("gamma"));
        frame.states.push_back(st);
      }
    } else {
      frame.joints_canonical = ToRows(f.at("joints_canonical"));
      frame.joints_global = ToRows(f.at("joints_global"));
    }
    seq.frames.push_back(std::move(frame));
  }
  ValidateMotion(seq);
  return seq;
}

json CalibrationJson(const CalibrationState& state) {
  json cams = json::array();
  for (const CameraCalibration& c : state.cameras) {
    json poses = json::array();
    for (const CameraPose& b : c.base.poses) {
      const CameraPose p = c.PoseAt(b.timestamp);
      poses.push_back({{"t", p.timestamp}, {"R", Mat(p.rotation)}, {"tau", Vec(p.translation)}});
    }
    json base = TrajectoryJson(c.base);
    cams.push_back({{"camera_id", c.camera_id},
                    {"anchor", c.anchor},
                    {"fps", c.fps},
                    {"offset", c.offset},
                    {"frames", poses},
                    {"rot_delta", Vec(c.rot_delta)},
                    {"center_delta", Vec(c.center_delta)},
                    {"base", base}});
  }
  return cams;
}

}  // namespace

std::string MotionToJson(const MotionSequence& seq) { return MotionJson(seq).dump(); }

MotionSequence MotionFromJson(const std::string& text) {
  try {
    return ToMotion(json::parse(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    Fail(ErrorKind::kData, std::string("malformed motion: ") + e.what());
  }
}

void WriteMotion(const MotionSequence& seq, const fs::path& path) {
  WriteText(MotionToJson(seq), path);
}

MotionSequence ReadMotion(const fs::path& path) {
  return ParseFile(path, [](const json& j) { return ToMotion(j); });
}

void WriteCamera(const CameraTrajectory& traj, const fs::path& path) {
  WriteText(TrajectoryJson(traj).dump(2), path);
}

CameraTrajectory ReadCamera(const fs::path& path) {
  return ParseFile(path, [](const json& j) { return ToTrajectory(j); });
}

void WritePoses(const std::vector<CameraTrajectory>& cams, const fs::path& path) {
  json arr = json::array();
  for (const CameraTrajectory& c : cams) arr.push_back(TrajectoryJson(c));
  WriteText(json{{"cameras", arr}}.dump(2), path);
}

std::vector<CameraTrajectory> ReadPoses(const fs::path& path) {
  return ParseFile(path, [](const json& j) {
    std::vector<CameraTrajectory> out;
    for (const json& c : j.at("cameras")) out.push_back(ToTrajectory(c));
    return out;
  });
}

void WriteSim3(const std::vector<std::string>& camera_ids,
               const std::vector<SimilarityTransform>& transforms,
               const fs::path& path) {
  if (camera_ids.size() != transforms.size()) {
    Fail(ErrorKind::kInput, "camera ids and transforms differ in count");
  }
  json arr = json::array();
  for (size_t i = 0; i < transforms.size(); ++i) {
    json t = Sim3Json(transforms[i]);
    t["camera_id"] = camera_ids[i];
    arr.push_back(t);
  }
  WriteText(json{{"cameras", arr}}.dump(2), path);
}

std::vector<SimilarityTransform> ReadSim3(const fs::path& path) {
  return ParseFile(path, [](const json& j) {
    std::vector<SimilarityTransform> out;
    for (const json& c : j.at("cameras")) out.push_back(ToSim3(c));
    return out;
  });
}

void WriteOffsets(const OffsetsFile& file, const fs::path& path) {
  const int n = static_cast<int>(file.offsets.offsets.size());
  json cost = json::array();
  json off = json::array();
  for (int i = 0; i < file.matrices.cost.rows(); ++i) {
    json crow = json::array();
    json orow = json::array();
    for (int j = 0; j < file.matrices.cost.cols(); ++j) {
      crow.push_back(file.matrices.cost(i, j));
      orow.push_back(file.matrices.offset(i, j));
    }
    cost.push_back(crow);
    off.push_back(orow);
  }
  json out = {{"anchor", file.offsets.anchor},
              {"offsets", file.offsets.offsets},
              {"cost_matrix", cost},
              {"offset_matrix", off},
              {"frame_rate", file.matrices.frame_rate},
              {"camera_ids", file.camera_ids},
              {"num_cameras", n}};
  WriteText(out.dump(2), path);
}

OffsetsFile ReadOffsets(const fs::path& path) {
  return ParseFile(path, [](const json& j) {
    OffsetsFile f;
    f.offsets.anchor = j.at("anchor").get<int>();
    f.offsets.offsets = j.at("offsets").get<std::vector<int>>();
    const json& cost = j.at("cost_matrix");
    const json& off = j.at("offset_matrix");
    const int n = static_cast<int>(cost.size());
    f.matrices.cost.resize(n, n);
    f.matrices.offset.resize(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        f.matrices.cost(r, c) = cost.at(r).at(c).get<double>();
        f.matrices.offset(r, c) = off.at(r).at(c).get<int>();
      }
    }
    f.matrices.frame_rate = j.at("frame_rate").get<double>();
    f.camera_ids = j.at("camera_ids").get<std::vector<std::string>>();
    return f;
  });
}

void WriteDataset(const Dataset& data, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<std::string> ids;
  for (const CameraTrajectory& c : data.cameras) ids.push_back(c.camera_id);
  if (data.motions.size() != ids.size()) {
    Fail(ErrorKind::kInput, "dataset motions and cameras differ in count");
  }
  WriteText(json{{"id", data.id}, {"cameras", ids}, {"scene", SceneJson(data.scene)}}.dump(2),
            dir / "dataset.json");
  for (size_t i = 0; i < ids.size(); ++i) {
    WriteMotion(data.motions[i], dir / "motions" / (ids[i] + ".json"));
    WriteCamera(data.cameras[i], dir / "cameras" / (ids[i] + ".json"));
  }
  for (size_t i = 0; i < data.images.size(); ++i) {
    const fs::path cam_dir = dir / "images" / ids[i];
    fs::create_directories(cam_dir);
    for (size_t f = 0; f < data.images[i].size(); ++f) {
      char name[32];
      std::snprintf(name, sizeof(name), "%06zu.ppm", f);
      WritePpm(data.images[i][f], cam_dir / name);
    }
  }
  if (!data.gt.offsets.empty()) {
    json sims = json::array();
    json trajs = json::array();
    for (size_t i = 0; i < data.gt.sim3.size(); ++i) {
      json t = Sim3Json(data.gt.sim3[i]);
      t["camera_id"] = ids[i];
      sims.push_back(t);
    }
    for (const CameraTrajectory& t : data.gt.world_trajectories) trajs.push_back(TrajectoryJson(t));
    WriteText(json{{"offsets", data.gt.offsets}, {"sim3", sims}, {"world_trajectories", trajs}}
                  .dump(2),
              dir / "gt.json");
  }
}

bool HasGroundTruth(const fs::path& dir) { return fs::exists(dir / "gt.json"); }

Dataset ReadDataset(const fs::path& dir, bool load_images) {
  if (!fs::is_directory(dir)) Fail(ErrorKind::kData, "dataset directory not found: " + dir.string());
  Dataset data;
  std::vector<std::string> ids;
  if (fs::exists(dir / "dataset.json")) {
    ParseFile(dir / "dataset.json", [&](const json& j) {
      data.id = j.at("id").get<std::string>();
      ids = j.at("cameras").get<std::vector<std::string>>();
      data.scene = ToScene(j.at("scene"));
      return 0;
    });
  } else {
    data.id = dir.filename().string();
    if (!fs::is_directory(dir / "motions")) {
      Fail(ErrorKind::kData, "missing motions directory: " + (dir / "motions").string());
    }
    for (const auto& e : fs::directory_iterator(dir / "motions")) {
      if (e.path().extension() == ".json") ids.push_back(e.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
  }
  for (const std::string& id : ids) {
    data.motions.push_back(ReadMotion(dir / "motions" / (id + ".json")));
    data.cameras.push_back(ReadCamera(dir / "cameras" / (id + ".json")));
  }
  if (!fs::exists(dir / "dataset.json") && !data.motions.empty()) {
    data.scene.frame_rate = 0.0;
    for (const MotionSequence& m : data.motions) data.scene.frame_rate = std::max(data.scene.frame_rate, m.fps);
  }
  if (load_images && fs::is_directory(dir / "images")) {
    data.images.resize(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
      for (int f = 0; f < data.motions[i].size(); ++f) {
        char name[32];
        std::snprintf(name, sizeof(name), "%06d.ppm", f);
        const fs::path p = dir / "images" / ids[i] / name;
        data.images[i].push_back(fs::exists(p) ? ReadPpm(p) : Image());
      }
    }
  }
  if (HasGroundTruth(dir)) {
    ParseFile(dir / "gt.json", [&](const json& j) {
      data.gt.offsets = j.at("offsets").get<std::vector<int>>();
      for (const json& s : j.at("sim3")) data.gt.sim3.push_back(ToSim3(s));
      for (const json& t : j.at("world_trajectories")) {
        data.gt.world_trajectories.push_back(ToTrajectory(t));
      }
      return 0;
    });
    if (data.gt.offsets.size() != ids.size() || data.gt.sim3.size() != ids.size() ||
        data.gt.world_trajectories.size() != ids.size()) {
      Fail(ErrorKind::kData, "gt.json camera count does not match the dataset");
    }
  }
  return data;
}

void WriteRefined(const RefinedFile& file, const fs::path& path) {
  const TrainSchedule& s = file.schedule;
  json sched = {{"total_steps", s.total_steps},
                {"coarse_to_fine_end", s.coarse_to_fine_end},
                {"s0", s.s0},
                {"s1", s.s1},
                {"num_levels", s.num_levels},
                {"reg_decay_start", s.reg_decay_start},
                {"reg_decay_end", s.reg_decay_end},
                {"reg_floor", s.reg_floor},
                {"coarse_to_fine", s.coarse_to_fine},
                {"curriculum", s.curriculum}};
  json out = {{"frame_rate", file.calibration.frame_rate},
              {"steps", file.steps},
              {"time_mapping", {file.timing.lo, file.timing.hi}},
              {"schedule", sched},
              {"cameras", CalibrationJson(file.calibration)}};
  WriteText(out.dump(2), path);
}

RefinedFile ReadRefined(const fs::path& path) {
  return ParseFile(path, [](const json& j) {
    RefinedFile f;
    f.calibration.frame_rate = j.at("frame_rate").get<double>();
    f.steps = j.at("steps").get<int>();
    f.timing.lo = j.at("time_mapping").at(0).get<double>();
    f.timing.hi = j.at("time_mapping").at(1).get<double>();
    const json& s = j.at("schedule");
    f.schedule.total_steps = s.at("total_steps").get<int>();
    f.schedule.coarse_to_fine_end = s.at("coarse_to_fine_end").get<int>();
    f.schedule.s0 = s.at("s0").get<int>();
    f.schedule.s1 = s.at("s1").get<int>();
    f.schedule.num_levels = s.at("num_levels").get<int>();
    f.schedule.reg_decay_start = s.at("reg_decay_start").get<int>();
    f.schedule.reg_decay_end = s.at("reg_decay_end").get<int>();
    f.schedule.reg_floor = s.at("reg_floor").get<double>();
    f.schedule.coarse_to_fine = s.at("coarse_to_fine").get<bool>();
    f.schedule.curriculum = s.at("curriculum").get<bool>();
    for (const json& c : j.at("cameras")) {
      CameraCalibration cam;
      cam.camera_id = c.at("camera_id").get<std::string>();
      cam.anchor = c.at("anchor").get<bool>();
      cam.fps = c.at("fps").get<double>();
      cam.offset = c.at("offset").get<double>();
      cam.rot_delta = ToVec(c.at("rot_delta"));
      cam.center_delta = ToVec(c.at("center_delta"));
      cam.base = ToTrajectory(c.at("base"));
      f.calibration.cameras.push_back(std::move(cam));
    }
    return f;
  });
}

std::string MetricsLine(const MetricsRecord& rec) {
  return json{{"step", rec.step},
              {"loss", Number(rec.loss)},
              {"rot_err_deg", Number(rec.rot_err_deg)},
              {"trans_err", Number(rec.trans_err)},
              {"dt_err", Number(rec.dt_err)}}
      .dump();
}

void WriteReport(const ReportFile& report, const fs::path& path) {
  json images = json::array();
  for (const ImageMetricRow& r : report.images) {
    images.push_back({{"camera_id", r.camera_id},
                      {"frame", r.frame},
                      {"psnr", Number(r.metrics.psnr)},
                      {"ssim", Number(r.metrics.ssim)}});
  }
  json out = {{"init", ReportJson(report.init)},
              {"refine", report.refine ? ReportJson(*report.refine) : json(nullptr)},
              {"image_metrics", images}};
  WriteText(out.dump(2), path);
}

ReportFile ReadReport(const fs::path& path) {
  return ParseFile(path, [](const json& j) {
    ReportFile r;
    r.init = ToReport(j.at("init"));
    if (!j.at("refine").is_null()) r.refine = ToReport(j.at("refine"));
    for (const json& row : j.at("image_metrics")) {
      ImageMetricRow m;
      m.camera_id = row.at("camera_id").get<std::string>();
      m.frame = row.at("frame").get<int>();
      m.metrics.psnr = ToNumber(row.at("psnr"));
      m.metrics.ssim = ToNumber(row.at("ssim"));
      r.images.push_back(m);
    }
    return r;
  });
}

}  // namespace hmcal
