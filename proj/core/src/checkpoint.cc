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

#include "hmcal/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "hmcal/error.h"

namespace hmcal {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'H', 'M', 'C', 'A', 'L', 'C', 'K', 'P'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

json VecJson(const Eigen::Vector3d& v) { return json::array({v(0), v(1), v(2)}); }

Eigen::Vector3d JsonVec(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

class Writer {
 public:
  void Put(double v) { data_.push_back(v); }
  void Put(const std::vector<double>& v) { data_.insert(data_.end(), v.begin(), v.end()); }
  void Put(const Eigen::Vector3d& v) { for (int i = 0; i < 3; ++i) Put(v(i)); }
  const std::vector<double>& data() const { return data_; }

 private:
  std::vector<double> data_;
};

class Reader {
 public:
  explicit Reader(std::vector<double> data) : data_(std::move(data)) {}
  double Get() {
    if (pos_ >= data_.size()) Fail(ErrorKind::kData, "checkpoint payload truncated");
    return data_[pos_++];
  }
  std::vector<double> Get(size_t n) {
    if (pos_ + n > data_.size()) Fail(ErrorKind::kData, "checkpoint payload truncated");
    std::vector<double> out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
  }
  Eigen::Vector3d GetVec() {
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) v(i) = Get();
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::vector<double> data_;
  size_t pos_ = 0;
};

}  // namespace

void WriteCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  json meta;
  meta["step"] = ckpt.step;
  const PlaneFieldConfig& fc = ckpt.field_config;
  meta["field"] = {{"spatial_resolution", fc.spatial_resolution},
                   {"time_resolution", fc.time_resolution},
                   {"feature_dim", fc.feature_dim},
                   {"bounds_lo", VecJson(fc.bounds.lo)},
                   {"bounds_hi", VecJson(fc.bounds.hi)},
                   {"num_params", ckpt.field.size()}};
  const DecoderConfig& dc = ckpt.decoder_config;
  meta["decoders"] = {{"feature_dim", dc.feature_dim},
                      {"width", dc.width},
                      {"hidden_layers", dc.hidden_layers},
                      {"geo_dim", dc.geo_dim},
                      {"direction_freqs", dc.direction_freqs},
                      {"num_params", ckpt.decoders.size()}};
  meta["time_mapping"] = {ckpt.timing.lo, ckpt.timing.hi};
  meta["frame_rate"] = ckpt.calibration.frame_rate;
  Writer w;
  w.Put(ckpt.field);
  w.Put(ckpt.decoders);
  json cams = json::array();
  for (const CameraCalibration& c : ckpt.calibration.cameras) {
    const Intrinsics& k = c.base.intrinsics;
    cams.push_back({{"camera_id", c.camera_id},
                    {"anchor", c.anchor},
                    {"fps", c.fps},
                    {"num_poses", c.base.poses.size()},
                    {"intrinsics",
                     {k.fx, k.fy, k.cx, k.cy, k.width, k.height}}});
    w.Put(c.rot_delta);
    w.Put(c.center_delta);
    w.Put(c.offset);
    for (const CameraPose& p : c.base.poses) {
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) w.Put(p.rotation(r, col));
      }
      w.Put(p.translation);
      w.Put(static_cast<double>(p.timestamp));
    }
  }
  meta["cameras"] = cams;

  const std::string text = meta.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kData, "cannot write checkpoint " + path.string());
  const uint32_t version = kCheckpointVersion;
  const uint64_t len = text.size();
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(w.data().data()),
            static_cast<std::streamsize>(w.data().size() * sizeof(double)));
  if (!out) Fail(ErrorKind::kData, "failed writing checkpoint " + path.string());
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kData, "cannot open checkpoint " + path.string());
  char magic[8];
  uint32_t version = 0;
  uint64_t len = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    Fail(ErrorKind::kData, "not a checkpoint: " + path.string());
  }
  if (version != kCheckpointVersion) {
    Fail(ErrorKind::kData, "unsupported checkpoint version " + std::to_string(version));
  }
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) Fail(ErrorKind::kData, "checkpoint metadata truncated: " + path.string());
  std::vector<char> rest((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  if (rest.size() % sizeof(double) != 0) {
    Fail(ErrorKind::kData, "checkpoint payload malformed: " + path.string());
  }
  std::vector<double> payload(rest.size() / sizeof(double));
  std::memcpy(payload.data(), rest.data(), rest.size());

  Checkpoint ck;
  try {
    const json meta = json::parse(text);
    ck.step = meta.at("step").get<int>();
    const json& f = meta.at("field");
    ck.field_config.spatial_resolution = f.at("spatial_resolution").get<std::vector<int>>();
    ck.field_config.time_resolution = f.at("time_resolution").get<int>();
    ck.field_config.feature_dim = f.at("feature_dim").get<int>();
    ck.field_config.bounds.lo = JsonVec(f.at("bounds_lo"));
    ck.field_config.bounds.hi = JsonVec(f.at("bounds_hi"));
    const json& d = meta.at("decoders");
    ck.decoder_config.feature_dim = d.at("feature_dim").get<int>();
    ck.decoder_config.width = d.at("width").get<int>();
    ck.decoder_config.hidden_layers = d.at("hidden_layers").get<int>();
    ck.decoder_config.geo_dim = d.at("geo_dim").get<int>();
    ck.decoder_config.direction_freqs = d.at("direction_freqs").get<int>();
    ck.timing.lo = meta.at("time_mapping").at(0).get<double>();
    ck.timing.hi = meta.at("time_mapping").at(1).get<double>();
    ck.calibration.frame_rate = meta.at("frame_rate").get<double>();

    Reader r(std::move(payload));
    ck.field = r.Get(f.at("num_params").get<size_t>());
    ck.decoders = r.Get(d.at("num_params").get<size_t>());
    for (const json& c : meta.at("cameras")) {
      CameraCalibration cam;
      cam.camera_id = c.at("camera_id").get<std::string>();
      cam.base.camera_id = cam.camera_id;
      cam.anchor = c.at("anchor").get<bool>();
      cam.fps = c.at("fps").get<double>();
      const json& k = c.at("intrinsics");
      cam.base.intrinsics = {k.at(0).get<double>(), k.at(1).get<double>(),
                             k.at(2).get<double>(), k.at(3).get<double>(),
                             k.at(4).get<int>(),    k.at(5).get<int>()};
      cam.rot_delta = r.GetVec();
      cam.center_delta = r.GetVec();
      cam.offset = r.Get();
      const size_t poses = c.at("num_poses").get<size_t>();
      for (size_t i = 0; i < poses; ++i) {
        CameraPose p;
        for (int row = 0; row < 3; ++row) {
          for (int col = 0; col < 3; ++col) p.rotation(row, col) = r.Get();
        }
        p.translation = r.GetVec();
        p.timestamp = static_cast<int>(r.Get());
        cam.base.poses.push_back(p);
      }
      ck.calibration.cameras.push_back(std::move(cam));
    }
    if (!r.done()) Fail(ErrorKind::kData, "checkpoint has trailing data");
  } catch (const json::exception& e) {
    Fail(ErrorKind::kData, std::string("checkpoint metadata: ") + e.what());
  }
  return ck;
}

}  // namespace hmcal
