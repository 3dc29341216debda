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


#include "config.h"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hmcal/error.h"

namespace hmcal::cli {
namespace {

using nlohmann::json;

json DeskPreset() {
  return {
      {"simulate",
       {{"num_cameras", 10},
        {"frames", 120},
        {"max_offset", 20},
        {"min_overlap", 60},
        {"image_width", 32},
        {"image_height", 32}}},
      {"refine",
       {{"total_steps", 20000},
        {"coarse_to_fine_end", 6667},
        {"s0", 400},
        {"s1", 4000},
        {"reg_decay_start", 6667},
        {"reg_decay_end", 10000},
        {"spatial_resolution", {8, 16}},
        {"time_resolution", 16},
        {"decoder_width", 32},
        {"samples", 24},
        {"batch_rays", 64},
        {"lr_final_factor", 0.1},
        {"log_every", 1000}}},
  };
}

json TinyPreset() {
  return {
      {"simulate",
       {{"num_cameras", 4},
        {"frames", 40},
        {"max_offset", 6},
        {"min_overlap", 24},
        {"image_width", 12},
        {"image_height", 12}}},
      {"refine",
       {{"total_steps", 40},
        {"coarse_to_fine_end", 12},
        {"s0", 4},
        {"s1", 8},
        {"reg_decay_start", 12},
        {"reg_decay_end", 20},
        {"spatial_resolution", {4, 8}},
        {"time_resolution", 4},
        {"feature_dim", 4},
        {"decoder_width", 8},
        {"samples", 8},
        {"batch_rays", 16},
        {"log_every", 10}}},
      {"eval", {{"frames", 1}}},
  };
}

void CollectLeaves(const json& node, const std::string& prefix,
                   std::vector<std::string>* out) {
  if (!node.is_object()) {
    out->push_back(prefix);
    return;
  }
  for (const auto& [key, value] : node.items()) {
    CollectLeaves(value, prefix.empty() ? key : prefix + "." + key, out);
  }
}

bool Compatible(const json& base, const json& patch) {
  if (base.is_null() || patch.is_null()) return true;
  if (base.is_number_float()) return patch.is_number();
  if (base.is_number_integer()) return patch.is_number_integer();
  return base.type() == patch.type();
}

void MergeAt(json* base, const json& patch, const std::string& where) {
  if (!patch.is_object()) {
    Fail(ErrorKind::kConfig, "config section '" + where + "' must be an object");
  }
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base->contains(key)) Fail(ErrorKind::kConfig, "unknown config key '" + path + "'");
    json& slot = (*base)[key];
    if (slot.is_object()) {
      MergeAt(&slot, value, path);
      continue;
    }
    if (!Compatible(slot, value)) {
      Fail(ErrorKind::kConfig, "config key '" + path + "' expects " +
                                   std::string(slot.type_name()) + ", got " +
                                   value.type_name());
    }
    slot = value;
  }
}

AnchorMode ParseAnchorMode(const std::string& name) {
  if (name == "cost") return AnchorMode::kCost;
  if (name == "pair") return AnchorMode::kPair;
  if (name == "first") return AnchorMode::kFirst;
  Fail(ErrorKind::kConfig, "unknown anchor mode '" + name + "'");
}

void Require(bool ok, const std::string& message) {
  if (!ok) Fail(ErrorKind::kConfig, message);
}

}  // namespace

std::filesystem::path PipelineConfig::DatasetDir() const {
  return dataset_dir.empty() ? out_dir / "dataset" : dataset_dir;
}

json DefaultConfigJson() {
  const RegularizerWeights reg;
  const OptimizerConfig opt;
  return {
      {"paths", {{"dataset", ""}, {"out", "hmcal_out"}}},
      {"stages",
       {{"simulate", true}, {"sync", true}, {"pose", true}, {"refine", true},
        {"eval", true}}},
      {"seed", 0},
      {"threads", 1},
      {"simulate",
       {{"num_cameras", 10},
        {"num_humans", 1},
        {"frames", 120},
        {"fps", 30.0},
        {"camera_fps", json::array()},
        {"mixed_fps", false},
        {"max_offset", 20},
        {"min_overlap", 60},
        {"joint_sigma", 0.0},
        {"pose_sigma", 0.0},
        {"shape_sigma", 0.0},
        {"randomize_frames", true},
        {"random_scale", false},
        {"num_moving_cameras", 0},
        {"image_width", 32},
        {"image_height", 32},
        {"noise_sweep", false}}},
      {"sync", {{"window", nullptr}}},
      {"pose", {{"anchor_mode", "cost"}}},
      {"refine",
       {{"total_steps", 300000},
        {"coarse_to_fine_end", 100000},
        {"s0", 2000},
        {"s1", 18000},
        {"reg_decay_start", 100000},
        {"reg_decay_end", 150000},
        {"reg_floor", 0.01},
        {"coarse_to_fine", true},
        {"curriculum", true},
        {"ablation", "full"},
        {"spatial_resolution", {24, 48, 96, 192, 384}},
        {"time_resolution", 240},
        {"feature_dim", 16},
        {"decoder_width", 64},
        {"decoder_layers", 2},
        {"geo_dim", 15},
        {"direction_freqs", 4},
        {"samples", 32},
        {"jitter", true},
        {"batch_rays", 256},
        {"lr_planes", opt.lr_planes},
        {"lr_decoders", opt.lr_decoders},
        {"lr_pose", opt.lr_pose},
        {"lr_offset", opt.lr_offset},
        {"lr_final_factor", opt.lr_final_factor},
        {"beta1", opt.beta1},
        {"beta2", opt.beta2},
        {"epsilon", opt.epsilon},
        {"tv_space", reg.tv_space},
        {"smooth_time", reg.smooth_time},
        {"l1_time", reg.l1_time},
        {"density_l1", reg.density_l1},
        {"time_margin", 4.0},
        {"bounds_scale", 1.5},
        {"log_every", 500},
        {"checkpoint_every", 0}}},
      {"eval", {{"frames", 2}}},
  };
}

std::vector<std::string> PresetNames() {
  return {"desk", "tiny", "table2", "mixed_fps"};
}

json PresetJson(const std::string& name) {
  if (name == "desk") return DeskPreset();
  if (name == "tiny") return TinyPreset();
  if (name == "table2" || name == "mixed_fps") {
    json p = DeskPreset();
    p["simulate"][name == "table2" ? "noise_sweep" : "mixed_fps"] = true;
    return p;
  }
  std::string known;
  for (const std::string& n : PresetNames()) known += (known.empty() ? "" : ", ") + n;
  Fail(ErrorKind::kConfig, "unknown preset '" + name + "' (known: " + known + ")");
}

void MergeConfig(json* base, const json& patch) { MergeAt(base, patch, ""); }

EnvLookup ProcessEnv() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

std::string EnvVarName(const std::string& dotted_key) {
  std::string name = "HMCAL_";
  for (char c : dotted_key) {
    name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return name;
}

void ApplyEnvOverrides(json* config, const EnvLookup& env) {
  std::vector<std::string> leaves;
  CollectLeaves(*config, "", &leaves);
  for (const std::string& key : leaves) {
    const std::optional<std::string> raw = env(EnvVarName(key));
    if (!raw) continue;
    json value = json::parse(*raw, nullptr, false);
    if (value.is_discarded()) value = *raw;
    json patch = value;
    for (size_t end = key.size(); end != std::string::npos;) {
      const size_t dot = key.rfind('.', end - 1);
      const size_t begin = dot == std::string::npos ? 0 : dot + 1;
      patch = json{{key.substr(begin, end - begin), patch}};
      end = dot;
    }
    try {
      MergeConfig(config, patch);
    } catch (const Error& e) {
      Fail(ErrorKind::kConfig, EnvVarName(key) + ": " + e.what());
    }
  }
}

json ResolveConfigJson(const CommandLineOverrides& flags, const EnvLookup& env) {
  json tree = DefaultConfigJson();
  if (flags.preset) MergeConfig(&tree, PresetJson(*flags.preset));
  if (flags.config_path) {
    std::ifstream in(*flags.config_path);
    if (!in) Fail(ErrorKind::kConfig, "cannot read config file " + *flags.config_path);
    std::stringstream text;
    text << in.rdbuf();
    const json file = json::parse(text.str(), nullptr, false);
    if (file.is_discarded()) {
      Fail(ErrorKind::kConfig, "config file " + *flags.config_path + " is not valid JSON");
    }
    MergeConfig(&tree, file);
  }
  ApplyEnvOverrides(&tree, env);
  if (flags.out_dir) tree["paths"]["out"] = *flags.out_dir;
  if (flags.seed) tree["seed"] = *flags.seed;
  if (flags.threads) tree["threads"] = *flags.threads;
  return tree;
}

PipelineConfig ConfigFromJson(const json& tree) {
  PipelineConfig c;
  try {
    const json& paths = tree.at("paths");
    c.dataset_dir = paths.at("dataset").get<std::string>();
    c.out_dir = paths.at("out").get<std::string>();
    const json& st = tree.at("stages");
    c.stages.simulate = st.at("simulate").get<bool>();
    c.stages.sync = st.at("sync").get<bool>();
    c.stages.pose = st.at("pose").get<bool>();
    c.stages.refine = st.at("refine").get<bool>();
    c.stages.eval = st.at("eval").get<bool>();
    c.seed = tree.at("seed").get<uint64_t>();
    c.threads = tree.at("threads").get<int>();

    const json& sim = tree.at("simulate");
    SceneSpec& s = c.scene;
    s.num_cameras = sim.at("num_cameras").get<int>();
    s.num_humans = sim.at("num_humans").get<int>();
    s.frames = sim.at("frames").get<int>();
    s.fps = sim.at("fps").get<double>();
    s.camera_fps = sim.at("camera_fps").get<std::vector<double>>();
    s.max_offset = sim.at("max_offset").get<int>();
    s.min_overlap = sim.at("min_overlap").get<int>();
    s.noise.joint_sigma = sim.at("joint_sigma").get<double>();
    s.noise.pose_sigma = sim.at("pose_sigma").get<double>();
    s.noise.shape_sigma = sim.at("shape_sigma").get<double>();
    s.randomize_frames = sim.at("randomize_frames").get<bool>();
    s.random_scale = sim.at("random_scale").get<bool>();
    s.num_moving_cameras = sim.at("num_moving_cameras").get<int>();
    s.image_width = sim.at("image_width").get<int>();
    s.image_height = sim.at("image_height").get<int>();
    s.seed = c.seed;
    c.mixed_fps = sim.at("mixed_fps").get<bool>();
    c.noise_sweep = sim.at("noise_sweep").get<bool>();

    const json& window = tree.at("sync").at("window");
    if (!window.is_null()) c.dtw.window = window.get<int>();
    c.anchor_mode = ParseAnchorMode(tree.at("pose").at("anchor_mode").get<std::string>());

    const json& r = tree.at("refine");
    RefineConfig& rc = c.refine;
    TrainSchedule& sch = rc.schedule;
    sch.total_steps = r.at("total_steps").get<int>();
    sch.coarse_to_fine_end = r.at("coarse_to_fine_end").get<int>();
    sch.s0 = r.at("s0").get<int>();
    sch.s1 = r.at("s1").get<int>();
    sch.reg_decay_start = r.at("reg_decay_start").get<int>();
    sch.reg_decay_end = r.at("reg_decay_end").get<int>();
    sch.reg_floor = r.at("reg_floor").get<double>();
    sch.coarse_to_fine = r.at("coarse_to_fine").get<bool>();
    sch.curriculum = r.at("curriculum").get<bool>();
    c.ablation = ParseAblationMode(r.at("ablation").get<std::string>());
    rc.field.spatial_resolution = r.at("spatial_resolution").get<std::vector<int>>();
    rc.field.time_resolution = r.at("time_resolution").get<int>();
    rc.field.feature_dim = r.at("feature_dim").get<int>();
    sch.num_levels = static_cast<int>(rc.field.spatial_resolution.size());
    rc.decoder.width = r.at("decoder_width").get<int>();
    rc.decoder.hidden_layers = r.at("decoder_layers").get<int>();
    rc.decoder.geo_dim = r.at("geo_dim").get<int>();
    rc.decoder.direction_freqs = r.at("direction_freqs").get<int>();
    rc.render.samples = r.at("samples").get<int>();
    rc.render.jitter = r.at("jitter").get<bool>();
    rc.batch_rays = r.at("batch_rays").get<int>();
    OptimizerConfig& opt = rc.optimizer;
    opt.lr_planes = r.at("lr_planes").get<double>();
    opt.lr_decoders = r.at("lr_decoders").get<double>();
    opt.lr_pose = r.at("lr_pose").get<double>();
    opt.lr_offset = r.at("lr_offset").get<double>();
    opt.lr_final_factor = r.at("lr_final_factor").get<double>();
    opt.beta1 = r.at("beta1").get<double>();
    opt.beta2 = r.at("beta2").get<double>();
    opt.epsilon = r.at("epsilon").get<double>();
    rc.regularizers.tv_space = r.at("tv_space").get<double>();
    rc.regularizers.smooth_time = r.at("smooth_time").get<double>();
    rc.regularizers.l1_time = r.at("l1_time").get<double>();
    rc.regularizers.density_l1 = r.at("density_l1").get<double>();
    rc.time_margin = r.at("time_margin").get<double>();
    c.bounds_scale = r.at("bounds_scale").get<double>();
    rc.log_every = r.at("log_every").get<int>();
    rc.checkpoint_every = r.at("checkpoint_every").get<int>();
    rc.seed = c.seed;
    rc.threads = c.threads;

    c.eval_frames = tree.at("eval").at("frames").get<int>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kConfig, std::string("malformed config: ") + e.what());
  }
  Require(c.threads >= 1, "threads must be >= 1");
  Require(c.bounds_scale > 0.0, "refine.bounds_scale must be positive");
  Require(c.eval_frames >= 0, "eval.frames must be >= 0");
  Require(!c.dtw.window || *c.dtw.window >= 0, "sync.window must be >= 0");
  ValidateRefineConfig(c.refine);
  return c;
}

}  // namespace hmcal::cli
