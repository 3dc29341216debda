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


#ifndef HMCAL_TOOLS_CONFIG_H_
#define HMCAL_TOOLS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hmcal/refine.h"
#include "hmcal/synth.h"
#include "hmcal/timesync.h"

namespace hmcal::cli {

struct StageToggles {
  bool simulate = true;
  bool sync = true;
  bool pose = true;
  bool refine = true;
  bool eval = true;
};

// How the gauge camera is chosen after global alignment: "cost" picks the
// camera with the smallest summed DTW cost, "pair" keeps the first camera of
// the cheapest pair and "first" uses camera 0.
enum class AnchorMode { kCost, kPair, kFirst };

struct PipelineConfig {
  std::filesystem::path dataset_dir;  // empty: <out>/dataset
  std::filesystem::path out_dir = "hmcal_out";
  StageToggles stages;
  uint64_t seed = 0;
  int threads = 1;

  SceneSpec scene;
  bool mixed_fps = false;
  bool noise_sweep = false;  // also emit one dataset per pose-noise preset

  DtwOptions dtw;
  AnchorMode anchor_mode = AnchorMode::kCost;

  RefineConfig refine;
  AblationMode ablation = AblationMode::kFull;
  // Field half-size relative to the largest half-extent of the anchor's
  // joint bounding box.
  double bounds_scale = 1.5;

  int eval_frames = 2;  // frames per camera rendered for image metrics

  std::filesystem::path DatasetDir() const;
};

// Full-scale defaults as a JSON tree; every key is overridable.
nlohmann::json DefaultConfigJson();

// Partial trees merged over the defaults: "desk", "tiny", "table2",
// "mixed_fps".
std::vector<std::string> PresetNames();
nlohmann::json PresetJson(const std::string& name);

// Recursively overwrites `base` with `patch`. Unknown keys and type changes
// raise ErrorKind::kConfig naming the key.
void MergeConfig(nlohmann::json* base, const nlohmann::json& patch);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup ProcessEnv();

// Every leaf key path a.b maps to HMCAL_A_B. Values parse as JSON, falling
// back to a plain string.
void ApplyEnvOverrides(nlohmann::json* config, const EnvLookup& env);
std::string EnvVarName(const std::string& dotted_key);

struct CommandLineOverrides {
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<uint64_t> seed;
  std::optional<std::string> preset;
  std::optional<int> threads;
};

// Layers, later wins: defaults, preset, config file, environment, flags.
nlohmann::json ResolveConfigJson(const CommandLineOverrides& flags,
                                 const EnvLookup& env);

PipelineConfig ConfigFromJson(const nlohmann::json& tree);

}  // namespace hmcal::cli

#endif  // HMCAL_TOOLS_CONFIG_H_
