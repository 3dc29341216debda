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


#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include "json.hpp"

#include "cli.h"
#include "commands.h"
#include "config.h"
#include "hmcal/formats.h"

namespace hmcal::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult Hmcal(std::vector<std::string> args,
              const std::map<std::string, std::string>& env = {}) {
  args.insert(args.begin(), "hmcal");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const EnvLookup lookup = [&env](const std::string& name) -> std::optional<std::string> {
    const auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err, lookup);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hmcal_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Out(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, ConfigLayersApplyInOrder) {
  RunResult r = Hmcal({"--print-config"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(j["simulate"]["frames"], 120);
  EXPECT_EQ(j["refine"]["s0"], 2000);
  EXPECT_EQ(j["refine"]["s0"].get<int>() + j["refine"]["s1"].get<int>(), 20000);

  r = Hmcal({"--print-config", "--preset", "tiny"});
  j = json::parse(r.out);
  EXPECT_EQ(j["simulate"]["frames"], 40);

  const fs::path file = dir_ / "c.json";
  std::ofstream(file) << R"({"simulate": {"frames": 50, "num_humans": 2}, "seed": 4})";
  r = Hmcal({"--print-config", "--preset", "tiny", "--config", file.string()});
  j = json::parse(r.out);
  EXPECT_EQ(j["simulate"]["frames"], 50);
  EXPECT_EQ(j["simulate"]["num_humans"], 2);
  EXPECT_EQ(j["seed"], 4);

  const std::map<std::string, std::string> env = {{"HMCAL_SIMULATE_FRAMES", "60"},
                                                  {"HMCAL_SEED", "9"},
                                                  {"HMCAL_POSE_ANCHOR_MODE", "first"}};
  r = Hmcal({"--print-config", "--preset", "tiny", "--config", file.string()}, env);
  j = json::parse(r.out);
  EXPECT_EQ(j["simulate"]["frames"], 60);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["pose"]["anchor_mode"], "first");

  r = Hmcal({"--print-config", "--preset", "tiny", "--config", file.string(), "--seed", "11",
           "--threads", "2", "--out", Out("o")},
          env);
  j = json::parse(r.out);
  EXPECT_EQ(j["seed"], 11);
  EXPECT_EQ(j["threads"], 2);
  EXPECT_EQ(j["paths"]["out"], Out("o"));
  EXPECT_EQ(EnvVarName("refine.total_steps"), "HMCAL_REFINE_TOTAL_STEPS");
}

TEST_F(CliTest, ExitCodesFollowErrorKinds) {
  EXPECT_EQ(Hmcal({"--preset", "nope", "simulate"}).code, 2);
  EXPECT_EQ(Hmcal({"--bogus-flag"}).code, 2);
  EXPECT_EQ(Hmcal({"--preset", "tiny"}).code, 2);
  EXPECT_EQ(Hmcal({"--preset", "tiny", "simulate", "--out", Out("x")},
                {{"HMCAL_SIMULATE_FRAMES", "\"many\""}})
                .code,
            2);
  const fs::path file = dir_ / "bad.json";
  std::ofstream(file) << R"({"simulate": {"unknown_key": 1}})";
  EXPECT_EQ(Hmcal({"--config", file.string(), "--print-config"}).code, 2);

  const RunResult overlap = Hmcal({"--preset", "tiny", "--out", Out("ov"), "simulate"},
                                {{"HMCAL_SIMULATE_MIN_OVERLAP", "500"}});
  EXPECT_EQ(overlap.code, 2);
  EXPECT_NE(overlap.err.find("overlap constraint unsatisfiable"), std::string::npos);

  const RunResult missing = Hmcal({"--preset", "tiny", "--out", Out("none"), "sync"});
  EXPECT_EQ(missing.code, 3);
  EXPECT_NE(missing.err.find("hmcal: "), std::string::npos);

  EXPECT_EQ(Hmcal({"--preset", "tiny", "--out", Out("one"), "simulate"},
                {{"HMCAL_SIMULATE_NUM_CAMERAS", "1"}})
                .code,
            0);
  EXPECT_EQ(Hmcal({"--preset", "tiny", "--out", Out("one"), "sync"}).code, 3);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kNumerical), 4);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kConfig), 2);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kData), 3);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  ASSERT_EQ(Hmcal({"--preset", "tiny", "--seed", "5", "--out", Out("a"), "simulate"}).code, 0);
  ASSERT_EQ(Hmcal({"--preset", "tiny", "--seed", "5", "--out", Out("b"), "simulate"}).code, 0);
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir_ / "a");
    EXPECT_EQ(Slurp(e.path()), Slurp(dir_ / "b" / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 100);
}

TEST_F(CliTest, NoiseSweepWritesFiveVariants) {
  const RunResult r = Hmcal({"--preset", "tiny", "--out", Out("s"), "simulate"},
                          {{"HMCAL_SIMULATE_NOISE_SWEEP", "true"}});
  ASSERT_EQ(r.code, 0) << r.err;
  int variants = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "s")) {
    if (e.path().filename().string().rfind("dataset_", 0) == 0) {
      EXPECT_TRUE(fs::exists(e.path() / "gt.json"));
      ++variants;
    }
  }
  EXPECT_EQ(variants, 5);
  const MotionSequence clean = ReadMotion(dir_ / "s" / "dataset" / "motions" / "cam1.json");
  const MotionSequence noisy =
      ReadMotion(dir_ / "s" / "dataset_sigma0.2" / "motions" / "cam1.json");
  EXPECT_NE(clean.frames[0].states[0].body_pose[3], noisy.frames[0].states[0].body_pose[3]);
}

TEST_F(CliTest, SyncAndPoseRecoverNoiseFreeGroundTruth) {
  const std::vector<std::string> base = {"--preset", "tiny", "--seed", "8", "--out", Out("p")};
  for (const char* cmd : {"simulate", "sync", "pose"}) {
    std::vector<std::string> args = base;
    args.push_back(cmd);
    const RunResult r = Hmcal(args);
    ASSERT_EQ(r.code, 0) << cmd << ": " << r.err;
  }
  const Dataset d = ReadDataset(dir_ / "p" / "dataset", false);
  const OffsetsFile off = ReadOffsets(dir_ / "p" / "offsets.json");
  const int anchor = off.offsets.anchor;
  for (size_t i = 0; i < d.gt.offsets.size(); ++i) {
    EXPECT_EQ(off.offsets.offsets[i] - off.offsets.offsets[anchor],
              d.gt.offsets[i] - d.gt.offsets[anchor]);
  }
  std::vector<std::string> args = base;
  args.push_back("eval");
  ASSERT_EQ(Hmcal(args).code, 0);
  const ReportFile rep = ReadReport(dir_ / "p" / "report.json");
  EXPECT_FALSE(rep.refine.has_value());
  EXPECT_LT(rep.init.mean.rotation_deg, 1e-6);
  EXPECT_LT(rep.init.mean.translation, 1e-8);
  EXPECT_EQ(rep.init.mean.offset, 0.0);
}

TEST_F(CliTest, MissingArtifactsAreNamed) {
  ASSERT_EQ(Hmcal({"--preset", "tiny", "--out", Out("m"), "simulate"}).code, 0);
  const RunResult pose = Hmcal({"--preset", "tiny", "--out", Out("m"), "pose"});
  EXPECT_EQ(pose.code, 3);
  EXPECT_NE(pose.err.find("offsets.json"), std::string::npos) << pose.err;
  ASSERT_EQ(Hmcal({"--preset", "tiny", "--out", Out("m"), "sync"}).code, 0);
  const RunResult refine = Hmcal({"--preset", "tiny", "--out", Out("m"), "refine"});
  EXPECT_EQ(refine.code, 3);
  EXPECT_NE(refine.err.find("poses.json"), std::string::npos) << refine.err;
}

TEST_F(CliTest, PipelineWritesEveryArtifact) {
  const RunResult r = Hmcal({"--preset", "tiny", "--out", Out("run"), "pipeline"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {kOffsetsFile, kPosesFile, kSim3File, kRefinedFile, kMetricsFile,
                        kReportFile, kReportTableFile, kConfigFile}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  EXPECT_TRUE(fs::exists(dir_ / "run" / kCheckpointDir / kFinalCheckpoint));
  const ReportFile rep = ReadReport(dir_ / "run" / kReportFile);
  EXPECT_EQ(rep.init.stage, "init");
  ASSERT_TRUE(rep.refine.has_value());
  EXPECT_EQ(rep.refine->stage, "refine");
  EXPECT_FALSE(rep.images.empty());
  std::ifstream metrics(dir_ / "run" / kMetricsFile);
  std::string line;
  int lines = 0;
  while (std::getline(metrics, line)) {
    const json rec = json::parse(line);
    EXPECT_TRUE(rec.contains("step") && rec.contains("dt_err"));
    ++lines;
  }
  EXPECT_GE(lines, 2);
  const RefinedFile refined = ReadRefined(dir_ / "run" / kRefinedFile);
  EXPECT_EQ(refined.steps, 40);
  const json cfg = json::parse(Slurp(dir_ / "run" / kConfigFile));
  EXPECT_EQ(cfg["refine"]["total_steps"], 40);
}

TEST_F(CliTest, StageTogglesSkipStages) {
  const RunResult r = Hmcal({"--preset", "tiny", "--out", Out("t"), "pipeline"},
                          {{"HMCAL_STAGES_REFINE", "false"}});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "t" / kRefinedFile));
  const ReportFile rep = ReadReport(dir_ / "t" / kReportFile);
  EXPECT_FALSE(rep.refine.has_value());
}

TEST_F(CliTest, MixedFpsOffsetsUseTheCommonRate) {
  const std::vector<std::string> base = {"--preset", "tiny", "--out", Out("mx")};
  const std::map<std::string, std::string> env = {{"HMCAL_SIMULATE_MIXED_FPS", "true"},
                                                  {"HMCAL_SIMULATE_NUM_CAMERAS", "6"}};
  std::vector<std::string> a = base;
  a.push_back("simulate");
  ASSERT_EQ(Hmcal(a, env).code, 0);
  a.back() = "sync";
  ASSERT_EQ(Hmcal(a, env).code, 0);
  const json off = json::parse(Slurp(dir_ / "mx" / kOffsetsFile));
  EXPECT_EQ(off["frame_rate"], 30.0);
  const MotionSequence m0 = ReadMotion(dir_ / "mx" / "dataset" / "motions" / "cam0.json");
  EXPECT_EQ(m0.fps, 24.0);
  EXPECT_EQ(ReadMotion(dir_ / "mx" / "dataset" / "motions" / "cam5.json").fps, 30.0);
}

}  // namespace
}  // namespace hmcal::cli
