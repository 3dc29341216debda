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


#include "cli.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "CLI11.hpp"

#include "commands.h"
#include "hmcal/error.h"

namespace hmcal::cli {

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
           const EnvLookup& env) {
  CLI::App app{"Multi-camera time and pose calibration from human motion"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  CommandLineOverrides flags;
  std::string config_path, out_dir, preset;
  uint64_t seed = 0;
  int threads = 0;
  bool print_config = false;
  CLI::Option* config_opt = app.add_option("--config", config_path, "JSON config file");
  CLI::Option* out_opt = app.add_option("--out", out_dir, "Output directory");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "Random seed");
  CLI::Option* preset_opt = app.add_option("--preset", preset, "Named preset");
  CLI::Option* threads_opt =
      app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--print-config", print_config, "Print the resolved config and exit");

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Generate a synthetic dataset"},
      {"sync", "Estimate per-camera time offsets"},
      {"pose", "Initialize camera poses from aligned motion"},
      {"refine", "Jointly train the field and refine calibration"},
      {"eval", "Compare calibration against ground truth"},
      {"pipeline", "Run all enabled stages in order"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (*config_opt) flags.config_path = config_path;
  if (*out_opt) flags.out_dir = out_dir;
  if (*seed_opt) flags.seed = seed;
  if (*preset_opt) flags.preset = preset;
  if (*threads_opt) flags.threads = threads;
  if (app.get_subcommands().empty() && !print_config) {
    err << "hmcal: a subcommand is required\n" << app.help();
    return 2;
  }
  const std::string command =
      app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();

  try {
    const nlohmann::json tree = ResolveConfigJson(flags, env);
    const PipelineConfig config = ConfigFromJson(tree);
    if (print_config) {
      out << tree.dump(2) << "\n";
      return 0;
    }
    if (command == "simulate") {
      CmdSimulate(config, out);
    } else if (command == "sync") {
      CmdSync(config, out);
    } else if (command == "pose") {
      CmdPose(config, out);
    } else if (command == "refine") {
      CmdRefine(config, out);
    } else if (command == "eval") {
      CmdEval(config, out);
    } else {
      std::filesystem::create_directories(config.out_dir);
      std::ofstream(config.out_dir / kConfigFile, std::ios::binary) << tree.dump(2) << "\n";
      CmdPipeline(config, out);
    }
  } catch (const Error& e) {
    err << "hmcal: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "hmcal: data error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace hmcal::cli
