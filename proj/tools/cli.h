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


#ifndef HMCAL_TOOLS_CLI_H_
#define HMCAL_TOOLS_CLI_H_

#include <ostream>

#include "config.h"

namespace hmcal::cli {

// Parses arguments, resolves the configuration and runs one subcommand.
// Returns the process exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
           const EnvLookup& env = ProcessEnv());

}  // namespace hmcal::cli

#endif  // HMCAL_TOOLS_CLI_H_
