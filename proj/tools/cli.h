// Copyright 2026 The embstab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMBSTAB_TOOLS_CLI_H_
#define EMBSTAB_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace embstab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Rewrites single-dash long flags (`-window`) to their double-dash form.
std::vector<std::string> NormalizeArgs(std::vector<std::string> args);

/// Runs one invocation; `args` excludes the program name.
int RunCli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace embstab::cli

#endif  // EMBSTAB_TOOLS_CLI_H_
