// Copyright 2026 The initlab Authors
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

#ifndef INITLAB_CLI_HPP
#define INITLAB_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace initlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRunFailure = 3;

/// Entry point of the `initlab` tool. `args` excludes the program name.
/// Subcommands: sample, analyze, compare.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace initlab::cli

#endif  // INITLAB_CLI_HPP
