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

#ifndef INITLAB_TEXT_HPP
#define INITLAB_TEXT_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace initlab {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Fixed-point with `digits` decimals, for human-facing tables.
std::string format_fixed(double value, int digits);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace initlab

#endif  // INITLAB_TEXT_HPP
