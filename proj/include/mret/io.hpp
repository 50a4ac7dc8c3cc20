// Copyright 2026 The mret Authors
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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mret::io {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Parses a whole token as a finite or infinite double; false on junk.
bool parse_double(std::string_view token, double& out);

std::string_view trim(std::string_view text) noexcept;

std::vector<std::string_view> split(std::string_view text, char delimiter);

/// Splits on '\n', stripping a trailing '\r' from each line.
std::vector<std::string_view> lines(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace mret::io
