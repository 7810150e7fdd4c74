// Copyright 2026 The driftforest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace driftforest::text {

// Delimited-text helpers shared by the readers and writers.

/// Tab if the header holds tabs but no commas, else comma.
char detect_delimiter(std::string_view header);

/// Splits one record. Double-quoted fields may contain the delimiter; a
/// doubled quote inside quotes is a literal quote. Fields are trimmed.
std::vector<std::string> split_fields(std::string_view line, char delimiter);

std::string_view trim(std::string_view s);

/// Locale-independent decimal parse. Accepts scientific notation and a
/// leading '+'. Empty, unparseable, NaN and infinite cells yield nullopt.
std::optional<double> parse_number(std::string_view cell);

/// Integral values below 2^53 print as integers, everything else uses the
/// shortest round-trip form. -0 prints as 0.
std::string format_number(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> lines(std::string_view contents);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace driftforest::text
