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

#include <stdexcept>
#include <string>
#include <string_view>

namespace driftforest {

enum class ErrorCode {
    MissingColumn,
    EmptyTable,
    TooManyProcesses,
    ConflictingYear,
    MalformedRow,
    MissingHash,
    BadRatio,
    EmptySide,
    BadFraction,
    UnknownYear,
    DomainError,
    WidthMismatch,
    EmptyWindow,
    EmptyTraining,
    NotAdaptive,
    VersionMismatch,
    CorruptPayload,
    EmptyEvaluation,
    EmptyConfusion,
    SequenceMismatch,
    BadConfig,
    IoError,
    OutputExists,
    Usage,
};

/// Stable identifier used in `ERROR:<code>:` diagnostics.
std::string_view code_name(ErrorCode code);

/// Base exception for every recoverable failure in the library. The code is
/// part of the contract; the message is free text for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace driftforest
