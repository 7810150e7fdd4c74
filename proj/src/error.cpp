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

#include "driftforest/error.hpp"

namespace driftforest {

std::string_view code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::EmptyTable: return "EmptyTable";
        case ErrorCode::TooManyProcesses: return "TooManyProcesses";
        case ErrorCode::ConflictingYear: return "ConflictingYear";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::MissingHash: return "MissingHash";
        case ErrorCode::BadRatio: return "BadRatio";
        case ErrorCode::EmptySide: return "EmptySide";
        case ErrorCode::BadFraction: return "BadFraction";
        case ErrorCode::UnknownYear: return "UnknownYear";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::WidthMismatch: return "WidthMismatch";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::EmptyTraining: return "EmptyTraining";
        case ErrorCode::NotAdaptive: return "NotAdaptive";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CorruptPayload: return "CorruptPayload";
        case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
        case ErrorCode::EmptyConfusion: return "EmptyConfusion";
        case ErrorCode::SequenceMismatch: return "SequenceMismatch";
        case ErrorCode::BadConfig: return "BadConfig";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::OutputExists: return "OutputExists";
        case ErrorCode::Usage: return "Usage";
    }
    return "Unknown";
}

}  // namespace driftforest
