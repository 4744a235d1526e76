// Copyright 2026 The qdir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace qdir {

enum class ErrorCode {
    kNotPsd,
    kBadTrace,
    kZeroVector,
    kNotDistribution,
    kConvergenceFailure,
    kDimensionMismatch,
    kWrongDimension,
    kIndexOutOfRange,
    kAllZeroWeights,
    kInvalidArgument,
    kDuplicateDocId,
    kUnknownDoc,
    kEmptyDocument,
    kNoKnownTerms,
    kNotNormalized,
    kNotPure,
    kRepresentationMismatch,
    kDocSetMismatch,
    kUnknownTerm,
    kZeroMeasureEvent,
    kNonBasisEvent,
    kParseError,
    kIoError,
};

constexpr std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::kNotPsd: return "NotPSD";
        case ErrorCode::kBadTrace: return "BadTrace";
        case ErrorCode::kZeroVector: return "ZeroVector";
        case ErrorCode::kNotDistribution: return "NotDistribution";
        case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
        case ErrorCode::kWrongDimension: return "WrongDimension";
        case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::kAllZeroWeights: return "AllZeroWeights";
        case ErrorCode::kInvalidArgument: return "InvalidArgument";
        case ErrorCode::kDuplicateDocId: return "DuplicateDocId";
        case ErrorCode::kUnknownDoc: return "UnknownDoc";
        case ErrorCode::kEmptyDocument: return "EmptyDocument";
        case ErrorCode::kNoKnownTerms: return "NoKnownTerms";
        case ErrorCode::kNotNormalized: return "NotNormalized";
        case ErrorCode::kNotPure: return "NotPure";
        case ErrorCode::kRepresentationMismatch: return "RepresentationMismatch";
        case ErrorCode::kDocSetMismatch: return "DocSetMismatch";
        case ErrorCode::kUnknownTerm: return "UnknownTerm";
        case ErrorCode::kZeroMeasureEvent: return "ZeroMeasureEvent";
        case ErrorCode::kNonBasisEvent: return "NonBasisEvent";
        case ErrorCode::kParseError: return "ParseError";
        case ErrorCode::kIoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can dispatch on the kind without parsing messages.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace qdir
