//
// Copyright 2026 The renyigen Authors
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
//

#include "renyigen/error.h"

namespace renyigen {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidMatrix: return "InvalidMatrix";
    case ErrorCode::kNotTraceNormalized: return "NotTraceNormalized";
    case ErrorCode::kNotPSD: return "NotPSD";
    case ErrorCode::kInvalidPartition: return "InvalidPartition";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kDegenerateSamples: return "DegenerateSamples";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNotInvertible: return "NotInvertible";
    case ErrorCode::kQuadratureFailure: return "QuadratureFailure";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kDivergedTraining: return "DivergedTraining";
    case ErrorCode::kDegenerateNoise: return "DegenerateNoise";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace renyigen
