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

#ifndef RENYIGEN_ERROR_H_
#define RENYIGEN_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace renyigen {

enum class ErrorCode {
  kInvalidMatrix,
  kNotTraceNormalized,
  kNotPSD,
  kInvalidPartition,
  kInsufficientSamples,
  kDegenerateSamples,
  kInvalidInput,
  kDomainError,
  kNotInvertible,
  kQuadratureFailure,
  kTooLarge,
  kDivergedTraining,
  kDegenerateNoise,
  kFormatError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and tests) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace renyigen

#endif  // RENYIGEN_ERROR_H_
