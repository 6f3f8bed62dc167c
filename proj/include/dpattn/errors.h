// Copyright 2026 The dpattn Authors
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

#ifndef DPATTN_ERRORS_H_
#define DPATTN_ERRORS_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"

namespace dpattn {

// Every error carries its kind as a message prefix ("NotPsd: ...") on top of
// the canonical absl code, so callers and the CLI can name the failure.
inline absl::Status InvalidMatrixError(std::string_view detail) {
  return absl::InvalidArgumentError("InvalidMatrix: " + std::string(detail));
}
inline absl::Status NotPsdError(std::string_view detail) {
  return absl::FailedPreconditionError("NotPsd: " + std::string(detail));
}
inline absl::Status SingularMatrixError(std::string_view detail) {
  return absl::FailedPreconditionError("SingularMatrix: " +
                                       std::string(detail));
}
inline absl::Status OverflowError(std::string_view detail) {
  return absl::OutOfRangeError("Overflow: " + std::string(detail));
}
inline absl::Status DimMismatchError(std::string_view detail) {
  return absl::InvalidArgumentError("DimMismatch: " + std::string(detail));
}
inline absl::Status ParamRangeError(std::string_view detail) {
  return absl::OutOfRangeError("ParamRange: " + std::string(detail));
}
inline absl::Status PreconditionFailedError(std::string_view detail) {
  return absl::FailedPreconditionError("PreconditionFailed: " +
                                       std::string(detail));
}
inline absl::Status InfeasibleError(std::string_view detail) {
  return absl::FailedPreconditionError("Infeasible: " + std::string(detail));
}

// True if `status` was produced by the constructor for `kind`, e.g.
// HasErrorKind(s, "NotPsd").
inline bool HasErrorKind(const absl::Status& status, std::string_view kind) {
  const std::string_view message(status.message().data(),
                                 status.message().size());
  return message.size() > kind.size() &&
         message.substr(0, kind.size()) == kind && message[kind.size()] == ':';
}

}  // namespace dpattn

#endif  // DPATTN_ERRORS_H_
