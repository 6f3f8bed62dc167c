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

#ifndef DPATTN_STATUS_MACROS_H_
#define DPATTN_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DPATTN_STATUS_CONCAT_INNER_(x, y) x##y
#define DPATTN_STATUS_CONCAT_(x, y) DPATTN_STATUS_CONCAT_INNER_(x, y)

#define DPATTN_RETURN_IF_ERROR(expr)            \
  do {                                          \
    const absl::Status _dpattn_status = (expr); \
    if (!_dpattn_status.ok()) {                 \
      return _dpattn_status;                    \
    }                                           \
  } while (0)

#define DPATTN_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                  \
  if (!statusor.ok()) {                                     \
    return statusor.status();                               \
  }                                                         \
  lhs = std::move(statusor).value()

#define DPATTN_ASSIGN_OR_RETURN(lhs, rexpr) \
  DPATTN_ASSIGN_OR_RETURN_IMPL_(            \
      DPATTN_STATUS_CONCAT_(_dpattn_statusor_, __LINE__), lhs, rexpr)

#endif  // DPATTN_STATUS_MACROS_H_
