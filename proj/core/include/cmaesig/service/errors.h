// Copyright 2026 The cmaesig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Errors surfaced by the session service. Every error carries a stable,
// machine-readable code; the HTTP layer maps codes to status classes.

#ifndef CMAESIG_SERVICE_ERRORS_H_
#define CMAESIG_SERVICE_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmaesig::service {

enum class ErrorCode {
  kUnknownSession,
  kUnknownDataset,
  kInvalidArgument,
  kInvalidRanking,
  kNoPendingQuery,
  kDoubleSubmission,
  kItemNotDisplayed,
  kMalformedJson,
  kCorruptLog,
  kInternal,
};

// "UNKNOWN_SESSION", "NO_PENDING_QUERY", ...
std::string_view error_code_name(ErrorCode code);
int http_status(ErrorCode code);

class ServiceError : public std::runtime_error {
 public:
  ServiceError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cmaesig::service

#endif  // CMAESIG_SERVICE_ERRORS_H_
