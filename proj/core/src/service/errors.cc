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

#include "cmaesig/service/errors.h"

namespace cmaesig::service {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
      return "UNKNOWN_SESSION";
    case ErrorCode::kUnknownDataset:
      return "UNKNOWN_DATASET";
    case ErrorCode::kInvalidArgument:
      return "INVALID_ARGUMENT";
    case ErrorCode::kInvalidRanking:
      return "INVALID_RANKING";
    case ErrorCode::kNoPendingQuery:
      return "NO_PENDING_QUERY";
    case ErrorCode::kDoubleSubmission:
      return "DOUBLE_SUBMISSION";
    case ErrorCode::kItemNotDisplayed:
      return "ITEM_NOT_DISPLAYED";
    case ErrorCode::kMalformedJson:
      return "MALFORMED_JSON";
    case ErrorCode::kCorruptLog:
      return "CORRUPT_LOG";
    case ErrorCode::kInternal:
      return "INTERNAL";
  }
  return "INTERNAL";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownDataset:
      return 404;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidRanking:
    case ErrorCode::kItemNotDisplayed:
    case ErrorCode::kMalformedJson:
      return 400;
    case ErrorCode::kNoPendingQuery:
    case ErrorCode::kDoubleSubmission:
      return 409;
    case ErrorCode::kCorruptLog:
    case ErrorCode::kInternal:
      return 500;
  }
  return 500;
}

}  // namespace cmaesig::service
