// Copyright 2026 The embstab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "embstab/error.h"

namespace embstab {

std::string ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kFormat:
      return "format error";
    case ErrorCode::kEmptyCorpus:
      return "empty corpus";
    case ErrorCode::kEmptyVocabulary:
      return "empty vocabulary";
    case ErrorCode::kOutOfRange:
      return "out of range";
    case ErrorCode::kNotFound:
      return "not found";
    case ErrorCode::kMismatch:
      return "mismatch";
    case ErrorCode::kNumericDivergence:
      return "numeric divergence";
    case ErrorCode::kCollinearity:
      return "collinearity";
    case ErrorCode::kZeroVariance:
      return "zero variance";
    case ErrorCode::kIo:
      return "i/o error";
  }
  return "unknown error";
}

}  // namespace embstab
