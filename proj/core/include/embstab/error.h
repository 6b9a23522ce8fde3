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

#ifndef EMBSTAB_ERROR_H_
#define EMBSTAB_ERROR_H_

#include <stdexcept>
#include <string>

namespace embstab {

/// Failure categories surfaced by the library. The CLI maps
/// `kInvalidArgument` to the usage exit code and everything else to the
/// runtime exit code.
enum class ErrorCode {
  kInvalidArgument,
  kFormat,
  kEmptyCorpus,
  kEmptyVocabulary,
  kOutOfRange,
  kNotFound,
  kMismatch,
  kNumericDivergence,
  kCollinearity,
  kZeroVariance,
  kIo,
};

std::string ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string const& message)
      : std::runtime_error(ToString(code) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace embstab

#endif  // EMBSTAB_ERROR_H_
