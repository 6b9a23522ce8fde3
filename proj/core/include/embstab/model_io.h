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

#ifndef EMBSTAB_MODEL_IO_H_
#define EMBSTAB_MODEL_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "embstab/trainer.h"

namespace embstab {

/// Fixed-point text with `digits` fractional digits, rounding half away
/// from zero. Negative zero prints without a sign.
std::string FormatFixed(double value, int digits);

/// Rounds every stored value the way `FormatFixed` would print it, so an
/// in-memory model equals the model read back from its file.
void RoundModel(EmbeddingModel& model, int digits);

/// Text format: header `<n> <dims>`, then `type v1 ... vdims` per type in
/// model order.
std::string SerializeInputVectors(EmbeddingModel const& model, int digits);
/// Same layout for output vectors with the row index as token.
std::string SerializeOutputVectors(EmbeddingModel const& model, int digits);

/// Parses input vectors and, when given, the auxiliary output vectors.
/// Throws `kFormat` on count or shape mismatches.
EmbeddingModel ParseModel(std::string_view input_text,
                          std::optional<std::string_view> output_text = {});

/// Sibling file holding the output vectors of the model at `path`.
std::filesystem::path AuxiliaryPath(std::filesystem::path const& path);

/// Writes `path` and `AuxiliaryPath(path)` using the model's round_digits.
void SaveModel(EmbeddingModel const& model, std::filesystem::path const& path);
/// Reads `path` and, if it exists, the auxiliary file.
EmbeddingModel LoadModel(std::filesystem::path const& path);

/// Writes through a temporary sibling and renames it into place.
void WriteFileAtomic(std::filesystem::path const& path, std::string_view data);
std::string ReadFileToString(std::filesystem::path const& path);

}  // namespace embstab

#endif  // EMBSTAB_MODEL_IO_H_
