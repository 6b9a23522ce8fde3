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

#include "embstab/model_io.h"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

#include "embstab/error.h"

namespace embstab {
namespace {

double PowerOfTen(int digits) {
  double p = 1.0;
  for (int i = 0; i < digits; ++i) p *= 10.0;
  return p;
}

struct Matrix {
  std::vector<std::string> labels;
  std::int32_t dims = 0;
  std::vector<double> values;
};

Matrix ParseMatrix(std::string_view text, std::string_view what) {
  auto fail = [&](std::size_t line, std::string const& msg) -> Error {
    return Error(ErrorCode::kFormat, std::string(what) + " line " +
                                         std::to_string(line) + ": " + msg);
  };
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  if (lines.empty()) throw fail(1, "missing header");
  auto split = [](std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t p = 0;
    while (p < line.size()) {
      auto q = line.find(' ', p);
      if (q == std::string_view::npos) q = line.size();
      if (q > p) fields.push_back(line.substr(p, q - p));
      p = q + 1;
    }
    return fields;
  };
  auto header = split(lines[0]);
  long long n = -1;
  long long dims = -1;
  if (header.size() != 2 ||
      std::from_chars(header[0].data(), header[0].data() + header[0].size(), n)
              .ec != std::errc() ||
      std::from_chars(header[1].data(), header[1].data() + header[1].size(),
                      dims)
              .ec != std::errc() ||
      n < 0 || dims < 1) {
    throw fail(1, "expected '<count> <dims>'");
  }
  if (static_cast<long long>(lines.size()) - 1 != n) {
    throw fail(lines.size(), "header announces " + std::to_string(n) +
                                 " vectors, found " +
                                 std::to_string(lines.size() - 1));
  }
  Matrix m;
  m.dims = static_cast<std::int32_t>(dims);
  m.values.reserve(static_cast<std::size_t>(n * dims));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split(lines[i]);
    if (static_cast<long long>(fields.size()) != dims + 1) {
      throw fail(i + 1, "expected a label and " + std::to_string(dims) +
                            " values");
    }
    m.labels.emplace_back(fields[0]);
    for (std::size_t d = 1; d < fields.size(); ++d) {
      double v = 0.0;
      auto r = std::from_chars(fields[d].data(),
                               fields[d].data() + fields[d].size(), v);
      if (r.ec != std::errc() || r.ptr != fields[d].data() + fields[d].size() ||
          !std::isfinite(v)) {
        throw fail(i + 1, "bad number '" + std::string(fields[d]) + "'");
      }
      m.values.push_back(v);
    }
  }
  return m;
}

std::string SerializeRows(std::size_t rows, std::int32_t dims,
                          std::vector<double> const& values, int digits,
                          auto label) {
  std::string out = std::to_string(rows) + " " + std::to_string(dims) + "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out += label(i);
    for (std::int32_t d = 0; d < dims; ++d) {
      out += ' ';
      out += FormatFixed(values[i * static_cast<std::size_t>(dims) +
                                static_cast<std::size_t>(d)],
                         digits);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string FormatFixed(double value, int digits) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNumericDivergence, "cannot format non-finite value");
  }
  double scaled = std::round(value * PowerOfTen(digits));
  if (std::fabs(scaled) >= 9.0e15) {
    throw Error(ErrorCode::kOutOfRange, "value too large for fixed format");
  }
  auto units = static_cast<std::int64_t>(scaled);
  bool negative = units < 0;
  std::uint64_t magnitude =
      negative ? static_cast<std::uint64_t>(-units) : static_cast<std::uint64_t>(units);
  std::string digits_str = std::to_string(magnitude);
  if (digits > 0) {
    if (digits_str.size() <= static_cast<std::size_t>(digits)) {
      digits_str.insert(0, static_cast<std::size_t>(digits) + 1 -
                               digits_str.size(),
                        '0');
    }
    digits_str.insert(digits_str.size() - static_cast<std::size_t>(digits), ".");
  }
  return negative ? "-" + digits_str : digits_str;
}

void RoundModel(EmbeddingModel& model, int digits) {
  double const p = PowerOfTen(digits);
  auto round = [p](double& v) {
    v = std::round(v * p) / p;
    if (v == 0.0) v = 0.0;  // drop the sign of -0
  };
  for (auto& v : model.input_data()) round(v);
  for (auto& v : model.output_data()) round(v);
}

std::string SerializeInputVectors(EmbeddingModel const& model, int digits) {
  return SerializeRows(model.size(), model.dims(), model.input_data(), digits,
                       [&](std::size_t i) { return model.type(i); });
}

std::string SerializeOutputVectors(EmbeddingModel const& model, int digits) {
  return SerializeRows(model.n_output(), model.dims(), model.output_data(),
                       digits, [](std::size_t i) { return std::to_string(i); });
}

EmbeddingModel ParseModel(std::string_view input_text,
                          std::optional<std::string_view> output_text) {
  auto in = ParseMatrix(input_text, "vectors");
  std::optional<Matrix> out;
  if (output_text) {
    out = ParseMatrix(*output_text, "auxiliary vectors");
    if (out->dims != in.dims) {
      throw Error(ErrorCode::kFormat,
                  "auxiliary vectors have " + std::to_string(out->dims) +
                      " dims, vectors have " + std::to_string(in.dims));
    }
    for (std::size_t i = 0; i < out->labels.size(); ++i) {
      if (out->labels[i] != std::to_string(i)) {
        throw Error(ErrorCode::kFormat, "auxiliary row " + std::to_string(i) +
                                            " labelled " + out->labels[i]);
      }
    }
  }
  for (auto const& label : in.labels) {
    if (!IsValidProductId(label)) {
      throw Error(ErrorCode::kFormat, "invalid type id '" + label + "'");
    }
  }
  EmbeddingModel model(std::move(in.labels), in.dims,
                       out ? out->labels.size() : 0);
  model.input_data() = std::move(in.values);
  if (out) model.output_data() = std::move(out->values);
  TrainConfig config;
  config.dims = in.dims;
  model.set_config(config);
  return model;
}

std::filesystem::path AuxiliaryPath(std::filesystem::path const& path) {
  auto aux = path;
  aux += ".aux";
  return aux;
}

void WriteFileAtomic(std::filesystem::path const& path, std::string_view data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIo,
                "cannot rename " + tmp.string() + ": " + ec.message());
  }
}

std::string ReadFileToString(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void SaveModel(EmbeddingModel const& model, std::filesystem::path const& path) {
  int digits = model.config().round_digits;
  WriteFileAtomic(path, SerializeInputVectors(model, digits));
  WriteFileAtomic(AuxiliaryPath(path), SerializeOutputVectors(model, digits));
}

EmbeddingModel LoadModel(std::filesystem::path const& path) {
  auto input = ReadFileToString(path);
  auto aux_path = AuxiliaryPath(path);
  if (std::filesystem::exists(aux_path)) {
    auto aux = ReadFileToString(aux_path);
    return ParseModel(input, aux);
  }
  return ParseModel(input);
}

}  // namespace embstab
