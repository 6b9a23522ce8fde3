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

#ifndef EMBSTAB_LOO_IO_H_
#define EMBSTAB_LOO_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "embstab/loo.h"

namespace embstab {

// Run-directory file names.
inline constexpr char kRecordsCsv[] = "records.csv";
inline constexpr char kRecordsPartial[] = "records.partial.jsonl";
inline constexpr char kSummaryJson[] = "summary.json";
inline constexpr char kHistogramCsv[] = "histogram.csv";
inline constexpr char kHistogramSvg[] = "histogram.svg";
inline constexpr char kRegressionHs[] = "regression_hs.txt";
inline constexpr char kRegressionNeg[] = "regression_neg.txt";
inline constexpr char kReportTxt[] = "report.txt";
inline constexpr char kConfigJson[] = "config.json";
inline constexpr char kIncompleteMarker[] = "INCOMPLETE";

/// Canonical JSON echo of the options (everything that affects records).
std::string OptionsJson(LooOptions const& options);

/// 16 hex digits identifying `canonical_text`.
std::string ConfigHash(std::string_view canonical_text);

/// One header line plus one row per record, doubles at full precision so
/// the text parses back to identical values. Missing values are empty.
std::string SerializeRecordsCsv(std::vector<LooRecord> const& records);
std::vector<LooRecord> ParseRecordsCsv(std::string_view text);

/// A single-line JSON object; the resume journal holds one per line.
std::string SerializeRecordLine(LooRecord const& record);
LooRecord ParseRecordLine(std::string_view line);
/// Malformed trailing lines (an interrupted append) are ignored.
std::vector<LooRecord> ParseRecordJournal(std::string_view text);

std::string SerializeSummaryJson(LooReport const& report);
std::string SerializeHistogramCsv(std::vector<HistogramBin> const& bins);

/// Publication-style tables for the full, z-scored and univariate fits, or a
/// one-line explanation when the fit cannot be computed.
std::string RegressionText(LooReport const& report, OverlapTarget target);

/// Writes records.csv, summary.json, histogram.csv and the regression
/// tables under `dir`, each atomically.
void WriteRunArtifacts(LooReport const& report, std::filesystem::path const& dir);

/// The records and reference cluster count of a run directory; enough to
/// recompute every derived table. Throws `kNotFound` naming missing files.
LooReport LoadRunReport(std::filesystem::path const& dir);

/// Standalone SVG bar chart; the reference bin is filled red.
std::string RenderHistogramSvg(std::vector<HistogramBin> const& bins);

/// Writes histogram.svg and report.txt from records.csv and summary.json
/// alone. Identical inputs give identical bytes.
void RenderReport(std::filesystem::path const& dir);

}  // namespace embstab

#endif  // EMBSTAB_LOO_IO_H_
