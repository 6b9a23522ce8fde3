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

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "embstab/loo_io.h"
#include "embstab/model_io.h"
#include "embstab/rng.h"
#include "test_util.h"

namespace embstab {
namespace {

using testing::CodeOf;
using testing::TempDir;

std::vector<LooRecord> RandomRecords(std::size_t n, std::uint64_t seed) {
  DeterministicRng rng(seed);
  std::vector<LooRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    LooRecord r;
    r.session_index = i * 13;
    r.features = {static_cast<double>(1 + rng.NextBelow(30)), rng.NextUniform() * 4,
                  static_cast<double>(i * 13), static_cast<double>(rng.NextBelow(2)),
                  rng.NextUniform() * 3, static_cast<double>(rng.NextBelow(9))};
    r.outcomes.overlap_hs = rng.NextUniform();
    if (i % 2) r.outcomes.overlap_neg = rng.NextUniform() / 3;
    r.outcomes.seeds_dropped_hs = rng.NextBelow(3);
    r.outcomes.has_topology = i % 3 != 0;
    if (r.outcomes.has_topology) {
      r.outcomes.n_clusters = static_cast<std::int64_t>(10 + rng.NextBelow(5));
      r.outcomes.noise = static_cast<std::int64_t>(rng.NextBelow(100));
      r.outcomes.mean_purity = rng.NextUniform();
      r.outcomes.mean_density = rng.NextUniform() * 50;
      r.outcomes.delta_n_clusters = static_cast<std::int64_t>(rng.NextBelow(5)) - 2;
      r.outcomes.delta_noise = -3;
      r.outcomes.delta_mean_purity = -rng.NextUniform() / 10;
    }
    r.changed_types = static_cast<std::int64_t>(rng.NextBelow(40));
    r.same_tree = r.changed_types == 0;
    if (i == 4) {
      r = LooRecord{};
      r.session_index = 52;
      r.failed = true;
      r.failure_reason = "empty, \"vocabulary\"\nafter omission";
    }
    out.push_back(r);
  }
  return out;
}

void ExpectSameRecords(std::vector<LooRecord> const& a, std::vector<LooRecord> const& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].session_index, b[i].session_index);
    EXPECT_EQ(a[i].failed, b[i].failed);
    EXPECT_EQ(FeatureVector(a[i].features), FeatureVector(b[i].features));
    EXPECT_EQ(a[i].outcomes.overlap_hs, b[i].outcomes.overlap_hs);
    EXPECT_EQ(a[i].outcomes.overlap_neg, b[i].outcomes.overlap_neg);
    EXPECT_EQ(a[i].outcomes.n_clusters, b[i].outcomes.n_clusters);
    EXPECT_EQ(a[i].outcomes.mean_density, b[i].outcomes.mean_density);
    EXPECT_EQ(a[i].outcomes.delta_mean_purity, b[i].outcomes.delta_mean_purity);
    EXPECT_EQ(a[i].changed_types, b[i].changed_types);
    EXPECT_EQ(a[i].same_tree, b[i].same_tree);
  }
}

TEST(RecordsCsv, ExactRoundTrip) {
  auto records = RandomRecords(12, 8);
  auto text = SerializeRecordsCsv(records);
  auto parsed = ParseRecordsCsv(text);
  ExpectSameRecords(records, parsed);
  EXPECT_EQ(SerializeRecordsCsv(parsed), text);
  EXPECT_EQ(parsed[4].failure_reason.find_first_of(",\"\n"), std::string::npos);
}

TEST(RecordsCsv, Malformed) {
  EXPECT_EQ(CodeOf([] { ParseRecordsCsv("nope\n"); }), ErrorCode::kFormat);
  auto text = SerializeRecordsCsv(RandomRecords(2, 1));
  text.insert(text.size() - 1, ",extra");
  EXPECT_EQ(CodeOf([&] { ParseRecordsCsv(text); }), ErrorCode::kFormat);
}

TEST(RecordJournal, RoundTripAndTornTail) {
  auto records = RandomRecords(6, 3);
  std::string journal;
  for (auto const& r : records) journal += SerializeRecordLine(r) + "\n";
  auto back = ParseRecordJournal(journal);
  ExpectSameRecords(records, back);
  EXPECT_EQ(back[4].failure_reason, records[4].failure_reason);
  auto torn = journal + SerializeRecordLine(records[0]).substr(0, 20);
  EXPECT_EQ(ParseRecordJournal(torn).size(), records.size());
}

TEST(ConfigHash, StableAndSensitive) {
  EXPECT_EQ(ConfigHash("abc"), ConfigHash("abc"));
  EXPECT_NE(ConfigHash("abc"), ConfigHash("abd"));
  EXPECT_EQ(ConfigHash("abc").size(), 16u);
  LooOptions a;
  LooOptions b;
  b.fixed_tree = true;
  EXPECT_NE(OptionsJson(a), OptionsJson(b));
  b.fixed_tree = false;
  b.parallel = 4;
  EXPECT_EQ(OptionsJson(a), OptionsJson(b));
}

LooReport ReportOf(std::vector<LooRecord> records) {
  LooReport report;
  report.records = std::move(records);
  ClusterReport ref;
  ref.n_clusters = 12;
  ref.n_points = 100;
  report.reference.clusters_hs = ref;
  report.reference.vocabulary_size = 100;
  for (auto const& r : report.records) report.failed_count += r.failed;
  return report;
}

TEST(RunArtifacts, ReportIsPureFunctionOfFiles) {
  TempDir dir("artifacts");
  auto report = ReportOf(RandomRecords(30, 12));
  WriteRunArtifacts(report, dir.path());
  for (auto const* f : {kRecordsCsv, kSummaryJson, kHistogramCsv, kRegressionHs}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  RenderReport(dir.path());
  auto svg = ReadFileToString(dir / kHistogramSvg);
  auto txt = ReadFileToString(dir / kReportTxt);
  RenderReport(dir.path());
  EXPECT_EQ(ReadFileToString(dir / kHistogramSvg), svg);
  EXPECT_EQ(ReadFileToString(dir / kReportTxt), txt);
  std::size_t red = 0;
  for (auto pos = svg.find("fill=\"red\""); pos != std::string::npos;
       pos = svg.find("fill=\"red\"", pos + 1)) {
    ++red;
  }
  EXPECT_EQ(red, 1u);
  EXPECT_NE(txt.find("Overlap (HS)"), std::string::npos);
}

TEST(RunArtifacts, EmptyRecordsGiveReferenceOnly) {
  TempDir dir("empty");
  WriteRunArtifacts(ReportOf({}), dir.path());
  RenderReport(dir.path());
  auto txt = ReadFileToString(dir / kReportTxt);
  EXPECT_NE(txt.find("Reference"), std::string::npos);
  EXPECT_EQ(txt.find("Overlap HS"), std::string::npos);
  EXPECT_NE(ReadFileToString(dir / kHistogramSvg).find("fill=\"red\""), std::string::npos);
}

TEST(RunArtifacts, MissingFilesNamed) {
  TempDir dir("missing");
  try {
    RenderReport(dir.path());
    FAIL();
  } catch (Error const& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
    EXPECT_NE(std::string(e.what()).find(kRecordsCsv), std::string::npos);
    EXPECT_NE(std::string(e.what()).find(kSummaryJson), std::string::npos);
  }
}

TEST(RunArtifacts, LoadRecoversRecords) {
  TempDir dir("load");
  auto report = ReportOf(RandomRecords(9, 4));
  WriteRunArtifacts(report, dir.path());
  auto loaded = LoadRunReport(dir.path());
  ExpectSameRecords(report.records, loaded.records);
  ASSERT_TRUE(loaded.reference.clusters_hs.has_value());
  EXPECT_EQ(loaded.reference.clusters_hs->n_clusters, 12u);
}

TEST(HistogramSvg, Deterministic) {
  std::vector<HistogramBin> bins{{10, 2, false}, {11, 0, false}, {12, 1, true}};
  EXPECT_EQ(RenderHistogramSvg(bins), RenderHistogramSvg(bins));
  EXPECT_EQ(SerializeHistogramCsv(bins), "n_clusters,count,reference\n10,2,0\n11,0,0\n12,1,1\n");
}

}  // namespace
}  // namespace embstab
