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

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "embstab/corpus.h"
#include "embstab/huffman.h"
#include "embstab/loo.h"
#include "embstab/loo_io.h"
#include "embstab/rng.h"
#include "test_util.h"

namespace embstab {
namespace {

using testing::CodeOf;

LooOptions TinyOptions(std::size_t n) {
  LooOptions o;
  o.hs.dims = 8;
  o.hs.iterations = 2;
  o.hs.min_count = 3;
  o.hs.fixed_window = true;
  o.n_subsamples = n;
  o.selection_seed = 5;
  o.k = 5;
  o.seed_pool = 40;
  o.seed_sample = 20;
  o.dbscan = {0.5, 3};
  return o;
}

SyntheticCorpus TinyCorpus() { return GenerateSynthetic({4, 10, 1.0, 300, 5.0, 0.8, 3}); }

TEST(ExtractFeatures, Definitions) {
  auto corpus = ParseCorpus("a a a a a b b b b b b c c c c c c c\na b c d e f g\n");
  auto vocab = Vocabulary::Build(corpus, 5);
  auto coding = HuffmanCoding::Build(vocab);
  auto f = ExtractFeatures(vocab, corpus[1], coding, coding, 5);
  EXPECT_EQ(f.length, 7.0);
  EXPECT_EQ(f.rank, 1.0);
  EXPECT_EQ(f.huffman_changes_log10, 0.0);
  EXPECT_EQ(f.max_hamming, 0.0);
  // a: reference 6, session holds one, 5 remain >= 5.
  EXPECT_EQ(f.min_count_flag, 0.0);
  EXPECT_DOUBLE_EQ(f.freq_agg, std::log10(6.0));
  auto mean = ExtractFeatures(vocab, corpus[1], coding, coding, 5, FrequencyAggregation::kMean);
  EXPECT_DOUBLE_EQ(mean.freq_agg, std::log10((6.0 + 7.0 + 8.0) / 3));
  auto median =
      ExtractFeatures(vocab, corpus[1], coding, coding, 5, FrequencyAggregation::kMedian);
  EXPECT_DOUBLE_EQ(median.freq_agg, std::log10(7.0));
}

TEST(ExtractFeatures, MinCountFlag) {
  auto corpus = ParseCorpus("r x\nr x\nr x\nr x\nr x y\n");
  auto vocab = Vocabulary::Build(corpus, 5);
  auto coding = HuffmanCoding::Build(vocab);
  auto f = ExtractFeatures(vocab, corpus[0], coding, coding, 5);
  EXPECT_EQ(f.min_count_flag, 1.0);
  EXPECT_DOUBLE_EQ(f.freq_agg, std::log10(5.0));
}

TEST(ExtractFeatures, NoRetainedTypes) {
  auto corpus = ParseCorpus("a a a\nz\n");
  auto vocab = Vocabulary::Build(corpus, 2);
  auto coding = HuffmanCoding::Build(vocab);
  EXPECT_EQ(ExtractFeatures(vocab, corpus[1], coding, coding, 2).freq_agg, 0.0);
}

TEST(ExtractFeatures, HuffmanChangesLogScaled) {
  auto a = Vocabulary::FromCounts({{"A", 3}, {"B", 3}, {"C", 3}, {"D", 2}, {"E", 2}}, 1);
  auto b = a.WithDecrement("A");
  auto ca = HuffmanCoding::Build(a);
  auto cb = HuffmanCoding::Build(b);
  auto diff = DiffCodings(ca, cb);
  auto f = ExtractFeatures(a, Session{{"A"}, 0}, ca, cb, 1);
  EXPECT_DOUBLE_EQ(f.huffman_changes_log10, std::log10(1.0 + diff.changed_types));
  EXPECT_EQ(f.max_hamming, static_cast<double>(diff.max_hamming));
}

TEST(SelectSessions, DistinctSortedDeterministic) {
  auto a = SelectSessions(1000, 50, 9);
  EXPECT_EQ(a, SelectSessions(1000, 50, 9));
  EXPECT_NE(a, SelectSessions(1000, 50, 10));
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 50u);
  EXPECT_EQ(SelectSessions(5, 5, 1), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_TRUE(SelectSessions(5, 0, 1).empty());
  EXPECT_EQ(CodeOf([] { SelectSessions(5, 6, 1); }), ErrorCode::kInvalidArgument);
}

TEST(LooOptions, Validation) {
  auto o = TinyOptions(1);
  EXPECT_NO_THROW(o.Validate());
  o.neg = o.hs;
  o.neg->mode = TrainMode::kNegativeSampling;
  EXPECT_NO_THROW(o.Validate());
  o.neg->window = 3;
  EXPECT_EQ(CodeOf([&] { o.Validate(); }), ErrorCode::kInvalidArgument);
  o = TinyOptions(1);
  o.hs.mode = TrainMode::kNegativeSampling;
  EXPECT_EQ(CodeOf([&] { o.Validate(); }), ErrorCode::kInvalidArgument);
}

TEST(RunLoo, ZeroSubsamples) {
  auto s = TinyCorpus();
  auto report = RunLoo(s.corpus, s.groups, TinyOptions(0));
  EXPECT_TRUE(report.records.empty());
  EXPECT_EQ(report.reference.corpus.n_sessions, 300u);
  EXPECT_GT(report.reference.vocabulary_size, 0u);
  EXPECT_EQ(report.reference.control_overlap_hs, 1.0);
  EXPECT_TRUE(report.reference.clusters_hs.has_value());
}

TEST(RunLoo, FixedTreeZeroesHuffmanFeaturesAndIsReproducible) {
  auto s = TinyCorpus();
  auto o = TinyOptions(6);
  o.fixed_tree = true;
  auto a = RunLoo(s.corpus, s.groups, o);
  ASSERT_EQ(a.records.size(), 6u);
  for (auto const& r : a.records) {
    EXPECT_FALSE(r.failed) << r.failure_reason;
    EXPECT_EQ(r.features.huffman_changes_log10, 0.0);
    EXPECT_EQ(r.features.max_hamming, 0.0);
    EXPECT_GE(r.outcomes.overlap_hs, 0.0);
    EXPECT_LE(r.outcomes.overlap_hs, 1.0);
    EXPECT_TRUE(r.outcomes.has_topology);
  }
  auto b = RunLoo(s.corpus, s.groups, o);
  EXPECT_EQ(SerializeRecordsCsv(a.records), SerializeRecordsCsv(b.records));
}

TEST(RunLoo, ParallelismDoesNotChangeRecords) {
  auto s = TinyCorpus();
  auto o = TinyOptions(5);
  o.neg = o.hs;
  o.neg->mode = TrainMode::kNegativeSampling;
  auto serial = RunLoo(s.corpus, s.groups, o);
  o.parallel = 3;
  auto parallel = RunLoo(s.corpus, s.groups, o);
  EXPECT_EQ(SerializeRecordsCsv(serial.records), SerializeRecordsCsv(parallel.records));
  for (auto const& r : serial.records) {
    ASSERT_TRUE(r.outcomes.overlap_neg.has_value());
    EXPECT_GE(*r.outcomes.overlap_neg, 0.0);
  }
  EXPECT_TRUE(serial.reference.control_overlap_neg.has_value());
}

TEST(RunLoo, RecordsOrderedAndSameTreeCounted) {
  auto s = TinyCorpus();
  auto o = TinyOptions(8);
  auto report = RunLoo(s.corpus, s.groups, o);
  auto expected = SelectSessions(s.corpus.size(), 8, o.selection_seed);
  std::size_t zero_changes = 0;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    EXPECT_EQ(report.records[i].session_index, s.corpus[expected[i]].index);
    zero_changes += report.records[i].features.huffman_changes_log10 == 0.0 &&
                    report.records[i].same_tree;
    EXPECT_EQ(report.records[i].same_tree,
              report.records[i].features.huffman_changes_log10 == 0.0);
  }
  EXPECT_EQ(report.same_tree_count, zero_changes);
  EXPECT_LE(report.same_tree_count, report.records.size());
}

TEST(RunLoo, EmptiedVocabularyIsFailedRecord) {
  SyntheticCorpus s;
  s.corpus = ParseCorpus("a b c d e f g h i j\n");
  auto o = TinyOptions(1);
  o.hs.min_count = 1;
  o.k = 3;
  o.topology = false;
  auto report = RunLoo(s.corpus, s.groups, o);
  ASSERT_EQ(report.records.size(), 1u);
  EXPECT_TRUE(report.records[0].failed);
  EXPECT_FALSE(report.records[0].failure_reason.empty());
  EXPECT_EQ(report.failed_count, 1u);
}

TEST(RunLoo, CompletedRecordsAreReused) {
  auto s = TinyCorpus();
  auto o = TinyOptions(3);
  o.topology = false;
  auto first = RunLoo(s.corpus, s.groups, o);
  LooCallbacks callbacks;
  auto marked = first.records[1];
  marked.outcomes.overlap_hs = 0.123;
  callbacks.completed.emplace(marked.session_index, marked);
  std::size_t computed = 0;
  callbacks.on_record = [&](LooRecord const&) { ++computed; };
  auto second = RunLoo(s.corpus, s.groups, o, callbacks);
  EXPECT_EQ(computed, 2u);
  EXPECT_EQ(second.records[1].outcomes.overlap_hs, 0.123);
  EXPECT_EQ(second.records[0].outcomes.overlap_hs, first.records[0].outcomes.overlap_hs);
}

TEST(RunLoo, KTooLargeForVocabulary) {
  auto s = TinyCorpus();
  auto o = TinyOptions(1);
  o.k = 10000;
  EXPECT_EQ(CodeOf([&] { RunLoo(s.corpus, s.groups, o); }), ErrorCode::kInvalidArgument);
}

LooReport SyntheticReport(std::size_t n, std::uint64_t seed) {
  LooReport report;
  DeterministicRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    LooRecord r;
    r.session_index = i;
    r.features.length = 1 + static_cast<double>(rng.NextBelow(20));
    r.features.freq_agg = rng.NextUniform() * 3;
    r.features.rank = static_cast<double>(i * 7);
    r.features.min_count_flag = static_cast<double>(rng.NextBelow(2));
    r.features.huffman_changes_log10 = rng.NextUniform() * 3;
    r.features.max_hamming = static_cast<double>(rng.NextBelow(6));
    r.outcomes.overlap_hs = 1 - 0.01 * r.features.huffman_changes_log10;
    report.records.push_back(r);
  }
  return report;
}

TEST(RegressStability, ExactConstructedFit) {
  auto report = SyntheticReport(40, 3);
  auto reg = RegressStability(report, OverlapTarget::kHs);
  EXPECT_NEAR(reg.full.r2, 1.0, 1e-12);
  auto const& names = reg.full.feature_names;
  auto idx = std::find(names.begin(), names.end(), "Huffman Changes (log10)") - names.begin();
  EXPECT_NEAR(reg.full.coefficients[static_cast<std::size_t>(idx)], -0.01, 1e-12);
  EXPECT_NEAR(reg.full.coefficients[0], 1.0, 1e-12);
  EXPECT_EQ(reg.univariate.size(), 6u);
  EXPECT_EQ(reg.n_used, 40u);
}

TEST(RegressStability, Guards) {
  EXPECT_EQ(CodeOf([] { RegressStability(SyntheticReport(19, 1), OverlapTarget::kHs); }),
            ErrorCode::kInvalidArgument);
  auto flat = SyntheticReport(30, 2);
  for (auto& r : flat.records) r.outcomes.overlap_hs = 0.9;
  EXPECT_EQ(CodeOf([&] { RegressStability(flat, OverlapTarget::kHs); }),
            ErrorCode::kZeroVariance);
  EXPECT_EQ(CodeOf([] { RegressStability(SyntheticReport(30, 2), OverlapTarget::kNeg); }),
            ErrorCode::kInvalidArgument);
}

TEST(RegressStability, ConstantFeaturesDropped) {
  auto report = SyntheticReport(30, 4);
  for (auto& r : report.records) {
    r.features.max_hamming = 0;
    r.outcomes.overlap_hs = 0.9 + 0.001 * r.features.length;
  }
  auto reg = RegressStability(report, OverlapTarget::kHs);
  EXPECT_EQ(reg.dropped_features, (std::vector<std::string>{"Hamming Distance"}));
  EXPECT_EQ(reg.full.feature_names.size(), 6u);
}

LooReport HistogramReport(std::int64_t reference, std::vector<std::int64_t> const& counts) {
  LooReport report;
  ClusterReport ref;
  ref.n_clusters = static_cast<std::size_t>(reference);
  report.reference.clusters_hs = ref;
  for (auto c : counts) {
    LooRecord r;
    r.outcomes.has_topology = true;
    r.outcomes.n_clusters = c;
    report.records.push_back(r);
  }
  return report;
}

TEST(ClusterHistogram, Examples) {
  auto bins = ClusterHistogram(HistogramReport(12, {10, 10}));
  ASSERT_EQ(bins.size(), 3u);
  EXPECT_EQ(bins[0].n_clusters, 10);
  EXPECT_EQ(bins[0].count, 2u);
  EXPECT_EQ(bins[1].count, 0u);
  EXPECT_EQ(bins[2].count, 1u);
  EXPECT_TRUE(bins[2].reference);
  EXPECT_FALSE(bins[0].reference);

  auto single = ClusterHistogram(HistogramReport(7, {7}));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_TRUE(single[0].reference);
  EXPECT_EQ(CodeOf([] { ClusterHistogram(LooReport{}); }), ErrorCode::kInvalidArgument);
}

TEST(DensityOverlapCorrelation, Monotone) {
  LooReport report;
  for (int i = 0; i < 6; ++i) {
    LooRecord r;
    r.outcomes.has_topology = true;
    r.outcomes.mean_density = 10.0 - i * i;
    r.outcomes.overlap_hs = 0.5 + 0.05 * i;
    report.records.push_back(r);
  }
  EXPECT_NEAR(DensityOverlapCorrelation(report).spearman, -1.0, 1e-12);
  for (auto& r : report.records) r.outcomes.mean_density = 4;
  EXPECT_EQ(CodeOf([&] { DensityOverlapCorrelation(report); }), ErrorCode::kZeroVariance);
}

}  // namespace
}  // namespace embstab
