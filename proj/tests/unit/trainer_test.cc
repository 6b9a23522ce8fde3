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
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "embstab/corpus.h"
#include "embstab/huffman.h"
#include "embstab/metrics.h"
#include "embstab/model_io.h"
#include "embstab/rng.h"
#include "embstab/trainer.h"
#include "test_util.h"

namespace embstab {
namespace {

using testing::CodeOf;

SessionCorpus SmallCorpus() {
  return GenerateSynthetic({4, 6, 1.0, 300, 5.0, 0.8, 5}).corpus;
}

TrainConfig SmallConfig(TrainMode mode) {
  TrainConfig c;
  c.mode = mode;
  c.dims = 12;
  c.iterations = 3;
  c.min_count = 2;
  return c;
}

// Random vectors everywhere so no gradient is trivially zero.
void Scramble(EmbeddingModel& m, std::uint64_t seed) {
  DeterministicRng rng(seed);
  for (auto& v : m.input_data()) v = rng.NextUniform() - 0.5;
  for (auto& v : m.output_data()) v = rng.NextUniform() - 0.5;
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.dims = 0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.window = 0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.workers = 0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.subsample = -1;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  EXPECT_DOUBLE_EQ(TrainConfig{}.EffectiveAlphaMin(), 0.025 * 1e-4);
}

TEST(InitializeModel, RangesAndZeroOutputs) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  auto cfg = SmallConfig(TrainMode::kHierarchicalSoftmax);
  auto m = InitializeModel(vocab, cfg);
  EXPECT_EQ(m.size(), vocab.size());
  EXPECT_EQ(m.n_output(), vocab.size() - 1);
  for (auto v : m.input_data()) {
    EXPECT_GE(v, -0.5 / cfg.dims);
    EXPECT_LT(v, 0.5 / cfg.dims);
  }
  for (auto v : m.output_data()) EXPECT_EQ(v, 0.0);
  auto neg = InitializeModel(vocab, SmallConfig(TrainMode::kNegativeSampling));
  EXPECT_EQ(neg.n_output(), vocab.size());
}

TEST(InitializeModel, TypeVectorIndependentOfVocabularyOrder) {
  auto a = Vocabulary::FromCounts({{"x", 5}, {"y", 3}, {"z", 1}}, 1);
  auto b = Vocabulary::FromCounts({{"x", 1}, {"y", 9}, {"w", 4}}, 1);
  TrainConfig cfg;
  cfg.dims = 8;
  auto ma = InitializeModel(a, cfg);
  auto mb = InitializeModel(b, cfg);
  for (std::string t : {"x", "y"}) {
    auto va = ma.input(ma.IndexOf(t));
    auto vb = mb.input(mb.IndexOf(t));
    EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin())) << t;
  }
}

TEST(Train, SingleWorkerIsDeterministic) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  for (auto mode : {TrainMode::kHierarchicalSoftmax, TrainMode::kNegativeSampling}) {
    auto cfg = SmallConfig(mode);
    cfg.subsample = 1e-2;
    auto a = Train(corpus, vocab, cfg);
    auto b = Train(corpus, vocab, cfg);
    EXPECT_EQ(SerializeInputVectors(a, 8), SerializeInputVectors(b, 8));
    EXPECT_EQ(SerializeOutputVectors(a, 8), SerializeOutputVectors(b, 8));
    EXPECT_EQ(a.input_data(), b.input_data());
    EXPECT_TRUE(a.AllFinite());
  }
}

TEST(Train, SeedChangesModel) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  auto cfg = SmallConfig(TrainMode::kNegativeSampling);
  auto a = Train(corpus, vocab, cfg);
  cfg.seed = 2;
  EXPECT_NE(a.input_data(), Train(corpus, vocab, cfg).input_data());
}

TEST(Train, CooccurringTypesAttract) {
  std::string line;
  for (int i = 0; i < 20; ++i) line += i % 2 ? "b " : "a ";
  line.pop_back();
  std::string text;
  for (int i = 0; i < 30; ++i) text += line + "\n";
  text += "c d c d c d\n";
  auto corpus = ParseCorpus(text);
  auto vocab = Vocabulary::Build(corpus, 1);
  TrainConfig cfg;
  cfg.dims = 10;
  cfg.iterations = 10;
  auto before = InitializeModel(vocab, cfg);
  auto after = Train(corpus, vocab, cfg);
  auto cos = [](EmbeddingModel const& m) {
    return Cosine(m.input(m.IndexOf("a")), m.input(m.IndexOf("b")));
  };
  EXPECT_GT(cos(after), cos(before));
}

TEST(Train, ZeroIterationsLeavesInitialization) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  auto cfg = SmallConfig(TrainMode::kHierarchicalSoftmax);
  cfg.iterations = 0;
  EXPECT_EQ(Train(corpus, vocab, cfg).input_data(),
            InitializeModel(vocab, cfg).input_data());
}

TEST(Train, FixedWindowPairsDependOnCorpusOnly) {
  auto corpus = ParseCorpus("a b c d\nb rare a\nc d\n");
  auto vocab = Vocabulary::Build(corpus, 2);
  auto collect = [&](std::uint64_t seed) {
    std::multiset<std::pair<std::string, std::string>> pairs;
    TrainConfig cfg;
    cfg.dims = 4;
    cfg.iterations = 1;
    cfg.window = 2;
    cfg.fixed_window = true;
    cfg.min_count = 2;
    cfg.seed = seed;
    Train(corpus, vocab, cfg, [&](std::size_t c, std::size_t t) {
      pairs.emplace(vocab[c].type, vocab[t].type);
    });
    return pairs;
  };
  auto pairs = collect(1);
  EXPECT_EQ(pairs, collect(999));
  // Session 0: 12 ordered pairs within distance 2. Session 1: "rare" is
  // skipped but still separates b and a (distance 2). Session 2: c-d.
  std::multiset<std::pair<std::string, std::string>> expected{
      {"a", "b"}, {"a", "c"}, {"b", "a"}, {"b", "c"}, {"b", "d"}, {"c", "a"},
      {"c", "b"}, {"c", "d"}, {"d", "b"}, {"d", "c"}, {"b", "a"}, {"a", "b"},
      {"c", "d"}, {"d", "c"}};
  EXPECT_EQ(pairs, expected);
}

TEST(Train, SampledWindowStaysWithinBound) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  auto cfg = SmallConfig(TrainMode::kHierarchicalSoftmax);
  cfg.iterations = 1;
  cfg.window = 3;
  std::size_t sampled = 0;
  Train(corpus, vocab, cfg, [&](std::size_t, std::size_t) { ++sampled; });
  std::size_t fixed = 0;
  cfg.fixed_window = true;
  Train(corpus, vocab, cfg, [&](std::size_t, std::size_t) { ++fixed; });
  EXPECT_GT(sampled, 0u);
  EXPECT_LT(sampled, fixed);
}

TEST(Train, FixedCodingMismatchIsError) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  auto cfg = SmallConfig(TrainMode::kHierarchicalSoftmax);
  cfg.fixed_coding = HuffmanCoding::Build(Vocabulary::FromCounts({{"zz", 3}, {"yy", 2}}, 1));
  EXPECT_EQ(CodeOf([&] { Train(corpus, vocab, cfg); }), ErrorCode::kMismatch);
}

TEST(Train, FixedCodingIsUsedVerbatim) {
  auto corpus = SmallCorpus();
  auto full = Vocabulary::Build(corpus, 2);
  auto reduced_corpus = OmitSession(corpus, 3);
  auto reduced = Vocabulary::Build(reduced_corpus, 2);
  auto coding = HuffmanCoding::Build(full).Restrict(reduced);
  auto cfg = SmallConfig(TrainMode::kHierarchicalSoftmax);
  cfg.fixed_coding = coding;
  auto m = Train(reduced_corpus, reduced, cfg);
  ASSERT_TRUE(m.coding().has_value());
  EXPECT_EQ(SerializeCoding(*m.coding()), SerializeCoding(coding));
  EXPECT_EQ(m.n_output(), coding.n_internal());
}

TEST(Train, MultiWorkerVectorsFinite) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  auto cfg = SmallConfig(TrainMode::kNegativeSampling);
  cfg.workers = 3;
  EXPECT_TRUE(Train(corpus, vocab, cfg).AllFinite());
}

TEST(Train, DivergenceIsReported) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  auto cfg = SmallConfig(TrainMode::kNegativeSampling);
  cfg.alpha0 = 1e300;
  try {
    Train(corpus, vocab, cfg);
    FAIL();
  } catch (Error const& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumericDivergence);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos) << e.what();
  }
}

TEST(Train, SigmoidTableModeRuns) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  for (auto mode : {TrainMode::kHierarchicalSoftmax, TrainMode::kNegativeSampling}) {
    auto cfg = SmallConfig(mode);
    cfg.sigmoid_table = true;
    auto a = Train(corpus, vocab, cfg);
    EXPECT_TRUE(a.AllFinite());
    EXPECT_EQ(a.input_data(), Train(corpus, vocab, cfg).input_data());
  }
}

TEST(HsProbability, TwoTypesSumToOneExactly) {
  auto vocab = Vocabulary::FromCounts({{"A", 3}, {"B", 2}}, 1);
  auto coding = HuffmanCoding::Build(vocab);
  auto m = InitializeModel(vocab, SmallConfig(TrainMode::kHierarchicalSoftmax));
  Scramble(m, 4);
  EXPECT_DOUBLE_EQ(HsProbability(m, coding, "A", "A") + HsProbability(m, coding, "A", "B"),
                   1.0);
}

TEST(HsProbability, LeafNormalization) {
  auto corpus = SmallCorpus();
  auto vocab = Vocabulary::Build(corpus, 2);
  auto m = Train(corpus, vocab, SmallConfig(TrainMode::kHierarchicalSoftmax));
  auto const& coding = *m.coding();
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    double sum = 0.0;
    for (std::size_t t = 0; t < vocab.size(); ++t) {
      sum += HsProbability(m, coding, vocab[c].type, vocab[t].type);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(HsProbability, FreshModelIsPowerOfHalf) {
  auto vocab = Vocabulary::FromCounts({{"A", 4}, {"B", 2}, {"C", 1}, {"D", 1}}, 1);
  auto coding = HuffmanCoding::Build(vocab);
  auto m = InitializeModel(vocab, SmallConfig(TrainMode::kHierarchicalSoftmax));
  for (std::size_t t = 0; t < vocab.size(); ++t) {
    auto len = static_cast<double>(coding.code(coding.Find(vocab[t].type).value()).size());
    EXPECT_DOUBLE_EQ(HsProbability(m, coding, "A", vocab[t].type), std::pow(0.5, len));
    EXPECT_NEAR(PairLoss(m, "A", vocab[t].type), len * std::log(2.0), 1e-12);
  }
  EXPECT_EQ(CodeOf([&] { HsProbability(m, coding, "A", "nope"); }), ErrorCode::kNotFound);
}

TEST(PairLoss, FreshNegModel) {
  auto vocab = Vocabulary::FromCounts({{"A", 4}, {"B", 2}, {"C", 1}}, 1);
  auto m = InitializeModel(vocab, SmallConfig(TrainMode::kNegativeSampling));
  std::vector<std::string> noise{"B", "C", "B", "C", "B"};
  EXPECT_NEAR(PairLoss(m, "A", "A", noise), 6 * std::log(2.0), 1e-12);
}

// Gradient implied by one update: (before - after) / alpha.
double GradientError(TrainMode mode, std::uint64_t seed) {
  auto vocab = Vocabulary::FromCounts(
      {{"a", 9}, {"b", 7}, {"c", 5}, {"d", 4}, {"e", 3}, {"f", 2}, {"g", 1}}, 1);
  auto cfg = SmallConfig(mode);
  cfg.dims = 6;
  auto model = InitializeModel(vocab, cfg);
  Scramble(model, seed);
  DeterministicRng rng(seed * 31 + 7);
  auto const n = vocab.size();
  std::size_t center = rng.NextBelow(n);
  std::size_t target = rng.NextBelow(n);
  std::vector<std::size_t> noise;
  std::vector<std::string> noise_names;
  while (noise.size() < 3 && mode == TrainMode::kNegativeSampling) {
    auto k = static_cast<std::size_t>(rng.NextBelow(n));
    if (k == target) continue;
    noise.push_back(k);
    noise_names.push_back(vocab[k].type);
  }
  auto const& ct = vocab[center].type;
  auto const& tt = vocab[target].type;
  double const alpha = 1e-7;
  auto updated = model;
  ApplyPairUpdate(updated, center, target, noise, alpha);

  double num = 0.0;
  double den = 0.0;
  double const h = 1e-5;
  auto check = [&](std::vector<double>& before_data,
                   std::vector<double> const& after_data) {
    for (std::size_t i = 0; i < before_data.size(); ++i) {
      double analytic = (before_data[i] - after_data[i]) / alpha;
      double saved = before_data[i];
      before_data[i] = saved + h;
      double up = PairLoss(model, ct, tt, noise_names);
      before_data[i] = saved - h;
      double down = PairLoss(model, ct, tt, noise_names);
      before_data[i] = saved;
      double numeric = (up - down) / (2 * h);
      num += (analytic - numeric) * (analytic - numeric);
      den += numeric * numeric;
    }
  };
  // Only the center input row moves; compare it and every output row.
  auto d = static_cast<std::size_t>(cfg.dims);
  std::vector<double> in_before(model.input_data().begin() + center * d,
                                model.input_data().begin() + (center + 1) * d);
  std::vector<double> in_after(updated.input_data().begin() + center * d,
                               updated.input_data().begin() + (center + 1) * d);
  {
    // Perturb through the model itself.
    auto& data = model.input_data();
    for (std::size_t i = 0; i < d; ++i) {
      double analytic = (in_before[i] - in_after[i]) / alpha;
      double saved = data[center * d + i];
      data[center * d + i] = saved + h;
      double up = PairLoss(model, ct, tt, noise_names);
      data[center * d + i] = saved - h;
      double down = PairLoss(model, ct, tt, noise_names);
      data[center * d + i] = saved;
      double numeric = (up - down) / (2 * h);
      num += (analytic - numeric) * (analytic - numeric);
      den += numeric * numeric;
    }
  }
  check(model.output_data(), updated.output_data());
  // Rows other than the center's input must not move.
  for (std::size_t r = 0; r < n; ++r) {
    if (r == center) continue;
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_EQ(model.input_data()[r * d + i], updated.input_data()[r * d + i]);
    }
  }
  return std::sqrt(num / den);
}

TEST(ApplyPairUpdate, HsMatchesFiniteDifferences) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    EXPECT_LT(GradientError(TrainMode::kHierarchicalSoftmax, s), 1e-4) << s;
  }
}

TEST(ApplyPairUpdate, NegMatchesFiniteDifferences) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    EXPECT_LT(GradientError(TrainMode::kNegativeSampling, s), 1e-4) << s;
  }
}

TEST(NoiseDistribution, SingleTypeAlwaysDrawn) {
  auto vocab = Vocabulary::FromCounts({{"only", 3}}, 1);
  NoiseDistribution noise(vocab, 0.75);
  DeterministicRng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(NoiseSample(vocab, noise, rng), "only");
}

TEST(NoiseDistribution, UniformWhenExponentZero) {
  std::map<std::string, std::int64_t> counts;
  for (int i = 0; i < 10; ++i) counts["t" + std::to_string(i)] = 1 + i * i;
  auto vocab = Vocabulary::FromCounts(counts, 1);
  NoiseDistribution noise(vocab, 0.0);
  DeterministicRng rng(123);
  std::vector<int> hits(10, 0);
  int const draws = 1'000'000;
  for (int i = 0; i < draws; ++i) ++hits[noise.Draw(rng)];
  for (auto h : hits) EXPECT_NEAR(h / static_cast<double>(draws), 0.1, 0.001);
}

TEST(NoiseDistribution, UnigramMonteCarlo) {
  auto vocab = Vocabulary::FromCounts({{"A", 99}, {"B", 1}}, 1);
  NoiseDistribution noise(vocab, 1.0);
  EXPECT_NEAR(noise.Probability(0), 0.99, 1e-8);
  DeterministicRng rng(77);
  int a = 0;
  int const draws = 1'000'000;
  for (int i = 0; i < draws; ++i) a += noise.Draw(rng) == 0;
  EXPECT_NEAR(a / static_cast<double>(draws), 0.99, 0.005);
}

TEST(Subsample, KeepProbability) {
  EXPECT_DOUBLE_EQ(SubsampleKeepProbability(1e-3, 1e-3), 1.0);
  double share = 0.1;
  double x = 1e-3 / share;
  EXPECT_DOUBLE_EQ(SubsampleKeepProbability(1e-3, share), std::sqrt(x) + x);
  EXPECT_DOUBLE_EQ(SubsampleKeepProbability(0.0, 0.5), 1.0);
}

}  // namespace
}  // namespace embstab
