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

#include "embstab/loo.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>

#include "embstab/error.h"
#include "embstab/model_io.h"
#include "embstab/rng.h"

namespace embstab {
namespace {

double MeanDensity(ClusterReport const& report) {
  if (report.per_cluster_density.empty()) return 0.0;
  double sum = 0.0;
  for (auto d : report.per_cluster_density) sum += static_cast<double>(d);
  return sum / static_cast<double>(report.per_cluster_density.size());
}

struct Reference {
  Vocabulary vocab;
  HuffmanCoding coding;
  EmbeddingModel hs;
  std::optional<EmbeddingModel> neg;
  std::optional<ClusterReport> clusters_hs;
  std::optional<ClusterReport> clusters_neg;
  std::vector<std::string> seeds;
};

// Overlap against the reference on the seeds the reduced model still has.
double OverlapOnSurvivors(EmbeddingModel const& reference,
                          EmbeddingModel const& model,
                          std::vector<std::string> const& seeds, std::size_t k,
                          std::size_t threads, std::size_t& dropped) {
  if (model.size() <= k) {
    throw Error(ErrorCode::kOutOfRange,
                "reduced vocabulary of " + std::to_string(model.size()) +
                    " types is too small for k = " + std::to_string(k));
  }
  std::vector<std::string> kept;
  for (auto const& s : seeds) {
    if (model.Find(s)) kept.push_back(s);
  }
  dropped = seeds.size() - kept.size();
  if (kept.empty()) {
    throw Error(ErrorCode::kNotFound, "no overlap seed survives the omission");
  }
  return OverlapAtK(reference, model, kept, k, threads).mean;
}

ClusterReport Topology(EmbeddingModel const& model, GroupCatalog const& groups,
                       LooOptions const& options, std::size_t threads) {
  auto report = Dbscan(model, &groups, options.dbscan, threads);
  LocalDensity(model, report, options.density_radius, options.density_cap);
  return report;
}

}  // namespace

std::string ToString(FrequencyAggregation agg) {
  switch (agg) {
    case FrequencyAggregation::kMin:
      return "min";
    case FrequencyAggregation::kMean:
      return "mean";
    case FrequencyAggregation::kMedian:
      return "median";
  }
  return "min";
}

FrequencyAggregation ParseFrequencyAggregation(std::string const& name) {
  if (name == "min") return FrequencyAggregation::kMin;
  if (name == "mean") return FrequencyAggregation::kMean;
  if (name == "median") return FrequencyAggregation::kMedian;
  throw Error(ErrorCode::kInvalidArgument,
              "frequency aggregation must be min, mean or median, not " + name);
}

void LooOptions::Validate() const {
  auto fail = [](std::string const& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  hs.Validate();
  if (hs.mode != TrainMode::kHierarchicalSoftmax) {
    fail("the HS configuration must use hierarchical softmax");
  }
  if (hs.fixed_coding) fail("the HS configuration must not carry a coding");
  if (neg) {
    neg->Validate();
    if (neg->mode != TrainMode::kNegativeSampling) {
      fail("the NEG configuration must use negative sampling");
    }
    if (neg->min_count != hs.min_count || neg->window != hs.window ||
        neg->dims != hs.dims || neg->iterations != hs.iterations ||
        neg->seed != hs.seed) {
      fail("HS and NEG configurations must share min_count, window, dims, "
           "iterations and seed");
    }
  }
  if (k < 1) fail("k must be positive");
  if (seed_sample < 1) fail("seed sample must be positive");
  if (parallel < 1) fail("parallel must be at least 1");
}

LooFeatures ExtractFeatures(Vocabulary const& vocab_ref, Session const& session,
                            HuffmanCoding const& coding_ref,
                            HuffmanCoding const& coding_new,
                            std::int64_t min_count, FrequencyAggregation agg) {
  LooFeatures f;
  f.length = static_cast<double>(session.tokens.size());
  f.rank = static_cast<double>(session.index);
  std::vector<double> freqs;
  for (auto const& [type, count] : CountTokens(session)) {
    auto freq = vocab_ref.Frequency(type);
    if (freq == 0) continue;
    freqs.push_back(static_cast<double>(freq));
    if (freq - count < min_count) f.min_count_flag = 1.0;
  }
  if (!freqs.empty()) {
    double value = 0.0;
    switch (agg) {
      case FrequencyAggregation::kMin:
        value = *std::min_element(freqs.begin(), freqs.end());
        break;
      case FrequencyAggregation::kMean:
        value = std::accumulate(freqs.begin(), freqs.end(), 0.0) /
                static_cast<double>(freqs.size());
        break;
      case FrequencyAggregation::kMedian: {
        std::sort(freqs.begin(), freqs.end());
        auto m = freqs.size() / 2;
        value = freqs.size() % 2 == 1 ? freqs[m] : (freqs[m - 1] + freqs[m]) / 2;
        break;
      }
    }
    f.freq_agg = std::log10(value);
  }
  auto diff = DiffCodings(coding_ref, coding_new);
  f.huffman_changes_log10 = std::log10(1.0 + static_cast<double>(diff.changed_types));
  f.max_hamming = static_cast<double>(diff.max_hamming);
  return f;
}

std::vector<std::size_t> SelectSessions(std::size_t corpus_size,
                                        std::size_t count, std::uint64_t seed) {
  if (count > corpus_size) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot select " + std::to_string(count) + " of " +
                    std::to_string(corpus_size) + " sessions");
  }
  std::vector<std::size_t> positions(corpus_size);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  DeterministicRng rng(SubstreamSeed(seed, "loo-selection"));
  for (std::size_t i = 0; i < count; ++i) {
    auto j = i + static_cast<std::size_t>(rng.NextBelow(corpus_size - i));
    std::swap(positions[i], positions[j]);
  }
  positions.resize(count);
  std::sort(positions.begin(), positions.end());
  return positions;
}

LooReport RunLoo(SessionCorpus const& corpus, GroupCatalog const& groups,
                 LooOptions const& options, LooCallbacks callbacks) {
  options.Validate();
  auto say = [&](std::string const& msg) {
    if (callbacks.progress) callbacks.progress(msg);
  };
  auto const min_count = options.hs.min_count;
  auto const positions =
      SelectSessions(corpus.size(), options.n_subsamples, options.selection_seed);
  std::size_t const inner_threads = 1;

  LooReport report;
  report.options = options;

  say("training reference models");
  Reference ref{Vocabulary::Build(corpus, min_count, &groups), {}, {}, {}, {}, {}, {}};
  if (options.k >= ref.vocab.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "k = " + std::to_string(options.k) + " needs more than " +
                    std::to_string(options.k) + " reference types, have " +
                    std::to_string(ref.vocab.size()));
  }
  ref.coding = HuffmanCoding::Build(ref.vocab);
  ref.hs = Train(corpus, ref.vocab, options.hs);
  RoundModel(ref.hs, options.hs.round_digits);
  if (options.neg) {
    ref.neg = Train(corpus, ref.vocab, *options.neg);
    RoundModel(*ref.neg, options.neg->round_digits);
  }
  auto sample_size = options.seed_sample;
  auto pool = std::min(options.seed_pool, ref.vocab.size());
  sample_size = std::min(sample_size, pool);
  auto seeds = SampleSeeds(ref.vocab, options.seed_pool, sample_size,
                           options.selection_seed);
  ref.seeds = seeds.seeds;

  auto& summary = report.reference;
  summary.corpus = ComputeCorpusStats(corpus, ref.vocab, groups);
  summary.vocabulary_size = ref.vocab.size();
  summary.coding_internal_nodes = ref.coding.n_internal();
  summary.seed_pool = seeds.pool_size;
  summary.seed_count = seeds.seeds.size();
  summary.seed_pool_clamped = seeds.pool_clamped;
  summary.control_overlap_hs =
      OverlapAtK(ref.hs, ref.hs, ref.seeds, options.k, inner_threads).mean;
  if (ref.neg) {
    summary.control_overlap_neg =
        OverlapAtK(*ref.neg, *ref.neg, ref.seeds, options.k, inner_threads).mean;
  }
  if (options.topology) {
    ref.clusters_hs = Topology(ref.hs, groups, options, inner_threads);
    summary.clusters_hs = ref.clusters_hs;
    summary.mean_density_hs = MeanDensity(*ref.clusters_hs);
    if (ref.neg && options.topology_neg) {
      ref.clusters_neg = Topology(*ref.neg, groups, options, inner_threads);
      summary.clusters_neg = ref.clusters_neg;
    }
  }
  if (options.keep_models_dir) {
    std::filesystem::create_directories(*options.keep_models_dir);
    SaveModel(ref.hs, *options.keep_models_dir / "reference_hs.txt");
    if (ref.neg) SaveModel(*ref.neg, *options.keep_models_dir / "reference_neg.txt");
  }

  std::vector<LooRecord> records(positions.size());
  std::vector<bool> done(positions.size(), false);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    auto it = callbacks.completed.find(corpus[positions[i]].index);
    if (it != callbacks.completed.end()) {
      records[i] = it->second;
      done[i] = true;
    }
  }
  std::mutex mu;
  std::size_t finished = 0;
  auto const total = positions.size();

  ParallelFor(positions.size(), options.parallel, [&](std::size_t i) {
    if (done[i]) return;
    auto const pos = positions[i];
    auto const& session = corpus[pos];
    LooRecord rec;
    rec.session_index = session.index;
    auto omitted = OmitSession(corpus, pos);
    std::optional<Vocabulary> vocab;
    try {
      vocab = Vocabulary::Build(omitted, min_count, &groups);
    } catch (Error const& e) {
      if (e.code() != ErrorCode::kEmptyVocabulary &&
          e.code() != ErrorCode::kEmptyCorpus) {
        throw;
      }
      rec.failed = true;
      rec.failure_reason = e.what();
    }
    if (vocab) {
      auto coding = options.fixed_tree ? ref.coding.Restrict(*vocab)
                                       : HuffmanCoding::Build(*vocab);
      auto diff = DiffCodings(ref.coding, coding);
      rec.changed_types = diff.changed_types;
      rec.appeared_types = diff.appeared_types;
      rec.disappeared_types = diff.disappeared_types;
      rec.same_tree = diff.identical();
      rec.features = ExtractFeatures(ref.vocab, session, ref.coding, coding,
                                     min_count, options.freq_agg);
      auto hs_config = options.hs;
      if (options.fixed_tree) hs_config.fixed_coding = coding;
      try {
        auto hs = Train(omitted, *vocab, hs_config);
        RoundModel(hs, hs_config.round_digits);
        rec.outcomes.overlap_hs =
            OverlapOnSurvivors(ref.hs, hs, ref.seeds, options.k, inner_threads,
                               rec.outcomes.seeds_dropped_hs);
        if (options.topology) {
          auto clusters = Topology(hs, groups, options, inner_threads);
          auto delta = ClusterDeltaOf(*ref.clusters_hs, clusters);
          rec.outcomes.has_topology = true;
          rec.outcomes.n_clusters = static_cast<std::int64_t>(clusters.n_clusters);
          rec.outcomes.noise = static_cast<std::int64_t>(clusters.noise_count);
          rec.outcomes.mean_purity = clusters.mean_purity;
          rec.outcomes.mean_density = MeanDensity(clusters);
          rec.outcomes.delta_n_clusters = delta.delta_n_clusters;
          rec.outcomes.delta_noise = delta.delta_noise;
          rec.outcomes.delta_mean_purity = delta.delta_mean_purity;
        }
        if (options.keep_models_dir) {
          SaveModel(hs, *options.keep_models_dir /
                            ("omit_" + std::to_string(session.index) + "_hs.txt"));
        }
        if (options.neg) {
          auto neg = Train(omitted, *vocab, *options.neg);
          RoundModel(neg, options.neg->round_digits);
          rec.outcomes.overlap_neg =
              OverlapOnSurvivors(*ref.neg, neg, ref.seeds, options.k,
                                 inner_threads, rec.outcomes.seeds_dropped_neg);
          if (options.keep_models_dir) {
            SaveModel(neg, *options.keep_models_dir /
                               ("omit_" + std::to_string(session.index) +
                                "_neg.txt"));
          }
        }
      } catch (Error const& e) {
        if (e.code() != ErrorCode::kNotFound &&
            e.code() != ErrorCode::kOutOfRange &&
            e.code() != ErrorCode::kNumericDivergence) {
          throw;
        }
        rec.failed = true;
        rec.failure_reason = e.what();
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    records[i] = rec;
    ++finished;
    if (callbacks.on_record) callbacks.on_record(rec);
    say("record " + std::to_string(rec.session_index) + " done (" +
        std::to_string(finished) + "/" + std::to_string(total) + ")");
  });

  report.records = std::move(records);
  for (auto const& r : report.records) {
    if (r.failed) {
      ++report.failed_count;
    } else if (r.same_tree) {
      ++report.same_tree_count;
    }
  }
  return report;
}

std::vector<std::string> const& FeatureNames() {
  static std::vector<std::string> const names{
      "Length",         "Frequency",
      "Rank",           "Min Count",
      "Huffman Changes (log10)", "Hamming Distance"};
  return names;
}

std::vector<double> FeatureVector(LooFeatures const& f) {
  return {f.length,        f.freq_agg,
          f.rank,          f.min_count_flag,
          f.huffman_changes_log10, f.max_hamming};
}

StabilityRegression RegressStability(LooReport const& report,
                                     OverlapTarget target) {
  std::vector<LooRecord const*> used;
  for (auto const& r : report.records) {
    if (r.failed) continue;
    if (target == OverlapTarget::kNeg && !r.outcomes.overlap_neg) continue;
    used.push_back(&r);
  }
  if (used.size() < 20) {
    throw Error(ErrorCode::kInvalidArgument,
                "regression needs at least 20 successful records, have " +
                    std::to_string(used.size()));
  }
  auto const& names = FeatureNames();
  std::vector<std::vector<double>> columns(names.size());
  std::vector<double> y;
  for (auto const* r : used) {
    auto f = FeatureVector(r->features);
    for (std::size_t j = 0; j < f.size(); ++j) columns[j].push_back(f[j]);
    y.push_back(target == OverlapTarget::kHs ? r->outcomes.overlap_hs
                                             : *r->outcomes.overlap_neg);
  }
  StabilityRegression out;
  out.n_used = used.size();
  std::vector<std::vector<double>> kept;
  std::vector<std::string> kept_names;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    auto [lo, hi] = std::minmax_element(columns[j].begin(), columns[j].end());
    if (*lo == *hi) {
      out.dropped_features.push_back(names[j]);
    } else {
      kept.push_back(columns[j]);
      kept_names.push_back(names[j]);
    }
  }
  out.full = Ols(kept, y, kept_names);
  std::vector<std::vector<double>> z;
  for (auto const& c : kept) z.push_back(ZScore(c));
  out.full_zscored = Ols(z, y, kept_names);
  for (std::size_t j = 0; j < kept.size(); ++j) {
    out.univariate.push_back(Ols({kept[j]}, y, {kept_names[j]}));
  }
  return out;
}

std::vector<HistogramBin> ClusterHistogram(LooReport const& report) {
  if (!report.reference.clusters_hs) {
    throw Error(ErrorCode::kInvalidArgument, "report has no topology outcomes");
  }
  auto reference = static_cast<std::int64_t>(report.reference.clusters_hs->n_clusters);
  std::vector<std::int64_t> counts{reference};
  for (auto const& r : report.records) {
    if (!r.failed && r.outcomes.has_topology) counts.push_back(r.outcomes.n_clusters);
  }
  auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  std::vector<HistogramBin> bins;
  for (auto c = *lo; c <= *hi; ++c) bins.push_back({c, 0, c == reference});
  for (auto c : counts) ++bins[static_cast<std::size_t>(c - *lo)].count;
  return bins;
}

Correlation DensityOverlapCorrelation(LooReport const& report) {
  std::vector<double> density;
  std::vector<double> overlap;
  for (auto const& r : report.records) {
    if (r.failed || !r.outcomes.has_topology) continue;
    density.push_back(r.outcomes.mean_density);
    overlap.push_back(r.outcomes.overlap_hs);
  }
  if (density.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "density correlation needs at least 3 records with topology");
  }
  return Correlations(density, overlap);
}

}  // namespace embstab
