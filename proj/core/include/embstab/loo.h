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

#ifndef EMBSTAB_LOO_H_
#define EMBSTAB_LOO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "embstab/corpus.h"
#include "embstab/huffman.h"
#include "embstab/metrics.h"
#include "embstab/stats.h"
#include "embstab/trainer.h"

namespace embstab {

enum class FrequencyAggregation { kMin, kMean, kMedian };

std::string ToString(FrequencyAggregation agg);
FrequencyAggregation ParseFrequencyAggregation(std::string const& name);

/// Properties of an omitted session.
struct LooFeatures {
  double length = 0.0;
  /// log10 of the aggregated reference frequency of the session's retained
  /// types; 0 when it has none.
  double freq_agg = 0.0;
  double rank = 0.0;
  /// 1 if omitting the session drops at least one type below min_count.
  double min_count_flag = 0.0;
  double huffman_changes_log10 = 0.0;
  double max_hamming = 0.0;
};

struct LooOutcomes {
  double overlap_hs = 0.0;
  std::optional<double> overlap_neg;
  std::size_t seeds_dropped_hs = 0;
  std::size_t seeds_dropped_neg = 0;
  bool has_topology = false;
  std::int64_t n_clusters = 0;
  std::int64_t noise = 0;
  double mean_purity = 0.0;
  double mean_density = 0.0;
  std::int64_t delta_n_clusters = 0;
  std::int64_t delta_noise = 0;
  double delta_mean_purity = 0.0;
};

struct LooRecord {
  std::size_t session_index = 0;
  bool failed = false;
  std::string failure_reason;
  LooFeatures features;
  LooOutcomes outcomes;
  std::int64_t changed_types = 0;
  std::int64_t appeared_types = 0;
  std::int64_t disappeared_types = 0;
  bool same_tree = false;
};

struct LooOptions {
  TrainConfig hs;
  /// Negative-sampling models are trained only when set.
  std::optional<TrainConfig> neg;
  std::size_t n_subsamples = 500;
  std::uint64_t selection_seed = 1;
  /// Reuse the reference Huffman coding (restricted to the surviving
  /// vocabulary) for every omitted-session model.
  bool fixed_tree = false;
  std::size_t k = 15;
  std::size_t seed_pool = 10000;
  std::size_t seed_sample = 5000;
  bool topology = true;
  bool topology_neg = false;
  DbscanParams dbscan;
  double density_radius = 0.8;
  std::size_t density_cap = 200;
  FrequencyAggregation freq_agg = FrequencyAggregation::kMin;
  /// Record pipelines run concurrently; results never depend on it.
  std::size_t parallel = 1;
  std::optional<std::filesystem::path> keep_models_dir;

  /// Throws `kInvalidArgument` when the two configurations disagree on
  /// min_count, window, dims, iterations or seed, or are in the wrong mode.
  void Validate() const;
};

struct ReferenceSummary {
  CorpusStats corpus;
  std::size_t vocabulary_size = 0;
  std::size_t coding_internal_nodes = 0;
  std::size_t seed_pool = 0;
  std::size_t seed_count = 0;
  bool seed_pool_clamped = false;
  /// Overlap of each reference model with itself; 1 by construction.
  double control_overlap_hs = 0.0;
  std::optional<double> control_overlap_neg;
  std::optional<ClusterReport> clusters_hs;
  std::optional<ClusterReport> clusters_neg;
  double mean_density_hs = 0.0;
};

struct LooReport {
  ReferenceSummary reference;
  std::vector<LooRecord> records;  // ascending session index
  LooOptions options;
  std::size_t same_tree_count = 0;
  std::size_t failed_count = 0;
};

struct LooCallbacks {
  /// Records already computed by an earlier run, keyed by session index.
  std::map<std::size_t, LooRecord> completed;
  /// Called (serialized) as each new record finishes.
  std::function<void(LooRecord const&)> on_record;
  std::function<void(std::string const&)> progress;
};

/// Features of omitting `session` from the corpus that produced `vocab_ref`
/// and `coding_ref`; `coding_new` is the coding of the reduced corpus.
LooFeatures ExtractFeatures(Vocabulary const& vocab_ref, Session const& session,
                            HuffmanCoding const& coding_ref,
                            HuffmanCoding const& coding_new,
                            std::int64_t min_count,
                            FrequencyAggregation agg = FrequencyAggregation::kMin);

/// Session positions drawn without replacement, ascending.
std::vector<std::size_t> SelectSessions(std::size_t corpus_size,
                                        std::size_t count, std::uint64_t seed);

/// The leave-one-out experiment: reference models on the full corpus, then
/// one HS (and optionally NEG) model per selected omitted session, each
/// compared against the reference on a seed set sampled once.
LooReport RunLoo(SessionCorpus const& corpus, GroupCatalog const& groups,
                 LooOptions const& options, LooCallbacks callbacks = {});

enum class OverlapTarget { kHs, kNeg };

struct StabilityRegression {
  RegressionFit full;
  RegressionFit full_zscored;
  std::vector<RegressionFit> univariate;
  /// Constant features cannot be fitted next to the intercept.
  std::vector<std::string> dropped_features;
  std::size_t n_used = 0;
};

/// Names of the six features in regression order.
std::vector<std::string> const& FeatureNames();
std::vector<double> FeatureVector(LooFeatures const& f);

/// OLS of the chosen overlap on the features of successful records. Needs
/// at least 20 of them (`kInvalidArgument`); stats errors propagate.
StabilityRegression RegressStability(LooReport const& report,
                                     OverlapTarget target);

struct HistogramBin {
  std::int64_t n_clusters = 0;
  std::size_t count = 0;
  bool reference = false;
};

/// Width-1 bins of the HS cluster counts over the reference and every
/// record with topology, from min to max; the reference bin is flagged.
std::vector<HistogramBin> ClusterHistogram(LooReport const& report);

/// Correlation between per-record mean local density and HS overlap.
Correlation DensityOverlapCorrelation(LooReport const& report);

}  // namespace embstab

#endif  // EMBSTAB_LOO_H_
