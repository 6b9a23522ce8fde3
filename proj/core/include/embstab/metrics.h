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

#ifndef EMBSTAB_METRICS_H_
#define EMBSTAB_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embstab/corpus.h"
#include "embstab/trainer.h"

namespace embstab {

double Dot(std::span<double const> a, std::span<double const> b);
double Norm(std::span<double const> v);

/// ⟨u,v⟩ / (‖u‖·‖v‖), evaluated as Dot(u,v) / (Norm(u) * Norm(v)).
/// Throws `kInvalidArgument` for a zero vector or mismatched dims.
double Cosine(std::span<double const> u, std::span<double const> v);

struct Neighbor {
  std::string type;
  double similarity = 0.0;

  friend bool operator==(Neighbor const&, Neighbor const&) = default;
};

/// Exact cosine neighbor search over a model's input vectors. Norms are
/// computed once; a similarity is bitwise equal to `Cosine` of the same
/// pair. Zero vectors have similarity 0 to everything.
class NeighborIndex {
 public:
  explicit NeighborIndex(EmbeddingModel const& model);

  /// The k most similar types other than `seed`, by similarity descending
  /// and id ascending on exact ties. Throws `kNotFound` for an unknown seed
  /// and `kInvalidArgument` unless 1 <= k < size.
  std::vector<Neighbor> TopK(std::string_view seed, std::size_t k) const;
  std::vector<std::size_t> TopKIndices(std::size_t seed, std::size_t k) const;

  double Similarity(std::size_t i, std::size_t j) const;
  /// Cosine between an arbitrary vector and row `j`.
  double SimilarityTo(std::span<double const> v, double v_norm,
                      std::size_t j) const;
  EmbeddingModel const& model() const { return *model_; }

 private:
  EmbeddingModel const* model_;
  std::vector<double> norms_;
};

std::vector<Neighbor> TopKNeighbors(EmbeddingModel const& model,
                                    std::string_view seed, std::size_t k);

struct SeedSample {
  std::vector<std::string> seeds;  // sorted by id
  std::size_t pool_size = 0;       // after clamping to the vocabulary
  bool pool_clamped = false;
};

/// Draws `sample_size` seeds without replacement from the first
/// `pool_size` types of `canonical_types` (the most frequent ones). A pool
/// larger than the list is clamped to it. Throws `kInvalidArgument` if the
/// sample is larger than the pool.
SeedSample SampleSeeds(std::vector<std::string> const& canonical_types,
                       std::size_t pool_size, std::size_t sample_size,
                       std::uint64_t seed);
SeedSample SampleSeeds(Vocabulary const& vocab, std::size_t pool_size,
                       std::size_t sample_size, std::uint64_t seed);

struct OverlapReport {
  std::size_t k = 0;
  std::vector<std::string> seeds;
  std::vector<double> per_seed_overlap;
  double mean = 0.0;
  double sd = 0.0;
};

/// Per seed, |top_k(a) ∩ top_k(b)| / k. Throws `kNotFound` listing seeds
/// missing from either model.
OverlapReport OverlapAtK(EmbeddingModel const& a, EmbeddingModel const& b,
                         std::vector<std::string> const& seeds, std::size_t k,
                         std::size_t parallelism = 1);

struct DbscanParams {
  /// Two points are neighbors when their cosine similarity is > this.
  double eps_similarity = 0.8;
  /// A core point has at least this many neighbors, itself excluded.
  std::size_t min_neighbors = 10;
};

struct ClusterReport {
  std::size_t n_points = 0;
  std::size_t n_clusters = 0;
  /// Clusters ordered by their smallest core-point id; members sorted.
  std::vector<std::vector<std::string>> cluster_members;
  std::vector<std::string> noise;
  std::size_t noise_count = 0;
  std::vector<double> per_cluster_purity;
  std::vector<std::string> per_cluster_group;
  double mean_purity = 0.0;
  /// Filled by `LocalDensity`.
  std::vector<std::int64_t> per_cluster_density;
};

/// Density-based clustering over labelled points (row-major `vectors`,
/// `dims` columns). Clusters are the connected components of core points;
/// a border point joins the cluster of its smallest-id core neighbor;
/// everything else is noise. Points are processed in id order, so the
/// result does not depend on input order. Purity is the share of members
/// in the cluster's most common group (ties to the smallest label);
/// ungrouped members are singleton groups. An empty cluster list has mean
/// purity 0.
ClusterReport DbscanPoints(std::vector<std::string> const& ids,
                           std::span<double const> vectors, std::int32_t dims,
                           GroupCatalog const* groups = nullptr,
                           DbscanParams const& params = {},
                           std::size_t parallelism = 1);

ClusterReport Dbscan(EmbeddingModel const& model,
                     GroupCatalog const* groups = nullptr,
                     DbscanParams const& params = {},
                     std::size_t parallelism = 1);

/// Per cluster: among the `cap` types closest to the (unnormalized)
/// centroid, the number whose similarity is >= `radius_similarity`. Also
/// stores the counts in `report.per_cluster_density`.
std::vector<std::int64_t> LocalDensity(EmbeddingModel const& model,
                                       ClusterReport& report,
                                       double radius_similarity = 0.8,
                                       std::size_t cap = 200);

struct ClusterDelta {
  std::int64_t delta_n_clusters = 0;
  std::int64_t delta_noise = 0;
  double delta_mean_purity = 0.0;
};

/// Componentwise b - a.
ClusterDelta ClusterDeltaOf(ClusterReport const& a, ClusterReport const& b);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. fn must only
/// write state owned by index i.
void ParallelFor(std::size_t n, std::size_t workers,
                 std::function<void(std::size_t)> const& fn);

}  // namespace embstab

#endif  // EMBSTAB_METRICS_H_
