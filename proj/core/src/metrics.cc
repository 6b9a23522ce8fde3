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

#include "embstab/metrics.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <thread>

#include "embstab/error.h"
#include "embstab/rng.h"

namespace embstab {

double Dot(std::span<double const> a, std::span<double const> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
  return s;
}

double Norm(std::span<double const> v) { return std::sqrt(Dot(v, v)); }

double Cosine(std::span<double const> u, std::span<double const> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cosine of vectors of dims " +
                                                 std::to_string(u.size()) +
                                                 " and " +
                                                 std::to_string(v.size()));
  }
  double nu = Norm(u);
  double nv = Norm(v);
  if (nu == 0.0 || nv == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "cosine of a zero vector");
  }
  return Dot(u, v) / (nu * nv);
}

void ParallelFor(std::size_t n, std::size_t workers,
                 std::function<void(std::size_t)> const& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (auto i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(n);
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

NeighborIndex::NeighborIndex(EmbeddingModel const& model) : model_(&model) {
  norms_.resize(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) norms_[i] = Norm(model.input(i));
}

double NeighborIndex::Similarity(std::size_t i, std::size_t j) const {
  if (norms_[i] == 0.0 || norms_[j] == 0.0) return 0.0;
  return Dot(model_->input(i), model_->input(j)) / (norms_[i] * norms_[j]);
}

double NeighborIndex::SimilarityTo(std::span<double const> v, double v_norm,
                                   std::size_t j) const {
  if (v_norm == 0.0 || norms_[j] == 0.0) return 0.0;
  return Dot(v, model_->input(j)) / (v_norm * norms_[j]);
}

std::vector<std::size_t> NeighborIndex::TopKIndices(std::size_t seed,
                                                    std::size_t k) const {
  auto const n = model_->size();
  if (k < 1 || k >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "k = " + std::to_string(k) + " needs 1 <= k < " +
                    std::to_string(n));
  }
  if (norms_[seed] == 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "seed " + model_->type(seed) + " has a zero vector");
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != seed) scored.emplace_back(Similarity(seed, j), j);
  }
  auto better = [this](auto const& a, auto const& b) {
    if (a.first != b.first) return a.first > b.first;
    return model_->type(a.second) < model_->type(b.second);
  };
  std::partial_sort(scored.begin(),
                    scored.begin() + static_cast<std::ptrdiff_t>(k),
                    scored.end(), better);
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = scored[i].second;
  return out;
}

std::vector<Neighbor> NeighborIndex::TopK(std::string_view seed,
                                          std::size_t k) const {
  auto s = model_->IndexOf(seed);
  std::vector<Neighbor> out;
  for (auto j : TopKIndices(s, k)) {
    out.push_back({model_->type(j), Similarity(s, j)});
  }
  return out;
}

std::vector<Neighbor> TopKNeighbors(EmbeddingModel const& model,
                                    std::string_view seed, std::size_t k) {
  return NeighborIndex(model).TopK(seed, k);
}

SeedSample SampleSeeds(std::vector<std::string> const& canonical_types,
                       std::size_t pool_size, std::size_t sample_size,
                       std::uint64_t seed) {
  SeedSample out;
  out.pool_clamped = pool_size > canonical_types.size();
  out.pool_size = std::min(pool_size, canonical_types.size());
  if (sample_size > out.pool_size) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot sample " + std::to_string(sample_size) +
                    " seeds from a pool of " + std::to_string(out.pool_size));
  }
  std::vector<std::string> pool(
      canonical_types.begin(),
      canonical_types.begin() + static_cast<std::ptrdiff_t>(out.pool_size));
  DeterministicRng rng(SubstreamSeed(seed, "seeds"));
  for (std::size_t i = 0; i < sample_size; ++i) {
    auto j = i + static_cast<std::size_t>(rng.NextBelow(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(sample_size);
  std::sort(pool.begin(), pool.end());
  out.seeds = std::move(pool);
  return out;
}

SeedSample SampleSeeds(Vocabulary const& vocab, std::size_t pool_size,
                       std::size_t sample_size, std::uint64_t seed) {
  return SampleSeeds(vocab.Types(), pool_size, sample_size, seed);
}

OverlapReport OverlapAtK(EmbeddingModel const& a, EmbeddingModel const& b,
                         std::vector<std::string> const& seeds, std::size_t k,
                         std::size_t parallelism) {
  std::string missing;
  for (auto const& s : seeds) {
    if (!a.Find(s) || !b.Find(s)) missing += (missing.empty() ? "" : ", ") + s;
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kNotFound, "seeds missing from a model: " + missing);
  }
  NeighborIndex ia(a);
  NeighborIndex ib(b);
  OverlapReport report;
  report.k = k;
  report.seeds = seeds;
  report.per_seed_overlap.assign(seeds.size(), 0.0);
  if (k < 1 || k >= a.size() || k >= b.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "k = " + std::to_string(k) + " is not below both model sizes");
  }
  ParallelFor(seeds.size(), parallelism, [&](std::size_t i) {
    auto na = ia.TopKIndices(a.IndexOf(seeds[i]), k);
    auto nb = ib.TopKIndices(b.IndexOf(seeds[i]), k);
    std::vector<std::string> ta;
    std::vector<std::string> tb;
    for (auto j : na) ta.push_back(a.type(j));
    for (auto j : nb) tb.push_back(b.type(j));
    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    std::vector<std::string> both;
    std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(),
                          std::back_inserter(both));
    report.per_seed_overlap[i] =
        static_cast<double>(both.size()) / static_cast<double>(k);
  });
  if (!seeds.empty()) {
    double sum = 0.0;
    for (double v : report.per_seed_overlap) sum += v;
    report.mean = sum / static_cast<double>(seeds.size());
    if (seeds.size() > 1) {
      double ss = 0.0;
      for (double v : report.per_seed_overlap) {
        ss += (v - report.mean) * (v - report.mean);
      }
      report.sd = std::sqrt(ss / static_cast<double>(seeds.size() - 1));
    }
  }
  return report;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    // The smaller index becomes the root: roots are cluster minima.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::size_t> parent_;
};

void FillPurity(ClusterReport& report, GroupCatalog const* groups) {
  double sum = 0.0;
  for (auto const& members : report.cluster_members) {
    std::map<std::string, std::size_t> counts;
    for (auto const& m : members) {
      auto g = groups != nullptr ? groups->Find(m) : std::nullopt;
      ++counts[g ? *g : "(ungrouped:" + m + ")"];
    }
    // std::map iterates labels ascending, so the first maximum wins ties.
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    double purity = static_cast<double>(best->second) /
                    static_cast<double>(members.size());
    report.per_cluster_purity.push_back(purity);
    report.per_cluster_group.push_back(best->first);
    sum += purity;
  }
  if (!report.cluster_members.empty()) {
    report.mean_purity = sum / static_cast<double>(report.cluster_members.size());
  }
}

}  // namespace

ClusterReport DbscanPoints(std::vector<std::string> const& ids,
                           std::span<double const> vectors, std::int32_t dims,
                           GroupCatalog const* groups,
                           DbscanParams const& params,
                           std::size_t parallelism) {
  auto const n = ids.size();
  auto const d = static_cast<std::size_t>(dims);
  if (vectors.size() != n * d) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(n * d) + " values, got " +
                    std::to_string(vectors.size()));
  }
  // Work in id order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  auto row = [&](std::size_t i) { return vectors.subspan(order[i] * d, d); };
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = Norm(row(i));

  // neighbors[i] holds the j > i adjacent to i; the mirrored half is added
  // afterwards so every list ends up sorted.
  std::vector<std::vector<std::uint32_t>> upper(n);
  ParallelFor(n, parallelism, [&](std::size_t i) {
    if (norms[i] == 0.0) return;
    auto ri = row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norms[j] == 0.0) continue;
      double sim = Dot(ri, row(j)) / (norms[i] * norms[j]);
      if (sim > params.eps_similarity) {
        upper[i].push_back(static_cast<std::uint32_t>(j));
      }
    }
  });
  std::vector<std::vector<std::uint32_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : upper[i]) neighbors[j].push_back(static_cast<std::uint32_t>(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    neighbors[i].insert(neighbors[i].end(), upper[i].begin(), upper[i].end());
  }
  upper.clear();

  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    core[i] = neighbors[i].size() >= params.min_neighbors;
  }
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (auto j : neighbors[i]) {
      if (core[j]) sets.Union(i, j);
    }
  }
  // Roots are the smallest core index of each component; numbering roots
  // in ascending order orders clusters by their smallest core id.
  std::vector<std::int64_t> cluster_of_root(n, -1);
  std::vector<std::int64_t> label(n, -1);
  ClusterReport report;
  report.n_points = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    auto root = sets.Find(i);
    if (cluster_of_root[root] < 0) {
      cluster_of_root[root] = static_cast<std::int64_t>(report.n_clusters++);
    }
    label[i] = cluster_of_root[root];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (auto j : neighbors[i]) {  // ascending: first core is the smallest
      if (core[j]) {
        label[i] = label[j];
        break;
      }
    }
  }
  report.cluster_members.resize(report.n_clusters);
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] < 0) {
      report.noise.push_back(ids[order[i]]);
    } else {
      report.cluster_members[static_cast<std::size_t>(label[i])].push_back(
          ids[order[i]]);
    }
  }
  report.noise_count = report.noise.size();
  FillPurity(report, groups);
  return report;
}

ClusterReport Dbscan(EmbeddingModel const& model, GroupCatalog const* groups,
                     DbscanParams const& params, std::size_t parallelism) {
  return DbscanPoints(model.types(), model.input_data(), model.dims(), groups,
                      params, parallelism);
}

std::vector<std::int64_t> LocalDensity(EmbeddingModel const& model,
                                       ClusterReport& report,
                                       double radius_similarity,
                                       std::size_t cap) {
  NeighborIndex index(model);
  auto const d = static_cast<std::size_t>(model.dims());
  std::vector<std::int64_t> density;
  std::vector<double> centroid(d);
  for (auto const& members : report.cluster_members) {
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (auto const& m : members) {
      auto v = model.input(model.IndexOf(m));
      for (std::size_t k = 0; k < d; ++k) centroid[k] += v[k];
    }
    for (auto& c : centroid) c /= static_cast<double>(members.size());
    double norm = Norm(centroid);
    // The `cap` closest types include every type within the radius unless
    // more than `cap` of them qualify.
    std::size_t within = 0;
    for (std::size_t j = 0; j < model.size() && norm > 0.0; ++j) {
      if (index.SimilarityTo(centroid, norm, j) >= radius_similarity) ++within;
    }
    density.push_back(static_cast<std::int64_t>(std::min(within, cap)));
  }
  report.per_cluster_density = density;
  return density;
}

ClusterDelta ClusterDeltaOf(ClusterReport const& a, ClusterReport const& b) {
  return {static_cast<std::int64_t>(b.n_clusters) -
              static_cast<std::int64_t>(a.n_clusters),
          static_cast<std::int64_t>(b.noise_count) -
              static_cast<std::int64_t>(a.noise_count),
          b.mean_purity - a.mean_purity};
}

}  // namespace embstab
