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

#ifndef EMBSTAB_TESTS_ORACLES_DBSCAN_ORACLE_H_
#define EMBSTAB_TESTS_ORACLES_DBSCAN_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <string>
#include <vector>

namespace embstab::oracle {

struct DbscanResult {
  // Cluster members as sorted id lists, clusters ordered by smallest core id.
  std::vector<std::vector<std::string>> clusters;
  std::vector<std::string> noise;  // sorted
};

// Textbook quadratic DBSCAN over cosine similarity. Points are visited in id
// order; a cluster grows by breadth-first search through core points only,
// then each border point joins the cluster of its smallest-id core neighbor.
inline DbscanResult QuadraticDbscan(std::map<std::string, std::vector<double>> const& points,
                                    double eps, std::size_t min_neighbors) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> vecs;
  for (auto const& [id, v] : points) {
    ids.push_back(id);
    vecs.push_back(v);
  }
  auto const n = ids.size();
  auto sim = [&](std::size_t i, std::size_t j) {
    double dot = 0.0;
    double ni = 0.0;
    double nj = 0.0;
    for (std::size_t d = 0; d < vecs[i].size(); ++d) {
      dot += vecs[i][d] * vecs[j][d];
      ni += vecs[i][d] * vecs[i][d];
      nj += vecs[j][d] * vecs[j][d];
    }
    if (ni == 0.0 || nj == 0.0) return 0.0;
    return dot / (std::sqrt(ni) * std::sqrt(nj));
  };
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && sim(i, j) > eps) nbrs[i].push_back(j);
    }
  }
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= min_neighbors;
  std::vector<long> label(n, -1);
  long next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!core[s] || label[s] >= 0) continue;
    std::deque<std::size_t> queue{s};
    label[s] = next;
    while (!queue.empty()) {
      auto p = queue.front();
      queue.pop_front();
      for (auto q : nbrs[p]) {
        if (core[q] && label[q] < 0) {
          label[q] = next;
          queue.push_back(q);
        }
      }
    }
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (auto q : nbrs[i]) {  // ascending id order
      if (core[q]) {
        label[i] = label[q];
        break;
      }
    }
  }
  DbscanResult r;
  r.clusters.resize(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] < 0) {
      r.noise.push_back(ids[i]);
    } else {
      r.clusters[static_cast<std::size_t>(label[i])].push_back(ids[i]);
    }
  }
  return r;
}

}  // namespace embstab::oracle

#endif  // EMBSTAB_TESTS_ORACLES_DBSCAN_ORACLE_H_
