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

#ifndef EMBSTAB_TESTS_ORACLES_HUFFMAN_ORACLE_H_
#define EMBSTAB_TESTS_ORACLES_HUFFMAN_ORACLE_H_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace embstab::oracle {

// Minimum of sum(freq_i * len_i) over all length vectors with
// sum 2^-len_i == 1, by exhaustive search. Lengths are enumerated as a
// non-decreasing sequence assigned to frequencies sorted descending, which
// loses no optimum (exchange argument).
inline std::int64_t OptimalWeightedLength(std::vector<std::int64_t> freqs) {
  auto const n = freqs.size();
  if (n <= 1) return 0;
  std::sort(freqs.rbegin(), freqs.rend());
  int const max_len = static_cast<int>(n) - 1;
  // Kraft budget in units of 2^-max_len.
  std::int64_t const full = std::int64_t{1} << max_len;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::function<void(std::size_t, int, std::int64_t, std::int64_t)> go =
      [&](std::size_t i, int min_len, std::int64_t used, std::int64_t cost) {
        if (cost >= best) return;
        if (i == n) {
          if (used == full) best = cost;
          return;
        }
        auto remaining = static_cast<std::int64_t>(n - i);
        for (int len = min_len; len <= max_len; ++len) {
          std::int64_t unit = std::int64_t{1} << (max_len - len);
          // Later codes are at least this long, so each uses <= unit.
          if (used + unit * remaining < full) break;
          if (used + unit > full) continue;
          go(i + 1, len, used + unit, cost + freqs[i] * len);
        }
      };
  go(0, 1, 0, 0);
  return best;
}

// Huffman with the pinned tie rules, done by scanning an explicit node list:
// the lightest node wins; at equal weight leaves beat merged nodes; among
// leaves the one earlier in ascending (frequency, then id descending) order
// wins; among merged nodes the older one wins. First pick gets bit 0.
inline std::map<std::string, std::string> NaiveHuffmanCodes(
    std::map<std::string, std::int64_t> const& counts) {
  struct Node {
    std::int64_t weight;
    bool leaf;
    std::size_t order;
    std::string type;
    std::shared_ptr<Node> zero;
    std::shared_ptr<Node> one;
  };
  std::vector<std::pair<std::string, std::int64_t>> leaves(counts.begin(),
                                                          counts.end());
  // Canonical order: frequency descending, id ascending; then reversed.
  std::sort(leaves.begin(), leaves.end(), [](auto const& a, auto const& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::reverse(leaves.begin(), leaves.end());
  std::vector<std::shared_ptr<Node>> live;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    live.push_back(std::make_shared<Node>(
        Node{leaves[i].second, true, i, leaves[i].first, nullptr, nullptr}));
  }
  std::map<std::string, std::string> codes;
  if (live.size() == 1) {
    codes[live[0]->type] = "";
    return codes;
  }
  std::size_t merged = 0;
  auto pick = [&]() {
    std::size_t best = 0;
    for (std::size_t i = 1; i < live.size(); ++i) {
      auto const& a = *live[i];
      auto const& b = *live[best];
      bool better = a.weight < b.weight ||
                    (a.weight == b.weight && a.leaf && !b.leaf) ||
                    (a.weight == b.weight && a.leaf == b.leaf && a.order < b.order);
      if (better) best = i;
    }
    auto node = live[best];
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(best));
    return node;
  };
  while (live.size() > 1) {
    auto first = pick();
    auto second = pick();
    live.push_back(std::make_shared<Node>(Node{first->weight + second->weight,
                                               false, merged++, "", first,
                                               second}));
  }
  std::function<void(Node const&, std::string)> walk = [&](Node const& node,
                                                           std::string prefix) {
    if (node.leaf) {
      codes[node.type] = prefix;
      return;
    }
    walk(*node.zero, prefix + "0");
    walk(*node.one, prefix + "1");
  };
  walk(*live[0], "");
  return codes;
}

inline std::int64_t NaiveHamming(std::string const& a, std::string const& b) {
  std::int64_t d = 0;
  auto const n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= a.size() || i >= b.size() || a[i] != b[i]) ++d;
  }
  return d;
}

}  // namespace embstab::oracle

#endif  // EMBSTAB_TESTS_ORACLES_HUFFMAN_ORACLE_H_
