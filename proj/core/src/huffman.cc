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

#include "embstab/huffman.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include "embstab/error.h"

namespace embstab {
namespace {

// Node numbering shared by Build and FromCodes: every proper prefix of a
// code is an internal node; order by length, then by bit string.
std::vector<std::vector<std::int32_t>> NumberInternalNodes(
    std::vector<std::string> const& codes, std::size_t& n_internal) {
  std::vector<std::string> prefixes;
  for (auto const& c : codes) {
    for (std::size_t len = 0; len < c.size(); ++len) {
      prefixes.push_back(c.substr(0, len));
    }
  }
  std::sort(prefixes.begin(), prefixes.end(),
            [](std::string const& a, std::string const& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());
  n_internal = prefixes.size();
  std::unordered_map<std::string, std::int32_t> id;
  id.reserve(prefixes.size());
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    id.emplace(prefixes[i], static_cast<std::int32_t>(i));
  }
  std::vector<std::vector<std::int32_t>> points(codes.size());
  for (std::size_t t = 0; t < codes.size(); ++t) {
    auto const& c = codes[t];
    points[t].reserve(c.size());
    for (std::size_t len = 0; len < c.size(); ++len) {
      points[t].push_back(id.at(c.substr(0, len)));
    }
  }
  return points;
}

std::string ReadFile(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace

HuffmanCoding HuffmanCoding::Build(Vocabulary const& vocab) {
  if (vocab.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary, "cannot code an empty vocabulary");
  }
  std::size_t const n = vocab.size();
  HuffmanCoding coding;
  coding.types_ = vocab.Types();
  coding.codes_.assign(n, std::string());
  if (n == 1) {
    coding.points_.assign(1, {});
    coding.Index();
    return coding;
  }

  // Nodes 0..n-1 are leaves in ascending-frequency order (leaf k is vocab
  // entry n-1-k); nodes n.. are merged nodes in creation order.
  std::vector<std::int64_t> weight(2 * n - 1);
  std::vector<std::size_t> parent(2 * n - 1, 0);
  std::vector<char> bit(2 * n - 1, '0');
  for (std::size_t k = 0; k < n; ++k) weight[k] = vocab[n - 1 - k].frequency;

  std::size_t leaf = 0;
  std::size_t merged = n;
  std::size_t next = n;
  auto pop = [&]() -> std::size_t {
    bool take_leaf = leaf < n && (merged == next || weight[leaf] <= weight[merged]);
    return take_leaf ? leaf++ : merged++;
  };
  for (; next < 2 * n - 1; ++next) {
    auto first = pop();
    auto second = pop();
    weight[next] = weight[first] + weight[second];
    parent[first] = next;
    parent[second] = next;
    bit[first] = '0';
    bit[second] = '1';
  }

  std::size_t const root = 2 * n - 2;
  for (std::size_t k = 0; k < n; ++k) {
    std::string code;
    for (std::size_t node = k; node != root; node = parent[node]) {
      code.push_back(bit[node]);
    }
    std::reverse(code.begin(), code.end());
    coding.codes_[n - 1 - k] = std::move(code);
  }
  coding.points_ = NumberInternalNodes(coding.codes_, coding.n_internal_);
  coding.Index();
  return coding;
}

HuffmanCoding HuffmanCoding::FromCodes(
    std::vector<std::pair<std::string, std::string>> const& codes) {
  HuffmanCoding coding;
  for (auto const& [type, code] : codes) {
    if (!IsValidProductId(type)) {
      throw Error(ErrorCode::kFormat, "invalid type id '" + type + "'");
    }
    if (code.find_first_not_of("01") != std::string::npos) {
      throw Error(ErrorCode::kFormat, "code of " + type + " is not a bit string");
    }
    coding.types_.push_back(type);
    coding.codes_.push_back(code);
  }
  // Prefix-freeness: in sorted order a prefix sorts directly before some
  // code it prefixes, so checking neighbors suffices.
  std::vector<std::pair<std::string, std::string>> sorted;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    sorted.emplace_back(coding.codes_[i], coding.types_[i]);
  }
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    auto const& a = sorted[i].first;
    auto const& b = sorted[i + 1].first;
    if (b.compare(0, a.size(), a) == 0) {
      throw Error(ErrorCode::kFormat, "code of " + sorted[i].second +
                                          " is a prefix of the code of " +
                                          sorted[i + 1].second);
    }
  }
  coding.points_ = NumberInternalNodes(coding.codes_, coding.n_internal_);
  coding.Index();
  if (coding.index_.size() != coding.types_.size()) {
    throw Error(ErrorCode::kFormat, "duplicate type in coding");
  }
  return coding;
}

HuffmanCoding HuffmanCoding::Restrict(Vocabulary const& vocab) const {
  HuffmanCoding out;
  out.n_internal_ = n_internal_;
  for (auto const& e : vocab.entries()) {
    auto i = Find(e.type);
    if (!i) {
      throw Error(ErrorCode::kMismatch,
                  "type " + e.type + " has no code in the fixed coding");
    }
    out.types_.push_back(types_[*i]);
    out.codes_.push_back(codes_[*i]);
    out.points_.push_back(points_[*i]);
  }
  out.Index();
  return out;
}

void HuffmanCoding::Index() {
  index_.clear();
  index_.reserve(types_.size());
  for (std::size_t i = 0; i < types_.size(); ++i) index_.emplace(types_[i], i);
}

std::optional<std::size_t> HuffmanCoding::Find(std::string_view type) const {
  auto it = index_.find(std::string(type));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int64_t HuffmanCoding::WeightedLength(Vocabulary const& vocab) const {
  std::int64_t total = 0;
  for (auto const& e : vocab.entries()) {
    auto i = Find(e.type);
    if (!i) throw Error(ErrorCode::kMismatch, "type " + e.type + " not coded");
    total += e.frequency * static_cast<std::int64_t>(codes_[*i].size());
  }
  return total;
}

std::string SerializeCoding(HuffmanCoding const& coding) {
  std::string out;
  for (std::size_t i = 0; i < coding.size(); ++i) {
    out += coding.type(i);
    out += '\t';
    out += coding.code(i);
    out += '\n';
  }
  return out;
}

HuffmanCoding ParseCoding(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> codes;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw Error(ErrorCode::kFormat,
                  "coding line " + std::to_string(line_no) +
                      ": expected type<TAB>bits");
    }
    codes.emplace_back(std::string(line.substr(0, tab)),
                       std::string(line.substr(tab + 1)));
  }
  if (codes.empty()) throw Error(ErrorCode::kFormat, "empty coding");
  if (codes.size() > 1) {
    for (auto const& [type, code] : codes) {
      if (code.empty()) {
        throw Error(ErrorCode::kFormat, "empty code for " + type);
      }
    }
  }
  return HuffmanCoding::FromCodes(codes);
}

HuffmanCoding LoadCodingFile(std::filesystem::path const& path) {
  return ParseCoding(ReadFile(path));
}

std::int64_t Hamming(std::string_view a, std::string_view b) {
  auto common = std::min(a.size(), b.size());
  std::int64_t d = 0;
  for (std::size_t i = 0; i < common; ++i) d += a[i] != b[i] ? 1 : 0;
  auto longer = std::max(a.size(), b.size());
  return d + static_cast<std::int64_t>(longer - common);
}

CodingDiff DiffCodings(HuffmanCoding const& a, HuffmanCoding const& b) {
  CodingDiff diff;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto j = b.Find(a.type(i));
    if (!j) {
      ++diff.disappeared_types;
      continue;
    }
    auto d = Hamming(a.code(i), b.code(*j));
    diff.per_type_hamming.emplace(a.type(i), d);
    ++diff.shared_types;
    total += d;
    if (d > 0) ++diff.changed_types;
    diff.max_hamming = std::max(diff.max_hamming, d);
  }
  diff.appeared_types =
      static_cast<std::int64_t>(b.size()) - diff.shared_types;
  if (diff.shared_types > 0) {
    diff.mean_hamming =
        static_cast<double>(total) / static_cast<double>(diff.shared_types);
  }
  return diff;
}

CodingDiff PerturbAndDiff(Vocabulary const& vocab, std::string_view type) {
  auto before = HuffmanCoding::Build(vocab);
  auto after = HuffmanCoding::Build(vocab.WithDecrement(type, 1));
  return DiffCodings(before, after);
}

}  // namespace embstab
