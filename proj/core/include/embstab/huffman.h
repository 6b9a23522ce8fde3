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

#ifndef EMBSTAB_HUFFMAN_H_
#define EMBSTAB_HUFFMAN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embstab/corpus.h"

namespace embstab {

/// Hierarchical-softmax coding: one root-to-leaf bit string ('0'/'1') per
/// type plus the internal nodes visited on the way.
///
/// Internal nodes are numbered breadth-first: by depth, then by the bit
/// string of the path leading to them. The numbering is therefore a function
/// of the code set alone, and a coding written with `Serialize` reads back
/// with identical node indices.
class HuffmanCoding {
 public:
  HuffmanCoding() = default;

  /// Builds the coding of `vocab`. Leaves enter the leaf queue in reverse
  /// canonical order (ascending frequency, id descending within a
  /// frequency); the classic two-queue merge then repeatedly takes the
  /// lighter queue front, preferring the leaf queue on equal weight. The
  /// first node taken at each merge is bit 0. Throws `kEmptyVocabulary`.
  static HuffmanCoding Build(Vocabulary const& vocab);

  /// Reconstructs a coding from explicit codes, kept in the given order.
  /// The code set must be prefix-free; it need not be complete. Throws
  /// `kFormat` otherwise.
  static HuffmanCoding FromCodes(
      std::vector<std::pair<std::string, std::string>> const& codes);

  /// The coding restricted to the types of `vocab`, in `vocab` order, with
  /// node numbering and internal-node count unchanged. Throws `kMismatch`
  /// if a type of `vocab` has no code here.
  HuffmanCoding Restrict(Vocabulary const& vocab) const;

  std::size_t size() const { return types_.size(); }
  std::size_t n_internal() const { return n_internal_; }
  std::vector<std::string> const& types() const { return types_; }
  std::string const& type(std::size_t i) const { return types_[i]; }
  std::string const& code(std::size_t i) const { return codes_[i]; }
  std::vector<std::int32_t> const& points(std::size_t i) const {
    return points_[i];
  }
  std::optional<std::size_t> Find(std::string_view type) const;

  /// Σ frequency(t) · |code(t)| over `vocab`'s types.
  std::int64_t WeightedLength(Vocabulary const& vocab) const;

  friend bool operator==(HuffmanCoding const& a, HuffmanCoding const& b) {
    return a.n_internal_ == b.n_internal_ && a.types_ == b.types_ &&
           a.codes_ == b.codes_ && a.points_ == b.points_;
  }

 private:
  void Index();

  std::vector<std::string> types_;
  std::vector<std::string> codes_;
  std::vector<std::vector<std::int32_t>> points_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t n_internal_ = 0;
};

/// `type<TAB>bitstring` lines in coding order.
std::string SerializeCoding(HuffmanCoding const& coding);
HuffmanCoding ParseCoding(std::string_view text);
HuffmanCoding LoadCodingFile(std::filesystem::path const& path);

/// Mismatches over the common prefix plus the length difference; the
/// classical Hamming distance when the lengths agree.
std::int64_t Hamming(std::string_view a, std::string_view b);

struct CodingDiff {
  std::int64_t changed_types = 0;
  /// Distance for every type present in both codings.
  std::map<std::string, std::int64_t> per_type_hamming;
  std::int64_t max_hamming = 0;
  /// Mean over all shared types (zero distances included).
  double mean_hamming = 0.0;
  std::int64_t shared_types = 0;
  std::int64_t appeared_types = 0;
  std::int64_t disappeared_types = 0;

  /// No shared type changed and no type appeared or disappeared.
  bool identical() const {
    return changed_types == 0 && appeared_types == 0 && disappeared_types == 0;
  }
};

/// Compares the codes of the types present in both codings. Types only in
/// `b` count as appeared, types only in `a` as disappeared.
CodingDiff DiffCodings(HuffmanCoding const& a, HuffmanCoding const& b);

/// Diff between the coding of `vocab` and the coding after `type` loses one
/// occurrence. Throws `kNotFound` if `type` is not in `vocab`.
CodingDiff PerturbAndDiff(Vocabulary const& vocab, std::string_view type);

}  // namespace embstab

#endif  // EMBSTAB_HUFFMAN_H_
