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

#ifndef EMBSTAB_CORPUS_H_
#define EMBSTAB_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace embstab {

/// True if `id` is a usable product id: non-empty, no space, tab, CR or LF.
bool IsValidProductId(std::string_view id);

/// One user session. `index` is the 0-based line of the session in the file
/// it was read from; derived corpora keep the original index.
struct Session {
  std::vector<std::string> tokens;
  std::size_t index = 0;

  friend bool operator==(Session const&, Session const&) = default;
};

/// An ordered list of sessions. Immutable once built.
class SessionCorpus {
 public:
  SessionCorpus() = default;
  SessionCorpus(std::vector<Session> sessions, std::string source_label);

  std::vector<Session> const& sessions() const { return sessions_; }
  std::size_t size() const { return sessions_.size(); }
  bool empty() const { return sessions_.empty(); }
  Session const& operator[](std::size_t i) const { return sessions_[i]; }
  std::string const& source_label() const { return source_label_; }
  std::size_t token_count() const;

 private:
  std::vector<Session> sessions_;
  std::string source_label_;
};

/// Parses the one-session-per-line text format. Tokens are separated by
/// single spaces; trailing whitespace (including a CR) is stripped. Throws
/// `kFormat` naming the line for empty lines, invalid UTF-8 or empty tokens,
/// and `kEmptyCorpus` when there are no sessions at all.
SessionCorpus ParseCorpus(std::string_view text, std::string source_label = "");
SessionCorpus LoadCorpus(std::istream& in, std::string source_label = "");
SessionCorpus LoadCorpusFile(std::filesystem::path const& path);

/// Inverse of `ParseCorpus`: one line per session, LF-terminated.
std::string SerializeCorpus(SessionCorpus const& corpus);

/// Product to product-group labels.
class GroupCatalog {
 public:
  GroupCatalog() = default;
  explicit GroupCatalog(std::map<std::string, std::string> groups);

  /// Adds a mapping; throws `kInvalidArgument` if `product` already exists
  /// with a different group.
  void Add(std::string product, std::string group);
  std::optional<std::string> Find(std::string_view product) const;
  std::size_t size() const { return groups_.size(); }
  bool empty() const { return groups_.empty(); }
  std::map<std::string, std::string, std::less<>> const& entries() const {
    return groups_;
  }

 private:
  std::map<std::string, std::string, std::less<>> groups_;
};

/// Two-column TSV, no header: `product<TAB>group`.
GroupCatalog ParseGroups(std::string_view text);
GroupCatalog LoadGroupsFile(std::filesystem::path const& path);
std::string SerializeGroups(GroupCatalog const& groups);

struct VocabEntry {
  std::string type;
  std::int64_t frequency = 0;
  std::optional<std::string> group;

  friend bool operator==(VocabEntry const&, VocabEntry const&) = default;
};

/// Types surviving the min-count filter, in canonical order: frequency
/// descending, then id ascending (byte-wise).
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Counts every token of `corpus` and keeps types with frequency >=
  /// `min_count`. Throws `kEmptyCorpus` for an empty corpus and
  /// `kEmptyVocabulary` when nothing survives.
  static Vocabulary Build(SessionCorpus const& corpus, std::int64_t min_count,
                          GroupCatalog const* groups = nullptr);

  /// Same filter and ordering over explicit counts.
  static Vocabulary FromCounts(std::map<std::string, std::int64_t> const& counts,
                               std::int64_t min_count,
                               GroupCatalog const* groups = nullptr);

  std::vector<VocabEntry> const& entries() const { return entries_; }
  VocabEntry const& operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::int64_t min_count() const { return min_count_; }
  std::int64_t total_tokens() const { return total_tokens_; }

  std::optional<std::size_t> Find(std::string_view type) const;
  bool Contains(std::string_view type) const { return Find(type).has_value(); }
  /// Frequency of `type`, or 0 when it is not retained.
  std::int64_t Frequency(std::string_view type) const;
  std::vector<std::string> Types() const;

  /// The vocabulary that results when `type` loses `delta` occurrences. The
  /// type is dropped if it falls below min_count. Throws `kNotFound` if the
  /// type is absent.
  Vocabulary WithDecrement(std::string_view type, std::int64_t delta = 1) const;

  friend bool operator==(Vocabulary const& a, Vocabulary const& b) {
    return a.min_count_ == b.min_count_ && a.entries_ == b.entries_;
  }

 private:
  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::int64_t min_count_ = 1;
  std::int64_t total_tokens_ = 0;
};

/// Per-type token counts of one session (all tokens, retained or not).
std::map<std::string, std::int64_t> CountTokens(Session const& session);

/// Copy of `corpus` without the session at position `position`. The label
/// of the result records the omitted session's index. Throws `kOutOfRange`.
SessionCorpus OmitSession(SessionCorpus const& corpus, std::size_t position);

struct SyntheticSpec {
  std::int64_t n_groups = 20;
  std::int64_t products_per_group = 50;
  double zipf_exponent = 1.0;
  std::int64_t n_sessions = 20000;
  double mean_session_length = 7.0;
  double within_group_bias = 0.8;
  std::uint64_t seed = 1;

  /// Throws `kInvalidArgument` describing the first bad field.
  void Validate() const;
};

struct SyntheticCorpus {
  SessionCorpus corpus;
  GroupCatalog groups;
};

/// Zipf-distributed click sessions with group locality. Product ids are
/// `g<group>_p<product>`; popularity rank r belongs to group r % n_groups.
/// Session lengths are shifted-geometric with the requested mean. Each next
/// click stays in the current group with probability `within_group_bias`
/// (drawing from the group's conditional Zipf law), else is drawn from the
/// global law. A pure function of `spec`.
SyntheticCorpus GenerateSynthetic(SyntheticSpec const& spec);

struct CorpusStats {
  std::size_t n_sessions = 0;
  std::size_t n_tokens = 0;
  std::size_t n_distinct_types = 0;
  std::size_t n_retained_types = 0;
  double mean_session_length = 0.0;
  double mean_groups_per_session = 0.0;
};

/// Tokens without a group label count as their own singleton group.
CorpusStats ComputeCorpusStats(SessionCorpus const& corpus,
                               Vocabulary const& vocab,
                               GroupCatalog const& groups);

}  // namespace embstab

#endif  // EMBSTAB_CORPUS_H_
