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

#include "embstab/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "embstab/error.h"
#include "embstab/rng.h"

namespace embstab {
namespace {

bool IsValidUtf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

std::string ReadFile(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void SortCanonical(std::vector<VocabEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](VocabEntry const& a, VocabEntry const& b) {
              if (a.frequency != b.frequency) return a.frequency > b.frequency;
              return a.type < b.type;
            });
}

}  // namespace

bool IsValidProductId(std::string_view id) {
  return !id.empty() && id.find_first_of(" \t\r\n") == std::string_view::npos;
}

SessionCorpus::SessionCorpus(std::vector<Session> sessions,
                             std::string source_label)
    : sessions_(std::move(sessions)), source_label_(std::move(source_label)) {
  for (auto const& s : sessions_) {
    if (s.tokens.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "session " + std::to_string(s.index) + " has no tokens");
    }
  }
}

std::size_t SessionCorpus::token_count() const {
  std::size_t n = 0;
  for (auto const& s : sessions_) n += s.tokens.size();
  return n;
}

SessionCorpus ParseCorpus(std::string_view text, std::string source_label) {
  std::vector<Session> sessions;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto where = [&] { return "line " + std::to_string(line_no); };
    if (!IsValidUtf8(line)) {
      throw Error(ErrorCode::kFormat, where() + ": invalid UTF-8");
    }
    auto last = line.find_last_not_of(" \t\r");
    if (last == std::string_view::npos) {
      throw Error(ErrorCode::kFormat, where() + ": empty line");
    }
    line = line.substr(0, last + 1);
    Session session;
    session.index = sessions.size();
    std::size_t tpos = 0;
    while (true) {
      auto sp = line.find(' ', tpos);
      auto token = line.substr(tpos, sp == std::string_view::npos
                                         ? std::string_view::npos
                                         : sp - tpos);
      if (!IsValidProductId(token)) {
        throw Error(ErrorCode::kFormat,
                    where() + ": empty or malformed token at column " +
                        std::to_string(tpos + 1));
      }
      session.tokens.emplace_back(token);
      if (sp == std::string_view::npos) break;
      tpos = sp + 1;
    }
    sessions.push_back(std::move(session));
  }
  if (sessions.empty()) {
    throw Error(ErrorCode::kEmptyCorpus,
                "no sessions in " +
                    (source_label.empty() ? std::string("input") : source_label));
  }
  return SessionCorpus(std::move(sessions), std::move(source_label));
}

SessionCorpus LoadCorpus(std::istream& in, std::string source_label) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseCorpus(ss.str(), std::move(source_label));
}

SessionCorpus LoadCorpusFile(std::filesystem::path const& path) {
  return ParseCorpus(ReadFile(path), path.string());
}

std::string SerializeCorpus(SessionCorpus const& corpus) {
  std::string out;
  for (auto const& s : corpus.sessions()) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i != 0) out += ' ';
      out += s.tokens[i];
    }
    out += '\n';
  }
  return out;
}

GroupCatalog::GroupCatalog(std::map<std::string, std::string> groups) {
  for (auto& [product, group] : groups) Add(product, group);
}

void GroupCatalog::Add(std::string product, std::string group) {
  if (!IsValidProductId(product)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid product id '" + product + "'");
  }
  auto [it, inserted] = groups_.emplace(std::move(product), group);
  if (!inserted && it->second != group) {
    throw Error(ErrorCode::kInvalidArgument,
                "product " + it->first + " assigned to both " + it->second +
                    " and " + group);
  }
}

std::optional<std::string> GroupCatalog::Find(std::string_view product) const {
  auto it = groups_.find(product);
  if (it == groups_.end()) return std::nullopt;
  return it->second;
}

GroupCatalog ParseGroups(std::string_view text) {
  GroupCatalog groups;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string_view::npos) {
      throw Error(ErrorCode::kFormat, "groups line " + std::to_string(line_no) +
                                          ": expected product<TAB>group");
    }
    try {
      groups.Add(std::string(line.substr(0, tab)),
                 std::string(line.substr(tab + 1)));
    } catch (Error const& e) {
      throw Error(ErrorCode::kFormat,
                  "groups line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return groups;
}

GroupCatalog LoadGroupsFile(std::filesystem::path const& path) {
  return ParseGroups(ReadFile(path));
}

std::string SerializeGroups(GroupCatalog const& groups) {
  std::string out;
  for (auto const& [product, group] : groups.entries()) {
    out += product;
    out += '\t';
    out += group;
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::Build(SessionCorpus const& corpus,
                             std::int64_t min_count,
                             GroupCatalog const* groups) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot build a vocabulary from " +
                                             (corpus.source_label().empty()
                                                  ? std::string("an empty corpus")
                                                  : corpus.source_label()));
  }
  std::map<std::string, std::int64_t> counts;
  for (auto const& s : corpus.sessions()) {
    for (auto const& t : s.tokens) ++counts[t];
  }
  return FromCounts(counts, min_count, groups);
}

Vocabulary Vocabulary::FromCounts(
    std::map<std::string, std::int64_t> const& counts, std::int64_t min_count,
    GroupCatalog const* groups) {
  if (min_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_count must be positive");
  }
  Vocabulary v;
  v.min_count_ = min_count;
  for (auto const& [type, freq] : counts) {
    if (freq < min_count) continue;
    VocabEntry e{type, freq, std::nullopt};
    if (groups != nullptr) e.group = groups->Find(type);
    v.entries_.push_back(std::move(e));
  }
  if (v.entries_.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary,
                "no type reaches min_count " + std::to_string(min_count));
  }
  SortCanonical(v.entries_);
  v.index_.reserve(v.entries_.size());
  for (std::size_t i = 0; i < v.entries_.size(); ++i) {
    v.index_.emplace(v.entries_[i].type, i);
    v.total_tokens_ += v.entries_[i].frequency;
  }
  return v;
}

std::optional<std::size_t> Vocabulary::Find(std::string_view type) const {
  auto it = index_.find(std::string(type));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int64_t Vocabulary::Frequency(std::string_view type) const {
  auto i = Find(type);
  return i ? entries_[*i].frequency : 0;
}

std::vector<std::string> Vocabulary::Types() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (auto const& e : entries_) out.push_back(e.type);
  return out;
}

Vocabulary Vocabulary::WithDecrement(std::string_view type,
                                     std::int64_t delta) const {
  auto i = Find(type);
  if (!i) {
    throw Error(ErrorCode::kNotFound,
                "type " + std::string(type) + " not in vocabulary");
  }
  if (delta < 0) {
    throw Error(ErrorCode::kInvalidArgument, "decrement must be non-negative");
  }
  Vocabulary v;
  v.min_count_ = min_count_;
  v.entries_ = entries_;
  v.entries_[*i].frequency -= delta;
  if (v.entries_[*i].frequency < min_count_) {
    v.entries_.erase(v.entries_.begin() + static_cast<std::ptrdiff_t>(*i));
  }
  if (v.entries_.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary,
                "decrementing " + std::string(type) + " empties the vocabulary");
  }
  SortCanonical(v.entries_);
  for (std::size_t k = 0; k < v.entries_.size(); ++k) {
    v.index_.emplace(v.entries_[k].type, k);
    v.total_tokens_ += v.entries_[k].frequency;
  }
  return v;
}

std::map<std::string, std::int64_t> CountTokens(Session const& session) {
  std::map<std::string, std::int64_t> counts;
  for (auto const& t : session.tokens) ++counts[t];
  return counts;
}

SessionCorpus OmitSession(SessionCorpus const& corpus, std::size_t position) {
  if (position >= corpus.size()) {
    throw Error(ErrorCode::kOutOfRange,
                "session " + std::to_string(position) + " of a corpus with " +
                    std::to_string(corpus.size()) + " sessions");
  }
  std::vector<Session> sessions;
  sessions.reserve(corpus.size() - 1);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i != position) sessions.push_back(corpus[i]);
  }
  return SessionCorpus(std::move(sessions),
                       corpus.source_label() + "#omit=" +
                           std::to_string(corpus[position].index));
}

void SyntheticSpec::Validate() const {
  auto fail = [](std::string const& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (n_groups < 1) fail("n_groups must be positive");
  if (products_per_group < 1) fail("products_per_group must be positive");
  if (n_sessions < 1) fail("n_sessions must be positive");
  if (!(zipf_exponent > 0.0) || !std::isfinite(zipf_exponent)) {
    fail("zipf_exponent must be positive");
  }
  if (!(mean_session_length >= 1.0) || !std::isfinite(mean_session_length)) {
    fail("mean_session_length must be at least 1");
  }
  if (!(within_group_bias >= 0.0 && within_group_bias <= 1.0)) {
    fail("within_group_bias must lie in [0, 1]");
  }
}

namespace {

// Inverse-CDF sampling over unnormalized cumulative weights.
class CumulativeSampler {
 public:
  explicit CumulativeSampler(std::vector<double> weights)
      : cumulative_(std::move(weights)) {
    std::partial_sum(cumulative_.begin(), cumulative_.end(),
                     cumulative_.begin());
  }

  std::size_t Draw(DeterministicRng& rng) const {
    double u = rng.NextUniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

SyntheticCorpus GenerateSynthetic(SyntheticSpec const& spec) {
  spec.Validate();
  auto const n_groups = static_cast<std::size_t>(spec.n_groups);
  auto const per_group = static_cast<std::size_t>(spec.products_per_group);
  std::size_t const n_products = n_groups * per_group;

  std::vector<double> rank_weight(n_products);
  for (std::size_t r = 0; r < n_products; ++r) {
    rank_weight[r] = std::pow(static_cast<double>(r + 1), -spec.zipf_exponent);
  }
  std::vector<std::string> ids(n_products);
  GroupCatalog groups;
  for (std::size_t r = 0; r < n_products; ++r) {
    auto g = r % n_groups;
    ids[r] = "g" + std::to_string(g) + "_p" + std::to_string(r / n_groups);
    groups.Add(ids[r], "g" + std::to_string(g));
  }
  CumulativeSampler global(rank_weight);
  std::vector<CumulativeSampler> in_group;
  in_group.reserve(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) {
    std::vector<double> w(per_group);
    for (std::size_t j = 0; j < per_group; ++j) {
      w[j] = rank_weight[g + j * n_groups];
    }
    in_group.emplace_back(std::move(w));
  }

  DeterministicRng rng(SubstreamSeed(spec.seed, "synthetic"));
  double const stop = 1.0 / spec.mean_session_length;
  std::vector<Session> sessions;
  sessions.reserve(static_cast<std::size_t>(spec.n_sessions));
  for (std::int64_t s = 0; s < spec.n_sessions; ++s) {
    std::size_t length = 1;
    while (rng.NextUniform() >= stop) ++length;
    Session session;
    session.index = static_cast<std::size_t>(s);
    session.tokens.reserve(length);
    std::size_t rank = global.Draw(rng);
    session.tokens.push_back(ids[rank]);
    for (std::size_t i = 1; i < length; ++i) {
      if (rng.NextUniform() < spec.within_group_bias) {
        auto g = rank % n_groups;
        rank = g + in_group[g].Draw(rng) * n_groups;
      } else {
        rank = global.Draw(rng);
      }
      session.tokens.push_back(ids[rank]);
    }
    sessions.push_back(std::move(session));
  }
  return {SessionCorpus(std::move(sessions), "synthetic:seed=" +
                                                 std::to_string(spec.seed)),
          std::move(groups)};
}

CorpusStats ComputeCorpusStats(SessionCorpus const& corpus,
                               Vocabulary const& vocab,
                               GroupCatalog const& groups) {
  CorpusStats stats;
  stats.n_sessions = corpus.size();
  stats.n_retained_types = vocab.size();
  std::set<std::string_view> distinct;
  double group_sum = 0.0;
  for (auto const& s : corpus.sessions()) {
    stats.n_tokens += s.tokens.size();
    std::set<std::string> session_groups;
    for (auto const& t : s.tokens) {
      distinct.insert(t);
      auto g = groups.Find(t);
      // Ungrouped tokens become their own pseudo-group; the prefix keeps
      // them from colliding with real labels.
      session_groups.insert(g ? "G:" + *g : "T:" + t);
    }
    group_sum += static_cast<double>(session_groups.size());
  }
  stats.n_distinct_types = distinct.size();
  if (stats.n_sessions > 0) {
    auto n = static_cast<double>(stats.n_sessions);
    stats.mean_session_length = static_cast<double>(stats.n_tokens) / n;
    stats.mean_groups_per_session = group_sum / n;
  }
  return stats;
}

}  // namespace embstab
