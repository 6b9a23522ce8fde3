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

#ifndef EMBSTAB_RNG_H_
#define EMBSTAB_RNG_H_

#include <cstdint>
#include <string_view>

namespace embstab {

/// The linear congruential generator of the reference word2vec trainer:
/// `state = state * 25214903917 + 11 (mod 2^64)`. Every random decision in
/// the library is drawn from one of these, so a run is reproducible from its
/// seeds alone.
class DeterministicRng {
 public:
  static constexpr std::uint64_t kMultiplier = 25214903917ULL;
  static constexpr std::uint64_t kIncrement = 11ULL;

  explicit DeterministicRng(std::uint64_t seed = 0) : state_(seed) {}

  /// Advances the state and returns it.
  std::uint64_t Next() {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }

  /// Uniform in [0, 1) from the top 53 bits; the low bits of an LCG have
  /// short periods.
  double NextUniform() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). `bound` must be positive. Drops the 16
  /// lowest bits; the remaining 48 keep the modulo bias below bound / 2^48,
  /// which matters for the 1e8-slot noise table.
  std::uint64_t NextBelow(std::uint64_t bound) { return (Next() >> 16) % bound; }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// SplitMix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a.
constexpr std::uint64_t Fnv1a64(std::string_view bytes,
                                std::uint64_t hash = 0xCBF29CE484222325ULL) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

/// Seed of the sub-stream named `tag` under `seed`. Distinct tags give
/// streams that do not shift each other when one of them is unused.
constexpr std::uint64_t SubstreamSeed(std::uint64_t seed, std::string_view tag) {
  return Mix64(seed ^ Fnv1a64(tag));
}

}  // namespace embstab

#endif  // EMBSTAB_RNG_H_
