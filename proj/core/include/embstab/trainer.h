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

#ifndef EMBSTAB_TRAINER_H_
#define EMBSTAB_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embstab/corpus.h"
#include "embstab/huffman.h"
#include "embstab/rng.h"

namespace embstab {

enum class TrainMode { kHierarchicalSoftmax, kNegativeSampling };

std::string ToString(TrainMode mode);

struct TrainConfig {
  TrainMode mode = TrainMode::kHierarchicalSoftmax;
  std::int32_t dims = 100;
  std::int32_t window = 5;
  /// Use exactly `window` context positions on each side instead of a
  /// uniformly drawn 1..window per center token.
  bool fixed_window = false;
  /// Passes over the corpus; 0 leaves the model at its initialization.
  std::int32_t iterations = 10;
  std::int64_t min_count = 5;
  /// Subsampling threshold t; 0 disables subsampling.
  double subsample = 0.0;
  std::int32_t negatives = 5;
  double noise_exponent = 0.75;
  double alpha0 = 0.025;
  /// Learning-rate floor; defaults to 1e-4 * alpha0.
  std::optional<double> alpha_min;
  std::uint64_t seed = 1;
  std::int32_t workers = 1;
  std::int32_t round_digits = 4;
  /// HS only: use this coding verbatim instead of building one.
  std::optional<HuffmanCoding> fixed_coding;
  /// Quantized sigmoid of the reference trainer (1000 slots over [-6, 6]).
  bool sigmoid_table = false;

  double EffectiveAlphaMin() const { return alpha_min.value_or(1e-4 * alpha0); }
  /// Throws `kInvalidArgument` for out-of-range settings.
  void Validate() const;
};

/// Trained (or initialized) embedding. Input vectors are per type in
/// vocabulary canonical order; output vectors are per internal Huffman node
/// (HS) or per type (NEG). All storage is row-major double.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(std::vector<std::string> types, std::int32_t dims,
                 std::size_t n_output);

  std::vector<std::string> const& types() const { return types_; }
  std::string const& type(std::size_t i) const { return types_[i]; }
  std::size_t size() const { return types_.size(); }
  std::int32_t dims() const { return dims_; }
  std::size_t n_output() const { return n_output_; }
  std::optional<std::size_t> Find(std::string_view type) const;
  /// Like `Find` but throws `kNotFound`.
  std::size_t IndexOf(std::string_view type) const;

  std::span<double> input(std::size_t i) {
    return {input_.data() + i * static_cast<std::size_t>(dims_),
            static_cast<std::size_t>(dims_)};
  }
  std::span<double const> input(std::size_t i) const {
    return {input_.data() + i * static_cast<std::size_t>(dims_),
            static_cast<std::size_t>(dims_)};
  }
  std::span<double> output(std::size_t j) {
    return {output_.data() + j * static_cast<std::size_t>(dims_),
            static_cast<std::size_t>(dims_)};
  }
  std::span<double const> output(std::size_t j) const {
    return {output_.data() + j * static_cast<std::size_t>(dims_),
            static_cast<std::size_t>(dims_)};
  }
  std::vector<double>& input_data() { return input_; }
  std::vector<double> const& input_data() const { return input_; }
  std::vector<double>& output_data() { return output_; }
  std::vector<double> const& output_data() const { return output_; }

  TrainConfig const& config() const { return config_; }
  void set_config(TrainConfig config) { config_ = std::move(config); }
  /// The coding used in HS mode.
  std::optional<HuffmanCoding> const& coding() const { return coding_; }
  void set_coding(std::optional<HuffmanCoding> coding) {
    coding_ = std::move(coding);
  }

  /// True if every stored value is finite.
  bool AllFinite() const;

 private:
  std::vector<std::string> types_;
  std::unordered_map<std::string, std::size_t> index_;
  std::int32_t dims_ = 0;
  std::size_t n_output_ = 0;
  std::vector<double> input_;
  std::vector<double> output_;
  TrainConfig config_;
  std::optional<HuffmanCoding> coding_;
};

/// Smoothed-unigram noise distribution D(t) ∝ frequency(t)^exponent,
/// quantized to a cumulative table of 10^8 slots. Only the slot boundaries
/// are stored; a draw is a uniform slot followed by a binary search.
class NoiseDistribution {
 public:
  static constexpr std::int64_t kSlots = 100'000'000;

  NoiseDistribution(Vocabulary const& vocab, double exponent);

  std::size_t Draw(DeterministicRng& rng) const;
  /// Probability implied by the slot table.
  double Probability(std::size_t type) const;
  std::size_t size() const { return upper_.size(); }

 private:
  std::vector<std::int64_t> upper_;
};

/// `vocab` entry drawn from `noise`.
std::string NoiseSample(Vocabulary const& vocab, NoiseDistribution const& noise,
                        DeterministicRng& rng);

/// Receives every trained (center, context) pair, as vocabulary indices, in
/// training order. Single-worker training only.
using PairObserver = std::function<void(std::size_t center, std::size_t context)>;

/// Skip-gram training. With `workers == 1` the result is a pure function of
/// (corpus, vocab, config). With more workers, each worker owns a contiguous
/// range of sessions and all of them update the shared vectors without
/// locking, so the result depends on thread timing.
///
/// Random streams, each derived from `seed` and a fixed tag so disabling one
/// step never shifts another: per-type initialization (keyed by type id),
/// subsampling, window sizes, noise draws.
///
/// Throws `kMismatch` if `fixed_coding` does not cover exactly the
/// vocabulary and `kNumericDivergence` (naming the epoch) on NaN/Inf.
EmbeddingModel Train(SessionCorpus const& corpus, Vocabulary const& vocab,
                     TrainConfig const& config, PairObserver observer = {});

/// The model `Train` starts from: input vectors uniform in
/// [-0.5/dims, 0.5/dims), output vectors zero.
EmbeddingModel InitializeModel(Vocabulary const& vocab, TrainConfig const& config);

/// Probability that the leaf `target` is reached from `center` under HS:
/// Π over path nodes q with bit b of σ((1 - 2b)·⟨v_center, v'_q⟩).
double HsProbability(EmbeddingModel const& model, HuffmanCoding const& coding,
                     std::string_view center, std::string_view target);

/// Negative log-likelihood of one training pair. HS: -log HsProbability
/// (using the model's coding). NEG: -log σ(⟨v_c, v'_t⟩) - Σ log σ(-⟨v_c, v'_n⟩)
/// over `noise`.
double PairLoss(EmbeddingModel const& model, std::string_view center,
                std::string_view target,
                std::span<std::string const> noise = {});

/// One stochastic-gradient step on the pair, exactly as `Train` applies it:
/// output vectors move by -alpha·∂loss/∂v' and the center's input vector by
/// -alpha·∂loss/∂v afterwards.
void ApplyPairUpdate(EmbeddingModel& model, std::size_t center,
                     std::size_t target, std::span<std::size_t const> noise,
                     double alpha);

/// Probability that the subsampler keeps a token whose type has corpus
/// share `share`: sqrt(t/share) + t/share, clamped to [0, 1].
double SubsampleKeepProbability(double threshold, double share);

}  // namespace embstab

#endif  // EMBSTAB_TRAINER_H_
