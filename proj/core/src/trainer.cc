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

#include "embstab/trainer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "embstab/error.h"

namespace embstab {
namespace {

constexpr int kExpTableSize = 1000;
constexpr double kMaxExp = 6.0;

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log σ(x) without overflow.
double LogSigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

class SigmoidTable {
 public:
  SigmoidTable() {
    for (int i = 0; i < kExpTableSize; ++i) {
      double e = std::exp((i / static_cast<double>(kExpTableSize) * 2 - 1) *
                          kMaxExp);
      table_[i] = e / (e + 1);
    }
  }
  double operator()(double x) const {
    auto slot = static_cast<int>((x + kMaxExp) * (kExpTableSize / kMaxExp / 2));
    return table_[std::clamp(slot, 0, kExpTableSize - 1)];
  }

 private:
  double table_[kExpTableSize];
};

SigmoidTable const& Table() {
  static SigmoidTable const table;
  return table;
}

// Element access policies. Racy access is used by concurrent workers: the
// updates still race (that is the point), but through relaxed atomics.
struct PlainAccess {
  static double Load(double const& x) { return x; }
  static void Store(double& x, double v) { x = v; }
};

struct RacyAccess {
  static double Load(double const& x) {
    return std::atomic_ref<double>(const_cast<double&>(x))
        .load(std::memory_order_relaxed);
  }
  static void Store(double& x, double v) {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  }
};

struct KernelContext {
  std::int32_t dims;
  bool table;
  int epoch;  // for divergence messages
};

template <typename Access>
double Dot(double const* a, double const* b, std::int32_t dims) {
  double s = 0.0;
  for (std::int32_t d = 0; d < dims; ++d) s += Access::Load(a[d]) * Access::Load(b[d]);
  return s;
}

[[noreturn]] void Diverged(int epoch) {
  throw Error(ErrorCode::kNumericDivergence,
              "non-finite activation in epoch " + std::to_string(epoch));
}

// One output-vector step: accumulates into `grad` and moves `out`.
// Returns false when the table mode skips the node.
template <typename Access>
void OutputStep(double* in, double* out, double label, double alpha,
                double* grad, KernelContext const& ctx, bool hs) {
  double dot = Dot<Access>(in, out, ctx.dims);
  if (!std::isfinite(dot)) Diverged(ctx.epoch);
  double g;
  if (ctx.table) {
    if (dot >= kMaxExp) {
      if (hs) return;
      g = (label - 1) * alpha;
    } else if (dot <= -kMaxExp) {
      if (hs) return;
      g = label * alpha;
    } else {
      g = (label - Table()(dot)) * alpha;
    }
  } else {
    g = (label - Sigmoid(dot)) * alpha;
  }
  for (std::int32_t d = 0; d < ctx.dims; ++d) {
    grad[d] += g * Access::Load(out[d]);
  }
  for (std::int32_t d = 0; d < ctx.dims; ++d) {
    Access::Store(out[d], Access::Load(out[d]) + g * Access::Load(in[d]));
  }
}

template <typename Access>
void ApplyGrad(double* in, double const* grad, std::int32_t dims) {
  for (std::int32_t d = 0; d < dims; ++d) {
    Access::Store(in[d], Access::Load(in[d]) + grad[d]);
  }
}

template <typename Access>
void HsPair(double* in, double* output, std::string const& code,
            std::vector<std::int32_t> const& points, double alpha,
            double* grad, KernelContext const& ctx) {
  std::fill(grad, grad + ctx.dims, 0.0);
  for (std::size_t j = 0; j < code.size(); ++j) {
    double* out = output + static_cast<std::size_t>(points[j]) * ctx.dims;
    OutputStep<Access>(in, out, code[j] == '0' ? 1.0 : 0.0, alpha, grad, ctx,
                       true);
  }
  ApplyGrad<Access>(in, grad, ctx.dims);
}

template <typename Access>
void NegPair(double* in, double* output, std::size_t target,
             std::span<std::size_t const> noise, double alpha, double* grad,
             KernelContext const& ctx) {
  std::fill(grad, grad + ctx.dims, 0.0);
  OutputStep<Access>(in, output + target * ctx.dims, 1.0, alpha, grad, ctx,
                     false);
  for (auto n : noise) {
    OutputStep<Access>(in, output + n * ctx.dims, 0.0, alpha, grad, ctx, false);
  }
  ApplyGrad<Access>(in, grad, ctx.dims);
}

constexpr std::int32_t kUnknown = -1;

std::vector<std::vector<std::int32_t>> MapSessions(SessionCorpus const& corpus,
                                                   Vocabulary const& vocab) {
  std::vector<std::vector<std::int32_t>> mapped;
  mapped.reserve(corpus.size());
  for (auto const& s : corpus.sessions()) {
    std::vector<std::int32_t> ids;
    ids.reserve(s.tokens.size());
    for (auto const& t : s.tokens) {
      auto i = vocab.Find(t);
      ids.push_back(i ? static_cast<std::int32_t>(*i) : kUnknown);
    }
    mapped.push_back(std::move(ids));
  }
  return mapped;
}

// Shared, read-only inputs of a training run plus the mutable model.
struct Job {
  std::vector<std::vector<std::int32_t>> const* sessions;
  Vocabulary const* vocab;
  TrainConfig const* config;
  HuffmanCoding const* coding;
  NoiseDistribution const* noise;
  EmbeddingModel* model;
  std::vector<double> keep_probability;
  std::atomic<std::int64_t> processed{0};
  PairObserver const* observer;
};

template <typename Access>
void RunWorker(Job& job, std::size_t worker, std::size_t begin,
               std::size_t end) {
  auto const& cfg = *job.config;
  auto const dims = cfg.dims;
  auto const seed = cfg.seed + worker;
  DeterministicRng subsample_rng(SubstreamSeed(seed, "subsample"));
  DeterministicRng window_rng(SubstreamSeed(seed, "window"));
  DeterministicRng noise_rng(SubstreamSeed(seed, "noise"));
  std::vector<double> grad(static_cast<std::size_t>(dims));
  std::vector<std::int32_t> sentence;
  std::vector<std::size_t> noise(static_cast<std::size_t>(cfg.negatives));
  double* input = job.model->input_data().data();
  double* output = job.model->output_data().data();
  bool const hs = cfg.mode == TrainMode::kHierarchicalSoftmax;
  auto const vocab_size = job.vocab->size();
  double const budget =
      static_cast<double>(cfg.iterations) *
          static_cast<double>(job.vocab->total_tokens()) + 1.0;
  double const alpha_min = cfg.EffectiveAlphaMin();

  for (int epoch = 0; epoch < cfg.iterations; ++epoch) {
    KernelContext ctx{dims, cfg.sigmoid_table, epoch};
    for (std::size_t s = begin; s < end; ++s) {
      auto const& raw = (*job.sessions)[s];
      sentence.clear();
      std::int64_t retained = 0;
      for (auto id : raw) {
        if (id == kUnknown) {
          sentence.push_back(kUnknown);
          continue;
        }
        ++retained;
        if (cfg.subsample > 0 &&
            job.keep_probability[static_cast<std::size_t>(id)] <
                subsample_rng.NextUniform()) {
          continue;
        }
        sentence.push_back(id);
      }
      auto done = job.processed.fetch_add(retained, std::memory_order_relaxed);
      double alpha = std::max(
          alpha_min, cfg.alpha0 * (1.0 - static_cast<double>(done) / budget));

      auto const n = static_cast<std::ptrdiff_t>(sentence.size());
      for (std::ptrdiff_t p = 0; p < n; ++p) {
        auto center = sentence[static_cast<std::size_t>(p)];
        if (center == kUnknown) continue;
        std::ptrdiff_t w = cfg.window;
        if (!cfg.fixed_window) {
          w = 1 + static_cast<std::ptrdiff_t>(window_rng.NextBelow(
                      static_cast<std::uint64_t>(cfg.window)));
        }
        double* in = input + static_cast<std::size_t>(center) * dims;
        for (std::ptrdiff_t c = p - w; c <= p + w; ++c) {
          if (c == p || c < 0 || c >= n) continue;
          auto context = sentence[static_cast<std::size_t>(c)];
          if (context == kUnknown) continue;
          if (job.observer != nullptr && *job.observer) {
            (*job.observer)(static_cast<std::size_t>(center),
                            static_cast<std::size_t>(context));
          }
          auto ctx_index = static_cast<std::size_t>(context);
          if (hs) {
            HsPair<Access>(in, output, job.coding->code(ctx_index),
                           job.coding->points(ctx_index), alpha, grad.data(),
                           ctx);
          } else {
            std::size_t z = 0;
            if (vocab_size > 1) {
              for (; z < noise.size(); ++z) {
                std::size_t draw;
                do {
                  draw = job.noise->Draw(noise_rng);
                } while (draw == ctx_index);
                noise[z] = draw;
              }
            }
            NegPair<Access>(in, output, ctx_index,
                            std::span<std::size_t const>(noise.data(), z),
                            alpha, grad.data(), ctx);
          }
        }
      }
    }
  }
}

}  // namespace

std::string ToString(TrainMode mode) {
  return mode == TrainMode::kHierarchicalSoftmax ? "hs" : "neg";
}

void TrainConfig::Validate() const {
  auto fail = [](std::string const& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (dims < 1) fail("dims must be at least 1");
  if (window < 1) fail("window must be at least 1");
  if (iterations < 0) fail("iterations must be non-negative");
  if (min_count < 1) fail("min_count must be positive");
  if (!(subsample >= 0.0)) fail("subsample must be non-negative");
  if (mode == TrainMode::kNegativeSampling && negatives < 1) {
    fail("negative sampling needs at least one noise sample");
  }
  if (!std::isfinite(noise_exponent)) fail("noise exponent must be finite");
  if (!(alpha0 > 0.0)) fail("alpha0 must be positive");
  if (EffectiveAlphaMin() < 0.0) fail("alpha_min must be non-negative");
  if (workers < 1) fail("workers must be at least 1");
  if (round_digits < 0 || round_digits > 12) {
    fail("round_digits must lie in [0, 12]");
  }
}

EmbeddingModel::EmbeddingModel(std::vector<std::string> types,
                               std::int32_t dims, std::size_t n_output)
    : types_(std::move(types)),
      dims_(dims),
      n_output_(n_output),
      input_(types_.size() * static_cast<std::size_t>(dims), 0.0),
      output_(n_output * static_cast<std::size_t>(dims), 0.0) {
  if (dims < 1) throw Error(ErrorCode::kInvalidArgument, "dims must be >= 1");
  index_.reserve(types_.size());
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (!index_.emplace(types_[i], i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate type " + types_[i]);
    }
  }
}

std::optional<std::size_t> EmbeddingModel::Find(std::string_view type) const {
  auto it = index_.find(std::string(type));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingModel::IndexOf(std::string_view type) const {
  auto i = Find(type);
  if (!i) {
    throw Error(ErrorCode::kNotFound,
                "type " + std::string(type) + " not in model");
  }
  return *i;
}

bool EmbeddingModel::AllFinite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(input_.begin(), input_.end(), finite) &&
         std::all_of(output_.begin(), output_.end(), finite);
}

NoiseDistribution::NoiseDistribution(Vocabulary const& vocab, double exponent) {
  if (vocab.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary, "noise distribution needs types");
  }
  std::vector<double> weight(vocab.size());
  double total = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    weight[i] = std::pow(static_cast<double>(vocab[i].frequency), exponent);
    total += weight[i];
  }
  upper_.resize(vocab.size());
  double cumulative = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    cumulative += weight[i];
    auto bound =
        static_cast<std::int64_t>(cumulative / total * static_cast<double>(kSlots));
    upper_[i] = std::min(bound, kSlots);
  }
  upper_.back() = kSlots;
}

std::size_t NoiseDistribution::Draw(DeterministicRng& rng) const {
  auto slot = static_cast<std::int64_t>(
      rng.NextBelow(static_cast<std::uint64_t>(kSlots)));
  auto it = std::upper_bound(upper_.begin(), upper_.end(), slot);
  return static_cast<std::size_t>(it - upper_.begin());
}

double NoiseDistribution::Probability(std::size_t type) const {
  std::int64_t lower = type == 0 ? 0 : upper_[type - 1];
  return static_cast<double>(upper_[type] - lower) / static_cast<double>(kSlots);
}

std::string NoiseSample(Vocabulary const& vocab, NoiseDistribution const& noise,
                        DeterministicRng& rng) {
  return vocab[noise.Draw(rng)].type;
}

double SubsampleKeepProbability(double threshold, double share) {
  if (threshold <= 0.0) return 1.0;
  double ratio = threshold / share;
  return std::clamp(std::sqrt(ratio) + ratio, 0.0, 1.0);
}

EmbeddingModel InitializeModel(Vocabulary const& vocab,
                               TrainConfig const& config) {
  config.Validate();
  if (vocab.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary, "cannot train on no types");
  }
  std::optional<HuffmanCoding> coding;
  std::size_t n_output = vocab.size();
  if (config.mode == TrainMode::kHierarchicalSoftmax) {
    if (config.fixed_coding) {
      if (config.fixed_coding->types() != vocab.Types()) {
        auto restricted = config.fixed_coding->Restrict(vocab);
        if (restricted.size() != config.fixed_coding->size()) {
          throw Error(ErrorCode::kMismatch,
                      "fixed coding covers " +
                          std::to_string(config.fixed_coding->size()) +
                          " types, vocabulary has " +
                          std::to_string(vocab.size()));
        }
        coding = std::move(restricted);
      } else {
        coding = *config.fixed_coding;
      }
    } else {
      coding = HuffmanCoding::Build(vocab);
    }
    n_output = coding->n_internal();
  }
  EmbeddingModel model(vocab.Types(), config.dims, n_output);
  auto const init_seed = SubstreamSeed(config.seed, "init");
  double const scale = 1.0 / config.dims;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    DeterministicRng rng(Mix64(init_seed ^ Fnv1a64(vocab[i].type)));
    for (auto& v : model.input(i)) v = (rng.NextUniform() - 0.5) * scale;
  }
  model.set_config(config);
  model.set_coding(std::move(coding));
  return model;
}

EmbeddingModel Train(SessionCorpus const& corpus, Vocabulary const& vocab,
                     TrainConfig const& config, PairObserver observer) {
  auto model = InitializeModel(vocab, config);
  auto sessions = MapSessions(corpus, vocab);

  std::optional<NoiseDistribution> noise;
  if (config.mode == TrainMode::kNegativeSampling) {
    noise.emplace(vocab, config.noise_exponent);
  }
  Job job;
  job.sessions = &sessions;
  job.vocab = &vocab;
  job.config = &config;
  job.coding = model.coding() ? &*model.coding() : nullptr;
  job.noise = noise ? &*noise : nullptr;
  job.model = &model;
  job.observer = config.workers == 1 ? &observer : nullptr;
  if (config.subsample > 0) {
    job.keep_probability.resize(vocab.size());
    auto total = static_cast<double>(vocab.total_tokens());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      job.keep_probability[i] = SubsampleKeepProbability(
          config.subsample, static_cast<double>(vocab[i].frequency) / total);
    }
  }

  if (config.workers == 1) {
    RunWorker<PlainAccess>(job, 0, 0, sessions.size());
  } else {
    auto const workers = static_cast<std::size_t>(config.workers);
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      auto begin = sessions.size() * w / workers;
      auto end = sessions.size() * (w + 1) / workers;
      threads.emplace_back([&job, &errors, w, begin, end] {
        try {
          RunWorker<RacyAccess>(job, w, begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  if (!model.AllFinite()) {
    throw Error(ErrorCode::kNumericDivergence,
                "non-finite vector after the final epoch");
  }
  return model;
}

double HsProbability(EmbeddingModel const& model, HuffmanCoding const& coding,
                     std::string_view center, std::string_view target) {
  auto c = model.IndexOf(center);
  auto t = coding.Find(target);
  if (!t) {
    throw Error(ErrorCode::kNotFound,
                "type " + std::string(target) + " not in coding");
  }
  auto in = model.input(c);
  auto const& code = coding.code(*t);
  auto const& points = coding.points(*t);
  double p = 1.0;
  for (std::size_t j = 0; j < code.size(); ++j) {
    auto out = model.output(static_cast<std::size_t>(points[j]));
    double dot = Dot<PlainAccess>(in.data(), out.data(), model.dims());
    p *= Sigmoid(code[j] == '0' ? dot : -dot);
  }
  return p;
}

double PairLoss(EmbeddingModel const& model, std::string_view center,
                std::string_view target, std::span<std::string const> noise) {
  auto c = model.IndexOf(center);
  auto in = model.input(c);
  if (model.config().mode == TrainMode::kHierarchicalSoftmax) {
    if (!model.coding()) {
      throw Error(ErrorCode::kInvalidArgument, "HS model without a coding");
    }
    auto const& coding = *model.coding();
    auto t = coding.Find(target);
    if (!t) {
      throw Error(ErrorCode::kNotFound,
                  "type " + std::string(target) + " not in coding");
    }
    double loss = 0.0;
    auto const& code = coding.code(*t);
    for (std::size_t j = 0; j < code.size(); ++j) {
      auto out = model.output(static_cast<std::size_t>(coding.points(*t)[j]));
      double dot = Dot<PlainAccess>(in.data(), out.data(), model.dims());
      loss -= LogSigmoid(code[j] == '0' ? dot : -dot);
    }
    return loss;
  }
  auto t = model.IndexOf(target);
  double loss = -LogSigmoid(
      Dot<PlainAccess>(in.data(), model.output(t).data(), model.dims()));
  for (auto const& n : noise) {
    auto out = model.output(model.IndexOf(n));
    loss -= LogSigmoid(-Dot<PlainAccess>(in.data(), out.data(), model.dims()));
  }
  return loss;
}

void ApplyPairUpdate(EmbeddingModel& model, std::size_t center,
                     std::size_t target, std::span<std::size_t const> noise,
                     double alpha) {
  auto const& cfg = model.config();
  if (center >= model.size() || target >= model.size()) {
    throw Error(ErrorCode::kOutOfRange, "pair index outside the vocabulary");
  }
  KernelContext ctx{model.dims(), cfg.sigmoid_table, 0};
  std::vector<double> grad(static_cast<std::size_t>(model.dims()));
  double* in = model.input(center).data();
  if (cfg.mode == TrainMode::kHierarchicalSoftmax) {
    auto const& coding = *model.coding();
    auto t = coding.Find(model.type(target));
    HsPair<PlainAccess>(in, model.output_data().data(), coding.code(*t),
                        coding.points(*t), alpha, grad.data(), ctx);
  } else {
    NegPair<PlainAccess>(in, model.output_data().data(), target, noise, alpha,
                         grad.data(), ctx);
  }
}

}  // namespace embstab
