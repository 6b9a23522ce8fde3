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

#include "cli.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "embstab/corpus.h"
#include "embstab/error.h"
#include "embstab/huffman.h"
#include "embstab/loo.h"
#include "embstab/loo_io.h"
#include "embstab/metrics.h"
#include "embstab/model_io.h"
#include "embstab/rng.h"
#include "embstab/trainer.h"

namespace embstab::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string Fixed3(double v) { return FormatFixed(v, 3); }

// Flags shared by `train` and `loo`, spelled like the reference trainer.
struct TrainerFlags {
  int size = 100;
  int window = 5;
  double sample = 0.0;
  std::int64_t min_count = 5;
  int cbow = 0;
  int hs = 0;
  int negative = 5;
  int iter = 10;
  int threads = 1;
  std::uint64_t seed = 1;
  double alpha = 0.025;
  int fixed_window = 0;
  int round_digits = 4;
  int sigmoid_table = 0;

  void Register(CLI::App* app, bool with_mode) {
    app->add_option("--size", size, "Vector dimensionality")->capture_default_str();
    app->add_option("--window", window, "Maximum context offset")->capture_default_str();
    app->add_option("--sample", sample, "Subsampling threshold (0 disables)")
        ->capture_default_str();
    app->add_option("--min-count", min_count, "Discard rarer types")
        ->capture_default_str();
    app->add_option("--iter", iter, "Training epochs")->capture_default_str();
    app->add_option("--threads", threads, "Training workers")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--alpha", alpha, "Initial learning rate")->capture_default_str();
    app->add_option("--fixed-window", fixed_window,
                    "1 uses exactly --window context positions")
        ->capture_default_str();
    app->add_option("--round-digits", round_digits, "Stored precision")
        ->capture_default_str();
    app->add_option("--sigmoid-table", sigmoid_table,
                    "1 uses the quantized sigmoid table")
        ->capture_default_str();
    if (with_mode) {
      app->add_option("--cbow", cbow, "Only 0 (skip-gram) is supported")
          ->capture_default_str();
      app->add_option("--hs", hs, "1 trains hierarchical softmax")
          ->capture_default_str();
    }
    app->add_option("--negative", negative, "Noise samples per pair")
        ->capture_default_str();
  }

  TrainConfig Base() const {
    TrainConfig c;
    c.dims = size;
    c.window = window;
    c.fixed_window = fixed_window != 0;
    c.iterations = iter;
    c.min_count = min_count;
    c.subsample = sample;
    c.alpha0 = alpha;
    c.seed = seed;
    c.workers = threads;
    c.round_digits = round_digits;
    c.sigmoid_table = sigmoid_table != 0;
    c.negatives = negative > 0 ? negative : 5;
    return c;
  }

  TrainConfig Resolve() const {
    if (cbow != 0) throw UsageError("unsupported mode: only skip-gram (--cbow 0)");
    if (hs != 0 && hs != 1) throw UsageError("--hs must be 0 or 1");
    if (hs == 1 && negative > 0) {
      throw UsageError("--hs 1 conflicts with --negative " +
                       std::to_string(negative) + "; pass --negative 0");
    }
    if (hs == 0 && negative <= 0) {
      throw UsageError("no objective: pass --hs 1 or --negative > 0");
    }
    auto c = Base();
    c.mode = hs == 1 ? TrainMode::kHierarchicalSoftmax : TrainMode::kNegativeSampling;
    c.Validate();
    return c;
  }
};

Json ConfigEcho(TrainConfig const& c) {
  Json j;
  j["mode"] = ToString(c.mode);
  j["dims"] = c.dims;
  j["window"] = c.window;
  j["fixed_window"] = c.fixed_window;
  j["iterations"] = c.iterations;
  j["min_count"] = c.min_count;
  j["subsample"] = c.subsample;
  j["negatives"] = c.negatives;
  j["noise_exponent"] = c.noise_exponent;
  j["alpha0"] = c.alpha0;
  j["alpha_min"] = c.EffectiveAlphaMin();
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["round_digits"] = c.round_digits;
  j["sigmoid_table"] = c.sigmoid_table;
  return j;
}

void Progress(bool quiet, std::ostream& err, std::string const& msg) {
  if (!quiet) err << msg << '\n';
}

std::size_t DefaultParallel() {
  if (auto const* env = std::getenv("EMBSTAB_THREADS")) {
    try {
      auto v = std::stoul(env);
      if (v >= 1) return v;
    } catch (std::exception const&) {
    }
    throw UsageError(std::string("EMBSTAB_THREADS must be a positive integer, got ") +
                     env);
  }
  return 1;
}

// ---- gen ------------------------------------------------------------------

struct GenCommand {
  SyntheticSpec spec;
  std::string output_dir = ".";
  std::string corpus_name = "corpus.txt";
  std::string groups_name = "groups.tsv";

  void Register(CLI::App* app) {
    app->add_option("--groups", spec.n_groups, "Product groups")->capture_default_str();
    app->add_option("--products-per-group", spec.products_per_group)
        ->capture_default_str();
    app->add_option("--zipf", spec.zipf_exponent, "Popularity exponent")
        ->capture_default_str();
    app->add_option("--sessions", spec.n_sessions)->capture_default_str();
    app->add_option("--mean-length", spec.mean_session_length)->capture_default_str();
    app->add_option("--bias", spec.within_group_bias,
                    "Probability a click stays in the current group")
        ->capture_default_str();
    app->add_option("--seed", spec.seed)->capture_default_str();
    app->add_option("--output-dir,-o", output_dir)->capture_default_str();
    app->add_option("--corpus-name", corpus_name)->capture_default_str();
    app->add_option("--groups-name", groups_name)->capture_default_str();
    app->set_config("--config", "", "key=value file of generator settings");
  }

  int Run(std::ostream& out) {
    spec.Validate();
    auto synthetic = GenerateSynthetic(spec);
    fs::create_directories(output_dir);
    auto corpus_path = fs::path(output_dir) / corpus_name;
    auto groups_path = fs::path(output_dir) / groups_name;
    WriteFileAtomic(corpus_path, SerializeCorpus(synthetic.corpus));
    WriteFileAtomic(groups_path, SerializeGroups(synthetic.groups));
    Json j;
    j["groups"] = spec.n_groups;
    j["products_per_group"] = spec.products_per_group;
    j["zipf"] = spec.zipf_exponent;
    j["sessions"] = spec.n_sessions;
    j["mean_length"] = spec.mean_session_length;
    j["bias"] = spec.within_group_bias;
    j["seed"] = spec.seed;
    WriteFileAtomic(fs::path(output_dir) / kConfigJson, j.dump(2) + "\n");
    out << corpus_path.string() << '\n' << groups_path.string() << '\n';
    return kExitOk;
  }
};

// ---- train ----------------------------------------------------------------

struct TrainCommand {
  TrainerFlags flags;
  std::string train;
  std::string output;
  std::string fixed_tree;
  bool quiet = false;

  void Register(CLI::App* app) {
    flags.Register(app, true);
    app->add_option("--train", train, "Corpus file")->required();
    app->add_option("--output", output, "Input-vector file to write")->required();
    app->add_option("--fixed-tree", fixed_tree,
                    "Coding dump to use instead of building one (HS)");
    app->add_flag("--quiet,-q", quiet);
  }

  int Run(std::ostream& out, std::ostream& err) {
    auto config = flags.Resolve();
    if (!fixed_tree.empty()) {
      if (config.mode != TrainMode::kHierarchicalSoftmax) {
        throw UsageError("--fixed-tree requires --hs 1");
      }
      config.fixed_coding = LoadCodingFile(fixed_tree);
    }
    auto corpus = LoadCorpusFile(train);
    auto vocab = Vocabulary::Build(corpus, config.min_count);
    Progress(quiet, err,
             "training " + ToString(config.mode) + " on " +
                 std::to_string(corpus.size()) + " sessions, " +
                 std::to_string(vocab.size()) + " types");
    auto model = Train(corpus, vocab, config);
    SaveModel(model, output);
    fs::path out_path(output);
    if (model.coding()) {
      WriteFileAtomic(out_path.string() + ".coding", SerializeCoding(*model.coding()));
    }
    Json echo;
    echo["train"] = train;
    echo["output"] = output;
    echo["config"] = ConfigEcho(config);
    if (!fixed_tree.empty()) echo["fixed_tree"] = fixed_tree;
    WriteFileAtomic(out_path.string() + ".config.json", echo.dump(2) + "\n");
    out << output << '\n';
    return kExitOk;
  }
};

// ---- compare --------------------------------------------------------------

struct CompareCommand {
  std::string model_a;
  std::string model_b;
  std::size_t k = 15;
  std::string seeds_file;
  std::size_t pool = 10000;
  std::size_t sample = 5000;
  std::uint64_t sample_seed = 1;
  std::size_t threads = 1;
  std::string output_dir;

  void Register(CLI::App* app) {
    app->add_option("model_a", model_a)->required();
    app->add_option("model_b", model_b)->required();
    app->add_option("--k", k, "Neighbors per seed")->capture_default_str();
    app->add_option("--seeds-file", seeds_file, "One seed id per line");
    app->add_option("--pool", pool, "Sample seeds from the most frequent types")
        ->capture_default_str();
    app->add_option("--sample", sample, "Number of sampled seeds")
        ->capture_default_str();
    app->add_option("--sample-seed", sample_seed)->capture_default_str();
    app->add_option("--threads", threads)->capture_default_str();
    app->add_option("--output-dir,-o", output_dir, "Where overlap.csv/json go");
  }

  int Run(std::ostream& out) {
    auto a = LoadModel(model_a);
    auto b = LoadModel(model_b);
    auto smaller = std::min(a.size(), b.size());
    if (k < 1 || k + 1 > smaller) {
      throw UsageError("--k " + std::to_string(k) + " needs at least " +
                       std::to_string(k + 1) + " types per model");
    }
    std::vector<std::string> seeds;
    std::size_t used_pool = 0;
    if (!seeds_file.empty()) {
      auto text = ReadFileToString(seeds_file);
      std::size_t pos = 0;
      while (pos < text.size()) {
        auto end = std::min(text.find('\n', pos), text.size());
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
          line.pop_back();
        }
        if (!line.empty()) seeds.push_back(line);
      }
    } else {
      auto clamped_pool = std::min(pool, a.size());
      auto s = SampleSeeds(a.types(), pool, std::min(sample, clamped_pool), sample_seed);
      seeds = s.seeds;
      used_pool = s.pool_size;
    }
    auto report = OverlapAtK(a, b, seeds, k, threads);
    out << Fixed3(report.mean) << " ± " << Fixed3(report.sd) << '\n';
    if (!output_dir.empty()) {
      fs::create_directories(output_dir);
      std::string csv = "seed,overlap\n";
      for (std::size_t i = 0; i < report.seeds.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", report.per_seed_overlap[i]);
        csv += report.seeds[i] + "," + buf + "\n";
      }
      WriteFileAtomic(fs::path(output_dir) / "overlap.csv", csv);
      Json j;
      j["model_a"] = model_a;
      j["model_b"] = model_b;
      j["k"] = k;
      j["seeds"] = report.seeds.size();
      j["seed_pool"] = used_pool;
      j["sample_seed"] = sample_seed;
      j["mean"] = report.mean;
      j["sd"] = report.sd;
      WriteFileAtomic(fs::path(output_dir) / "overlap.json", j.dump(2) + "\n");
      WriteFileAtomic(fs::path(output_dir) / kConfigJson, j.dump(2) + "\n");
    }
    return kExitOk;
  }
};

// ---- cluster --------------------------------------------------------------

struct ClusterCommand {
  std::string model_path;
  std::string groups_path;
  DbscanParams params;
  double density_radius = 0.8;
  std::size_t density_cap = 200;
  std::size_t threads = 1;
  std::string output_dir;

  void Register(CLI::App* app) {
    app->add_option("model", model_path)->required();
    app->add_option("--groups", groups_path, "Product group TSV for purity");
    app->add_option("--eps", params.eps_similarity, "Neighbor similarity threshold")
        ->capture_default_str();
    app->add_option("--min-neighbors", params.min_neighbors)->capture_default_str();
    app->add_option("--density-radius", density_radius)->capture_default_str();
    app->add_option("--density-cap", density_cap)->capture_default_str();
    app->add_option("--threads", threads)->capture_default_str();
    app->add_option("--output-dir,-o", output_dir);
  }

  int Run(std::ostream& out) {
    auto model = LoadModel(model_path);
    std::optional<GroupCatalog> groups;
    if (!groups_path.empty()) groups = LoadGroupsFile(groups_path);
    auto report = Dbscan(model, groups ? &*groups : nullptr, params, threads);
    LocalDensity(model, report, density_radius, density_cap);
    out << "clusters " << report.n_clusters << "\nnoise " << report.noise_count
        << "\nmean_purity " << FormatFixed(report.mean_purity, 4) << '\n';
    if (!output_dir.empty()) {
      fs::create_directories(output_dir);
      std::string tsv = "cluster\tsize\tpurity\tgroup\tdensity\tmembers\n";
      for (std::size_t c = 0; c < report.n_clusters; ++c) {
        tsv += std::to_string(c) + "\t" +
               std::to_string(report.cluster_members[c].size()) + "\t" +
               FormatFixed(report.per_cluster_purity[c], 4) + "\t" +
               report.per_cluster_group[c] + "\t" +
               std::to_string(report.per_cluster_density[c]) + "\t";
        for (std::size_t m = 0; m < report.cluster_members[c].size(); ++m) {
          tsv += (m ? " " : "") + report.cluster_members[c][m];
        }
        tsv += "\n";
      }
      WriteFileAtomic(fs::path(output_dir) / "clusters.tsv", tsv);
      Json j;
      j["model"] = model_path;
      j["eps_similarity"] = params.eps_similarity;
      j["min_neighbors"] = params.min_neighbors;
      j["n_points"] = report.n_points;
      j["n_clusters"] = report.n_clusters;
      j["noise_count"] = report.noise_count;
      j["mean_purity"] = report.mean_purity;
      WriteFileAtomic(fs::path(output_dir) / "clusters.json", j.dump(2) + "\n");
      WriteFileAtomic(fs::path(output_dir) / kConfigJson, j.dump(2) + "\n");
    }
    return kExitOk;
  }
};

// ---- huffman --------------------------------------------------------------

void PrintDiff(CodingDiff const& diff, std::ostream& out) {
  out << "type\thamming\n";
  for (auto const& [type, d] : diff.per_type_hamming) {
    if (d != 0) out << type << '\t' << d << '\n';
  }
  out << "changed " << diff.changed_types << "\nmax_hamming " << diff.max_hamming
      << "\nmean_hamming " << FormatFixed(diff.mean_hamming, 4) << "\nappeared "
      << diff.appeared_types << "\ndisappeared " << diff.disappeared_types << '\n';
}

struct HuffmanCommand {
  CLI::App* build = nullptr;
  CLI::App* diff = nullptr;
  CLI::App* perturb = nullptr;
  std::string train;
  std::int64_t min_count = 5;
  std::string output;
  std::string coding_a;
  std::string coding_b;
  std::string type;

  void Register(CLI::App* app) {
    app->require_subcommand(1);
    build = app->add_subcommand("build", "Coding of a corpus vocabulary");
    build->add_option("--train", train)->required();
    build->add_option("--min-count", min_count)->capture_default_str();
    build->add_option("--output", output, "Dump file (default: standard output)");
    diff = app->add_subcommand("diff", "Per-type Hamming distances of two dumps");
    diff->add_option("coding_a", coding_a)->required();
    diff->add_option("coding_b", coding_b)->required();
    perturb = app->add_subcommand("perturb", "Remove one occurrence of a type");
    perturb->add_option("--train", train)->required();
    perturb->add_option("--min-count", min_count)->capture_default_str();
    perturb->add_option("--type", type)->required();
  }

  int Run(std::ostream& out) {
    if (*build) {
      auto vocab = Vocabulary::Build(LoadCorpusFile(train), min_count);
      auto text = SerializeCoding(HuffmanCoding::Build(vocab));
      if (output.empty()) {
        out << text;
      } else {
        WriteFileAtomic(output, text);
      }
    } else if (*diff) {
      PrintDiff(DiffCodings(LoadCodingFile(coding_a), LoadCodingFile(coding_b)), out);
    } else {
      auto vocab = Vocabulary::Build(LoadCorpusFile(train), min_count);
      PrintDiff(PerturbAndDiff(vocab, type), out);
    }
    return kExitOk;
  }
};

// ---- loo ------------------------------------------------------------------

struct LooCommand {
  TrainerFlags flags;
  std::string train;
  std::string groups_path;
  std::string output_dir = "runs";
  bool with_neg = false;
  std::size_t subsamples = 500;
  std::optional<std::uint64_t> selection_seed;
  bool fixed_tree = false;
  std::size_t k = 15;
  std::size_t pool = 10000;
  std::size_t seed_sample = 5000;
  bool no_topology = false;
  bool topology_neg = false;
  DbscanParams dbscan;
  double density_radius = 0.8;
  std::size_t density_cap = 200;
  std::string freq_agg = "min";
  std::optional<std::size_t> parallel;
  bool keep_models = false;
  bool quiet = false;

  void Register(CLI::App* app) {
    flags.Register(app, false);
    app->add_option("--train", train, "Corpus file")->required();
    app->add_option("--groups", groups_path, "Product group TSV");
    app->add_option("--output-dir,-o", output_dir, "Parent of the run directory")
        ->capture_default_str();
    app->add_flag("--neg", with_neg, "Also train negative-sampling models");
    app->add_option("--subsamples", subsamples)->capture_default_str();
    app->add_option("--selection-seed", selection_seed,
                    "Omitted-session draw (default: --seed)");
    app->add_flag("--fixed-tree", fixed_tree, "Reuse the reference Huffman coding");
    app->add_option("--k", k)->capture_default_str();
    app->add_option("--pool", pool)->capture_default_str();
    app->add_option("--seed-sample", seed_sample)->capture_default_str();
    app->add_flag("--no-topology", no_topology);
    app->add_flag("--topology-neg", topology_neg);
    app->add_option("--eps", dbscan.eps_similarity)->capture_default_str();
    app->add_option("--min-neighbors", dbscan.min_neighbors)->capture_default_str();
    app->add_option("--density-radius", density_radius)->capture_default_str();
    app->add_option("--density-cap", density_cap)->capture_default_str();
    app->add_option("--freq-agg", freq_agg)
        ->check(CLI::IsMember({"min", "mean", "median"}))
        ->capture_default_str();
    app->add_option("--parallel", parallel,
                    "Concurrent record pipelines (default: $EMBSTAB_THREADS or 1)");
    app->add_flag("--keep-models", keep_models);
    app->add_flag("--quiet,-q", quiet);
  }

  LooOptions Options() const {
    LooOptions o;
    o.hs = flags.Base();
    o.hs.mode = TrainMode::kHierarchicalSoftmax;
    if (with_neg) {
      if (flags.negative <= 0) throw UsageError("--neg needs --negative > 0");
      o.neg = flags.Base();
      o.neg->mode = TrainMode::kNegativeSampling;
    }
    o.n_subsamples = subsamples;
    o.selection_seed = selection_seed.value_or(flags.seed);
    o.fixed_tree = fixed_tree;
    o.k = k;
    o.seed_pool = pool;
    o.seed_sample = seed_sample;
    o.topology = !no_topology;
    o.topology_neg = topology_neg;
    o.dbscan = dbscan;
    o.density_radius = density_radius;
    o.density_cap = density_cap;
    o.freq_agg = ParseFrequencyAggregation(freq_agg);
    o.parallel = parallel.value_or(DefaultParallel());
    if (o.parallel < 1) throw UsageError("--parallel must be at least 1");
    o.Validate();
    return o;
  }

  int Run(std::ostream& out, std::ostream& err) {
    auto options = Options();
    auto corpus_text = ReadFileToString(train);
    auto corpus = ParseCorpus(corpus_text, train);
    if (subsamples > corpus.size()) {
      throw UsageError("--subsamples " + std::to_string(subsamples) +
                       " exceeds the corpus size " + std::to_string(corpus.size()));
    }
    GroupCatalog groups;
    std::string groups_text;
    if (!groups_path.empty()) {
      groups_text = ReadFileToString(groups_path);
      groups = ParseGroups(groups_text);
    }
    Json config;
    config["corpus_fnv"] = ConfigHash(corpus_text);
    config["groups_fnv"] = ConfigHash(groups_text);
    config["options"] = Json::parse(OptionsJson(options));
    auto canonical = config.dump();
    config["train"] = train;
    config["groups"] = groups_path;
    auto run_dir = fs::path(output_dir) / ("loo-" + ConfigHash(canonical));
    fs::create_directories(run_dir);
    WriteFileAtomic(run_dir / kConfigJson, config.dump(2) + "\n");

    auto const marker = run_dir / kIncompleteMarker;
    auto const journal_path = run_dir / kRecordsPartial;
    bool const finished = fs::exists(run_dir / kRecordsCsv) && !fs::exists(marker);
    if (finished) {
      Progress(quiet, err, "run already complete: " + run_dir.string());
      RenderReport(run_dir);
      out << run_dir.string() << '\n';
      return kExitOk;
    }
    WriteFileAtomic(marker, "");
    LooCallbacks callbacks;
    if (fs::exists(journal_path)) {
      for (auto& r : ParseRecordJournal(ReadFileToString(journal_path))) {
        callbacks.completed.emplace(r.session_index, std::move(r));
      }
      Progress(quiet, err,
               "resuming with " + std::to_string(callbacks.completed.size()) +
                   " completed records");
    }
    // Rewrite the journal so a torn trailing line cannot survive.
    {
      std::string clean;
      for (auto const& [idx, r] : callbacks.completed) {
        clean += SerializeRecordLine(r) + "\n";
      }
      WriteFileAtomic(journal_path, clean);
    }
    std::ofstream journal(journal_path, std::ios::app | std::ios::binary);
    callbacks.on_record = [&journal](LooRecord const& r) {
      journal << SerializeRecordLine(r) << '\n';
      journal.flush();
    };
    callbacks.progress = [this, &err](std::string const& msg) {
      Progress(quiet, err, msg);
    };
    if (keep_models) options.keep_models_dir = run_dir / "models";

    auto report = RunLoo(corpus, groups, options, std::move(callbacks));
    journal.close();
    WriteRunArtifacts(report, run_dir);
    RenderReport(run_dir);
    fs::remove(journal_path);
    fs::remove(marker);
    out << run_dir.string() << '\n';
    return kExitOk;
  }
};

// ---- report ---------------------------------------------------------------

struct ReportCommand {
  std::string run_dir;

  void Register(CLI::App* app) {
    app->add_option("run_dir", run_dir)->required();
  }

  int Run(std::ostream& out) {
    RenderReport(run_dir);
    out << (fs::path(run_dir) / kReportTxt).string() << '\n';
    return kExitOk;
  }
};

}  // namespace

std::vector<std::string> NormalizeArgs(std::vector<std::string> args) {
  for (auto& a : args) {
    if (a.size() > 2 && a[0] == '-' && a[1] != '-' &&
        std::isalpha(static_cast<unsigned char>(a[1])) &&
        std::isalpha(static_cast<unsigned char>(a[2]))) {
      a.insert(a.begin(), '-');
    }
  }
  return args;
}

int RunCli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Embedding stability experiments on click sessions", "embstab"};
  app.require_subcommand(1);
  GenCommand gen;
  TrainCommand train;
  CompareCommand compare;
  ClusterCommand cluster;
  HuffmanCommand huffman;
  LooCommand loo;
  ReportCommand report;
  auto* gen_app = app.add_subcommand("gen", "Generate a synthetic click corpus");
  gen.Register(gen_app);
  auto* train_app = app.add_subcommand("train", "Train a skip-gram model");
  train.Register(train_app);
  auto* compare_app = app.add_subcommand("compare", "Top-k neighbor overlap");
  compare.Register(compare_app);
  auto* cluster_app = app.add_subcommand("cluster", "DBSCAN topology of a model");
  cluster.Register(cluster_app);
  auto* huffman_app = app.add_subcommand("huffman", "Huffman coding tools");
  huffman.Register(huffman_app);
  auto* loo_app = app.add_subcommand("loo", "Leave-one-session-out experiment");
  loo.Register(loo_app);
  auto* report_app = app.add_subcommand("report", "Render a run directory");
  report.Register(report_app);

  args = NormalizeArgs(std::move(args));
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (CLI::CallForHelp const&) {
    out << app.help();
    return kExitOk;
  } catch (CLI::ParseError const& e) {
    if (e.get_exit_code() == 0) {
      out << app.help(e.what());
      return kExitOk;
    }
    err << "embstab: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    if (*gen_app) return gen.Run(out);
    if (*train_app) return train.Run(out, err);
    if (*compare_app) return compare.Run(out);
    if (*cluster_app) return cluster.Run(out);
    if (*huffman_app) return huffman.Run(out);
    if (*loo_app) return loo.Run(out, err);
    if (*report_app) return report.Run(out);
  } catch (UsageError const& e) {
    err << "embstab: " << e.what() << '\n';
    return kExitUsage;
  } catch (Error const& e) {
    err << "embstab: " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitRuntime;
  } catch (std::exception const& e) {
    err << "embstab: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace embstab::cli
