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

#include "embstab/loo_io.h"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "embstab/error.h"
#include "embstab/model_io.h"
#include "embstab/rng.h"

namespace embstab {
namespace {

using Json = nlohmann::ordered_json;

constexpr char const* kColumns[] = {
    "session_index",   "failed",           "failure_reason",
    "length",          "freq_agg",         "rank",
    "min_count_flag",  "huffman_changes_log10", "max_hamming",
    "overlap_hs",      "overlap_neg",      "seeds_dropped_hs",
    "seeds_dropped_neg", "has_topology",   "n_clusters",
    "noise",           "mean_purity",      "mean_density",
    "delta_n_clusters", "delta_noise",     "delta_mean_purity",
    "changed_types",   "appeared_types",   "disappeared_types",
    "same_tree"};
constexpr std::size_t kColumnCount = std::size(kColumns);

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Sanitize(std::string const& reason) {
  std::string out = reason;
  for (auto& c : out) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

double ParseDouble(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kFormat, "records.csv line " + std::to_string(line) +
                                        ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t ParseInt(std::string_view s, std::size_t line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kFormat, "records.csv line " + std::to_string(line) +
                                        ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> SplitFields(std::string_view row) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = row.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(row.substr(start));
      return fields;
    }
    fields.push_back(row.substr(start, comma - start));
    start = comma + 1;
  }
}

Json ConfigJson(TrainConfig const& c) {
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

Json OptionsJsonValue(LooOptions const& o) {
  Json j;
  j["hs"] = ConfigJson(o.hs);
  j["neg"] = o.neg ? ConfigJson(*o.neg) : Json();
  j["n_subsamples"] = o.n_subsamples;
  j["selection_seed"] = o.selection_seed;
  j["fixed_tree"] = o.fixed_tree;
  j["k"] = o.k;
  j["seed_pool"] = o.seed_pool;
  j["seed_sample"] = o.seed_sample;
  j["topology"] = o.topology;
  j["topology_neg"] = o.topology_neg;
  j["dbscan_eps_similarity"] = o.dbscan.eps_similarity;
  j["dbscan_min_neighbors"] = o.dbscan.min_neighbors;
  j["density_radius"] = o.density_radius;
  j["density_cap"] = o.density_cap;
  j["freq_agg"] = ToString(o.freq_agg);
  return j;
}

Json ClustersJson(ClusterReport const& r) {
  Json j;
  j["n_points"] = r.n_points;
  j["n_clusters"] = r.n_clusters;
  j["noise_count"] = r.noise_count;
  j["mean_purity"] = r.mean_purity;
  double density = 0.0;
  for (auto d : r.per_cluster_density) density += static_cast<double>(d);
  if (!r.per_cluster_density.empty()) {
    density /= static_cast<double>(r.per_cluster_density.size());
  }
  j["mean_density"] = density;
  return j;
}

Json SummaryOf(std::vector<double> const& values) {
  if (values.empty()) return Json();
  auto s = Summarize(values);
  Json j;
  j["n"] = values.size();
  j["mean"] = s.mean;
  j["sd"] = s.sd;
  return j;
}

std::string ReadRequired(std::filesystem::path const& dir,
                         std::vector<std::string> const& names,
                         std::size_t which) {
  std::vector<std::string> missing;
  for (auto const& n : names) {
    if (!std::filesystem::exists(dir / n)) missing.push_back(n);
  }
  if (!missing.empty()) {
    std::string list;
    for (auto const& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorCode::kNotFound,
                "run directory " + dir.string() + " lacks " + list);
  }
  return ReadFileToString(dir / names[which]);
}

std::string Fixed(double v, int digits) { return FormatFixed(v, digits); }

}  // namespace

std::string OptionsJson(LooOptions const& options) {
  return OptionsJsonValue(options).dump(2) + "\n";
}

std::string ConfigHash(std::string_view canonical_text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(Fnv1a64(canonical_text)));
  return buf;
}

std::string SerializeRecordsCsv(std::vector<LooRecord> const& records) {
  std::string out;
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    out += i == 0 ? "" : ",";
    out += kColumns[i];
  }
  out += '\n';
  for (auto const& r : records) {
    auto const& f = r.features;
    auto const& o = r.outcomes;
    std::vector<std::string> row{
        std::to_string(r.session_index),
        r.failed ? "1" : "0",
        Sanitize(r.failure_reason),
        Num(f.length),
        Num(f.freq_agg),
        Num(f.rank),
        Num(f.min_count_flag),
        Num(f.huffman_changes_log10),
        Num(f.max_hamming),
        r.failed ? "" : Num(o.overlap_hs),
        o.overlap_neg ? Num(*o.overlap_neg) : "",
        std::to_string(o.seeds_dropped_hs),
        std::to_string(o.seeds_dropped_neg),
        o.has_topology ? "1" : "0",
        o.has_topology ? std::to_string(o.n_clusters) : "",
        o.has_topology ? std::to_string(o.noise) : "",
        o.has_topology ? Num(o.mean_purity) : "",
        o.has_topology ? Num(o.mean_density) : "",
        o.has_topology ? std::to_string(o.delta_n_clusters) : "",
        o.has_topology ? std::to_string(o.delta_noise) : "",
        o.has_topology ? Num(o.delta_mean_purity) : "",
        std::to_string(r.changed_types),
        std::to_string(r.appeared_types),
        std::to_string(r.disappeared_types),
        r.same_tree ? "1" : "0"};
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += i == 0 ? "" : ",";
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

std::vector<LooRecord> ParseRecordsCsv(std::string_view text) {
  std::vector<LooRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto row = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (line_no == 1) {
      if (row.substr(0, 13) != "session_index") {
        throw Error(ErrorCode::kFormat, "records.csv lacks its header line");
      }
      continue;
    }
    if (row.empty()) continue;
    auto v = SplitFields(row);
    if (v.size() != kColumnCount) {
      throw Error(ErrorCode::kFormat,
                  "records.csv line " + std::to_string(line_no) + " has " +
                      std::to_string(v.size()) + " fields, expected " +
                      std::to_string(kColumnCount));
    }
    auto d = [&](std::size_t i) { return ParseDouble(v[i], line_no); };
    auto n = [&](std::size_t i) { return ParseInt(v[i], line_no); };
    LooRecord r;
    r.session_index = static_cast<std::size_t>(n(0));
    r.failed = n(1) != 0;
    r.failure_reason = std::string(v[2]);
    r.features = {d(3), d(4), d(5), d(6), d(7), d(8)};
    auto& o = r.outcomes;
    if (!v[9].empty()) o.overlap_hs = d(9);
    if (!v[10].empty()) o.overlap_neg = d(10);
    o.seeds_dropped_hs = static_cast<std::size_t>(n(11));
    o.seeds_dropped_neg = static_cast<std::size_t>(n(12));
    o.has_topology = n(13) != 0;
    if (o.has_topology) {
      o.n_clusters = n(14);
      o.noise = n(15);
      o.mean_purity = d(16);
      o.mean_density = d(17);
      o.delta_n_clusters = n(18);
      o.delta_noise = n(19);
      o.delta_mean_purity = d(20);
    }
    r.changed_types = n(21);
    r.appeared_types = n(22);
    r.disappeared_types = n(23);
    r.same_tree = n(24) != 0;
    records.push_back(std::move(r));
  }
  return records;
}

std::string SerializeRecordLine(LooRecord const& r) {
  auto const& f = r.features;
  auto const& o = r.outcomes;
  Json j;
  j["session_index"] = r.session_index;
  j["failed"] = r.failed;
  j["failure_reason"] = r.failure_reason;
  j["features"] = {f.length,        f.freq_agg,
                   f.rank,          f.min_count_flag,
                   f.huffman_changes_log10, f.max_hamming};
  j["overlap_hs"] = o.overlap_hs;
  j["overlap_neg"] = o.overlap_neg ? Json(*o.overlap_neg) : Json();
  j["seeds_dropped"] = {o.seeds_dropped_hs, o.seeds_dropped_neg};
  j["has_topology"] = o.has_topology;
  j["topology"] = {o.n_clusters, o.noise, o.delta_n_clusters, o.delta_noise};
  j["purity_density"] = {o.mean_purity, o.mean_density, o.delta_mean_purity};
  j["coding"] = {r.changed_types, r.appeared_types, r.disappeared_types};
  j["same_tree"] = r.same_tree;
  return j.dump();
}

LooRecord ParseRecordLine(std::string_view line) {
  try {
    auto j = Json::parse(line);
    LooRecord r;
    r.session_index = j.at("session_index").get<std::size_t>();
    r.failed = j.at("failed").get<bool>();
    r.failure_reason = j.at("failure_reason").get<std::string>();
    auto const& f = j.at("features");
    r.features = {f.at(0).get<double>(), f.at(1).get<double>(),
                  f.at(2).get<double>(), f.at(3).get<double>(),
                  f.at(4).get<double>(), f.at(5).get<double>()};
    auto& o = r.outcomes;
    o.overlap_hs = j.at("overlap_hs").get<double>();
    if (!j.at("overlap_neg").is_null()) {
      o.overlap_neg = j.at("overlap_neg").get<double>();
    }
    o.seeds_dropped_hs = j.at("seeds_dropped").at(0).get<std::size_t>();
    o.seeds_dropped_neg = j.at("seeds_dropped").at(1).get<std::size_t>();
    o.has_topology = j.at("has_topology").get<bool>();
    auto const& t = j.at("topology");
    o.n_clusters = t.at(0).get<std::int64_t>();
    o.noise = t.at(1).get<std::int64_t>();
    o.delta_n_clusters = t.at(2).get<std::int64_t>();
    o.delta_noise = t.at(3).get<std::int64_t>();
    auto const& p = j.at("purity_density");
    o.mean_purity = p.at(0).get<double>();
    o.mean_density = p.at(1).get<double>();
    o.delta_mean_purity = p.at(2).get<double>();
    auto const& c = j.at("coding");
    r.changed_types = c.at(0).get<std::int64_t>();
    r.appeared_types = c.at(1).get<std::int64_t>();
    r.disappeared_types = c.at(2).get<std::int64_t>();
    r.same_tree = j.at("same_tree").get<bool>();
    return r;
  } catch (nlohmann::json::exception const& e) {
    throw Error(ErrorCode::kFormat, std::string("bad record line: ") + e.what());
  }
}

std::vector<LooRecord> ParseRecordJournal(std::string_view text) {
  std::vector<LooRecord> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) break;  // unterminated tail
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    try {
      out.push_back(ParseRecordLine(line));
    } catch (Error const&) {
      break;
    }
  }
  return out;
}

std::string SerializeSummaryJson(LooReport const& report) {
  auto const& ref = report.reference;
  Json j;
  j["n_records"] = report.records.size();
  j["failed_count"] = report.failed_count;
  j["same_tree_count"] = report.same_tree_count;
  Json corpus;
  corpus["n_sessions"] = ref.corpus.n_sessions;
  corpus["n_tokens"] = ref.corpus.n_tokens;
  corpus["n_distinct_types"] = ref.corpus.n_distinct_types;
  corpus["n_retained_types"] = ref.corpus.n_retained_types;
  corpus["mean_session_length"] = ref.corpus.mean_session_length;
  corpus["mean_groups_per_session"] = ref.corpus.mean_groups_per_session;
  Json r;
  r["corpus"] = corpus;
  r["vocabulary_size"] = ref.vocabulary_size;
  r["coding_internal_nodes"] = ref.coding_internal_nodes;
  r["seed_pool"] = ref.seed_pool;
  r["seed_count"] = ref.seed_count;
  r["seed_pool_clamped"] = ref.seed_pool_clamped;
  r["control_overlap_hs"] = ref.control_overlap_hs;
  r["control_overlap_neg"] =
      ref.control_overlap_neg ? Json(*ref.control_overlap_neg) : Json();
  r["clusters_hs"] = ref.clusters_hs ? ClustersJson(*ref.clusters_hs) : Json();
  r["clusters_neg"] = ref.clusters_neg ? ClustersJson(*ref.clusters_neg) : Json();
  j["reference"] = r;
  std::vector<double> hs;
  std::vector<double> neg;
  for (auto const& rec : report.records) {
    if (rec.failed) continue;
    hs.push_back(rec.outcomes.overlap_hs);
    if (rec.outcomes.overlap_neg) neg.push_back(*rec.outcomes.overlap_neg);
  }
  j["overlap_hs"] = SummaryOf(hs);
  j["overlap_neg"] = SummaryOf(neg);
  j["options"] = OptionsJsonValue(report.options);
  return j.dump(2) + "\n";
}

std::string SerializeHistogramCsv(std::vector<HistogramBin> const& bins) {
  std::string out = "n_clusters,count,reference\n";
  for (auto const& b : bins) {
    out += std::to_string(b.n_clusters) + "," + std::to_string(b.count) + "," +
           (b.reference ? "1" : "0") + "\n";
  }
  return out;
}

std::string RegressionText(LooReport const& report, OverlapTarget target) {
  auto const label = target == OverlapTarget::kHs ? "HS" : "NEG";
  std::string out;
  try {
    auto reg = RegressStability(report, target);
    out += FormatRegressionTable(reg.full, std::string("Overlap (") + label + ")");
    out += "\n";
    out += FormatRegressionTable(reg.full_zscored,
                                 std::string("Overlap (") + label + ", z-scored)");
    for (auto const& u : reg.univariate) {
      out += "\n";
      out += FormatRegressionTable(
          u, std::string("Overlap (") + label + ") ~ " + u.feature_names.back());
    }
    if (!reg.dropped_features.empty()) {
      out += "\nConstant features dropped:";
      for (auto const& d : reg.dropped_features) out += " " + d + ";";
      out.back() = '\n';
    }
  } catch (Error const& e) {
    out = std::string("Overlap (") + label + "): no fit: " + e.what() + "\n";
  }
  return out;
}

void WriteRunArtifacts(LooReport const& report, std::filesystem::path const& dir) {
  std::filesystem::create_directories(dir);
  WriteFileAtomic(dir / kRecordsCsv, SerializeRecordsCsv(report.records));
  WriteFileAtomic(dir / kSummaryJson, SerializeSummaryJson(report));
  if (report.reference.clusters_hs) {
    WriteFileAtomic(dir / kHistogramCsv,
                    SerializeHistogramCsv(ClusterHistogram(report)));
  }
  WriteFileAtomic(dir / kRegressionHs, RegressionText(report, OverlapTarget::kHs));
  if (report.options.neg) {
    WriteFileAtomic(dir / kRegressionNeg,
                    RegressionText(report, OverlapTarget::kNeg));
  }
}

LooReport LoadRunReport(std::filesystem::path const& dir) {
  std::vector<std::string> const names{kRecordsCsv, kSummaryJson};
  auto records_text = ReadRequired(dir, names, 0);
  auto summary_text = ReadRequired(dir, names, 1);
  LooReport report;
  report.records = ParseRecordsCsv(records_text);
  Json j;
  try {
    j = Json::parse(summary_text);
  } catch (nlohmann::json::exception const& e) {
    throw Error(ErrorCode::kFormat, std::string("bad summary.json: ") + e.what());
  }
  auto get_size = [&](Json const& node, char const* key) -> std::size_t {
    return node.contains(key) && node[key].is_number() ? node[key].get<std::size_t>()
                                                       : 0;
  };
  report.failed_count = get_size(j, "failed_count");
  report.same_tree_count = get_size(j, "same_tree_count");
  if (j.contains("reference")) {
    auto const& r = j["reference"];
    auto& ref = report.reference;
    ref.vocabulary_size = get_size(r, "vocabulary_size");
    ref.coding_internal_nodes = get_size(r, "coding_internal_nodes");
    ref.seed_pool = get_size(r, "seed_pool");
    ref.seed_count = get_size(r, "seed_count");
    if (r.contains("corpus")) {
      auto const& c = r["corpus"];
      ref.corpus.n_sessions = get_size(c, "n_sessions");
      ref.corpus.n_tokens = get_size(c, "n_tokens");
      ref.corpus.n_distinct_types = get_size(c, "n_distinct_types");
      ref.corpus.n_retained_types = get_size(c, "n_retained_types");
      ref.corpus.mean_session_length = c.value("mean_session_length", 0.0);
      ref.corpus.mean_groups_per_session = c.value("mean_groups_per_session", 0.0);
    }
    if (r.contains("clusters_hs") && r["clusters_hs"].is_object()) {
      ClusterReport cr;
      auto const& c = r["clusters_hs"];
      cr.n_points = get_size(c, "n_points");
      cr.n_clusters = get_size(c, "n_clusters");
      cr.noise_count = get_size(c, "noise_count");
      cr.mean_purity = c.value("mean_purity", 0.0);
      ref.mean_density_hs = c.value("mean_density", 0.0);
      ref.clusters_hs = cr;
    }
  }
  if (j.contains("options") && j["options"].contains("neg") &&
      !j["options"]["neg"].is_null()) {
    report.options.neg = TrainConfig{};
    report.options.neg->mode = TrainMode::kNegativeSampling;
  }
  return report;
}

std::string RenderHistogramSvg(std::vector<HistogramBin> const& bins) {
  constexpr int kWidth = 640;
  constexpr int kHeight = 360;
  constexpr int kLeft = 50;
  constexpr int kRight = 20;
  constexpr int kTop = 30;
  constexpr int kBottom = 50;
  int const plot_w = kWidth - kLeft - kRight;
  int const plot_h = kHeight - kTop - kBottom;
  std::size_t max_count = 1;
  for (auto const& b : bins) max_count = std::max(max_count, b.count);
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
    << kHeight << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2
    << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"14\">Number of clusters (HS models)</text>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
    << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
    << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
    << max_count << "</text>\n";
  s << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + plot_h
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">0"
       "</text>\n";
  if (!bins.empty()) {
    double const bar_w = static_cast<double>(plot_w) / static_cast<double>(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
      auto const& b = bins[i];
      double const h = static_cast<double>(plot_h) * static_cast<double>(b.count) /
                       static_cast<double>(max_count);
      double const x = kLeft + bar_w * static_cast<double>(i);
      s << "<rect x=\"" << Fixed(x + 1, 2) << "\" y=\""
        << Fixed(kTop + plot_h - h, 2) << "\" width=\""
        << Fixed(std::max(bar_w - 2, 1.0), 2) << "\" height=\"" << Fixed(h, 2)
        << "\" fill=\"" << (b.reference ? "red" : "steelblue") << "\""
        << (b.reference ? " class=\"reference\"" : "") << "/>\n";
      bool const label = bins.size() <= 20 || i % ((bins.size() + 19) / 20) == 0 ||
                         b.reference;
      if (label) {
        s << "<text x=\"" << Fixed(x + bar_w / 2, 2) << "\" y=\""
          << kTop + plot_h + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\">"
          << b.n_clusters << "</text>\n";
      }
    }
  }
  s << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\">clusters (reference in red)</text>\n";
  s << "</svg>\n";
  return s.str();
}

void RenderReport(std::filesystem::path const& dir) {
  auto report = LoadRunReport(dir);
  std::ostringstream txt;
  auto const& ref = report.reference;
  txt << "Reference\n";
  txt << "  sessions            " << ref.corpus.n_sessions << "\n";
  txt << "  tokens              " << ref.corpus.n_tokens << "\n";
  txt << "  vocabulary          " << ref.vocabulary_size << "\n";
  txt << "  internal nodes      " << ref.coding_internal_nodes << "\n";
  txt << "  overlap seeds       " << ref.seed_count << " of top " << ref.seed_pool
      << "\n";
  if (ref.clusters_hs) {
    txt << "  clusters (HS)       " << ref.clusters_hs->n_clusters << "\n";
    txt << "  noise (HS)          " << ref.clusters_hs->noise_count << "\n";
    txt << "  mean purity (HS)    " << Fixed(ref.clusters_hs->mean_purity, 4) << "\n";
  }
  std::vector<double> hs;
  std::vector<double> neg;
  std::size_t failed = 0;
  for (auto const& r : report.records) {
    if (r.failed) {
      ++failed;
      continue;
    }
    hs.push_back(r.outcomes.overlap_hs);
    if (r.outcomes.overlap_neg) neg.push_back(*r.outcomes.overlap_neg);
  }
  txt << "\nRecords             " << report.records.size() << " (" << failed
      << " failed, " << report.same_tree_count << " same tree)\n";
  if (!hs.empty()) {
    auto s = Summarize(hs);
    txt << "Overlap HS          " << Fixed(100 * s.mean, 2) << " +- "
        << Fixed(100 * s.sd, 2) << " %\n";
  }
  if (!neg.empty()) {
    auto s = Summarize(neg);
    txt << "Overlap NEG         " << Fixed(100 * s.mean, 2) << " +- "
        << Fixed(100 * s.sd, 2) << " %\n";
  }
  if (ref.clusters_hs) {
    auto bins = ClusterHistogram(report);
    WriteFileAtomic(dir / kHistogramSvg, RenderHistogramSvg(bins));
    txt << "\nCluster histogram\n";
    for (auto const& b : bins) {
      txt << "  " << b.n_clusters << "\t" << b.count
          << (b.reference ? "\treference" : "") << "\n";
    }
    try {
      auto c = DensityOverlapCorrelation(report);
      txt << "\nDensity vs overlap (HS): pearson " << Fixed(c.pearson, 4)
          << ", spearman " << Fixed(c.spearman, 4) << "\n";
    } catch (Error const& e) {
      txt << "\nDensity vs overlap (HS): " << e.what() << "\n";
    }
  }
  if (!report.records.empty()) {
    txt << "\n" << RegressionText(report, OverlapTarget::kHs);
    if (!neg.empty()) txt << "\n" << RegressionText(report, OverlapTarget::kNeg);
  }
  WriteFileAtomic(dir / kReportTxt, txt.str());
}

}  // namespace embstab
