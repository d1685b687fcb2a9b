// Copyright 2026 The SeqRank Authors.
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

#ifndef SEQRANK_SYNTH_HPP_
#define SEQRANK_SYNTH_HPP_

// Planted-structure generator for desk-scale experiments. Items belong to
// latent clusters, users walk a cluster-level Markov chain, and item
// features are the cluster centroid plus Gaussian noise, so content is
// predictive of the next item's cluster.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqrank/dataio.hpp"
#include "seqrank/error.hpp"
#include "seqrank/numkit.hpp"

namespace seqrank {

struct SynthConfig {
  std::size_t users = 200;
  std::size_t items = 400;
  std::size_t clusters = 8;
  std::size_t seq_len = 20;
  std::size_t f_dim_visual = 16;
  std::size_t f_dim_textual = 16;
  double noise_sigma = 0.1;
  std::uint64_t seed = 1;
  // Probability mass kept on the current cluster and placed on its planted
  // successor; the remainder is spread uniformly over all clusters.
  double self_transition = 0.0;
  double transition_sharpness = 0.8;
  // Zipf exponent of item popularity inside a cluster (0 = uniform).
  double popularity_skew = 0.0;
  // Fraction of each cluster's items that are made rare, and the weight
  // multiplier applied to them.
  double cold_fraction = 0.0;
  double cold_weight = 0.05;

  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (users == 0) out.push_back("users must be positive");
    if (items == 0) out.push_back("items must be positive");
    if (clusters == 0) out.push_back("clusters must be positive");
    if (clusters > items) out.push_back("clusters (" + std::to_string(clusters) +
                                        ") exceed items (" + std::to_string(items) + ")");
    if (seq_len < 2) out.push_back("seq_len must be at least 2");
    if (!(noise_sigma >= 0.0)) out.push_back("noise_sigma must be >= 0");
    if (!(transition_sharpness >= 0.0 && transition_sharpness <= 1.0))
      out.push_back("transition_sharpness must lie in [0, 1]");
    if (!(self_transition >= 0.0 && self_transition + transition_sharpness <= 1.0))
      out.push_back("self_transition must be >= 0 and self_transition + transition_sharpness <= 1");
    if (!(popularity_skew >= 0.0)) out.push_back("popularity_skew must be >= 0");
    if (!(cold_fraction >= 0.0 && cold_fraction < 1.0)) out.push_back("cold_fraction must lie in [0, 1)");
    if (!(cold_weight > 0.0)) out.push_back("cold_weight must be > 0");
    return out;
  }

  void validate() const {
    auto p = problems();
    if (p.empty()) return;
    std::string msg = "invalid generator config:";
    for (const auto& s : p) msg += "\n  - " + s;
    throw ConfigError(msg);
  }
};

inline void to_json(nlohmann::json& j, const SynthConfig& c) {
  j = nlohmann::json{{"users", c.users},
                     {"items", c.items},
                     {"clusters", c.clusters},
                     {"seq_len", c.seq_len},
                     {"f_dim_visual", c.f_dim_visual},
                     {"f_dim_textual", c.f_dim_textual},
                     {"noise_sigma", c.noise_sigma},
                     {"seed", c.seed},
                     {"self_transition", c.self_transition},
                     {"transition_sharpness", c.transition_sharpness},
                     {"popularity_skew", c.popularity_skew},
                     {"cold_fraction", c.cold_fraction},
                     {"cold_weight", c.cold_weight}};
}

// Reads a generator config; unknown keys and wrong types are collected and
// reported together.
inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  std::vector<std::string> errs;
  if (!j.is_object()) throw ConfigError("generator config must be a JSON object");
  auto get_count = [&](const char* key, std::size_t& dst) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      errs.push_back(std::string(key) + ": expected non-negative integer");
      return;
    }
    dst = v.get<std::size_t>();
  };
  auto get_real = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number()) {
      errs.push_back(std::string(key) + ": expected number");
      return;
    }
    dst = v.get<double>();
  };
  static const char* known[] = {"users",        "items",        "clusters",      "seq_len",
                                "f_dim_visual", "f_dim_textual", "noise_sigma",  "seed",
                                "self_transition", "transition_sharpness", "popularity_skew", "cold_fraction",
                                "cold_weight"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      errs.push_back("unknown key '" + key + "'");
  }
  get_count("users", c.users);
  get_count("items", c.items);
  get_count("clusters", c.clusters);
  get_count("seq_len", c.seq_len);
  get_count("f_dim_visual", c.f_dim_visual);
  get_count("f_dim_textual", c.f_dim_textual);
  get_real("noise_sigma", c.noise_sigma);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) errs.push_back("seed: expected integer");
    else c.seed = j["seed"].get<std::uint64_t>();
  }
  get_real("self_transition", c.self_transition);
  get_real("transition_sharpness", c.transition_sharpness);
  get_real("popularity_skew", c.popularity_skew);
  get_real("cold_fraction", c.cold_fraction);
  get_real("cold_weight", c.cold_weight);
  for (auto& p : c.problems()) errs.push_back(std::move(p));
  if (!errs.empty()) {
    std::string msg = "invalid generator config:";
    for (const auto& s : errs) msg += "\n  - " + s;
    throw ConfigError(msg);
  }
  return c;
}

struct SynthResult {
  RawSequences sequences;
  FeatureTable visual;   // raw, not normalized
  FeatureTable textual;  // raw, not normalized
  std::vector<std::size_t> item_cluster;
  std::vector<bool> item_cold;
  Mat transition;  // clusters x clusters, rows sum to 1
};

namespace detail {
inline std::string padded_id(char prefix, std::size_t k, std::size_t n) {
  std::string digits = std::to_string(k);
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

inline std::size_t draw_weighted(const std::vector<double>& cumulative, Rng& rng) {
  const double r = rng.uniform01() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}
}  // namespace detail

inline SynthResult synth_corpus(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t K = cfg.clusters;
  SynthResult out;

  // Balanced cluster assignment, shuffled over item ids.
  out.item_cluster.resize(cfg.items);
  for (std::size_t i = 0; i < cfg.items; ++i) out.item_cluster[i] = i % K;
  rng.shuffle(out.item_cluster);

  // Planted successor: a random cyclic order over clusters.
  std::vector<std::size_t> order(K);
  for (std::size_t k = 0; k < K; ++k) order[k] = k;
  rng.shuffle(order);
  out.transition =
      Mat(K, K, (1.0 - cfg.self_transition - cfg.transition_sharpness) / static_cast<double>(K));
  for (std::size_t j = 0; j < K; ++j) {
    const std::size_t from = order[j];
    const std::size_t to = order[(j + 1) % K];
    out.transition(from, from) += cfg.self_transition;
    out.transition(from, to) += cfg.transition_sharpness;
  }

  // Per-cluster member lists with popularity weights. Members are kept in
  // item order; the popularity rank is a random permutation inside a cluster.
  std::vector<std::vector<std::size_t>> members(K);
  for (std::size_t i = 0; i < cfg.items; ++i) members[out.item_cluster[i]].push_back(i);
  out.item_cold.assign(cfg.items, false);
  std::vector<std::vector<double>> cumulative(K);
  for (std::size_t k = 0; k < K; ++k) {
    auto ranked = members[k];
    rng.shuffle(ranked);
    const std::size_t n = ranked.size();
    const auto n_cold = static_cast<std::size_t>(cfg.cold_fraction * static_cast<double>(n));
    std::vector<double> weight(cfg.items, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double w = 1.0 / std::pow(static_cast<double>(r + 1), cfg.popularity_skew);
      if (r >= n - n_cold) {
        w *= cfg.cold_weight;
        out.item_cold[ranked[r]] = true;
      }
      weight[ranked[r]] = w;
    }
    double acc = 0.0;
    for (std::size_t i : members[k]) {
      acc += weight[i];
      cumulative[k].push_back(acc);
    }
  }

  std::vector<std::vector<double>> trans_cum(K);
  for (std::size_t k = 0; k < K; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      acc += out.transition(k, j);
      trans_cum[k].push_back(acc);
    }
  }

  auto make_features = [&](std::size_t dims) {
    FeatureTable t;
    t.dims = dims;
    std::vector<Vec> centroid(K, Vec(dims));
    for (auto& c : centroid)
      for (auto& v : c) v = rng.uniform01();
    for (std::size_t i = 0; i < cfg.items; ++i) {
      Vec row = centroid[out.item_cluster[i]];
      if (cfg.noise_sigma > 0.0)
        for (auto& v : row) v += cfg.noise_sigma * rng.normal();
      t.ids.push_back(detail::padded_id('i', i, cfg.items));
      t.rows.push_back(std::move(row));
    }
    return t;
  };
  out.visual = make_features(cfg.f_dim_visual);
  out.textual = make_features(cfg.f_dim_textual);

  for (std::size_t u = 0; u < cfg.users; ++u) {
    std::vector<std::string> seq;
    std::size_t cluster = rng.index(K);
    for (std::size_t t = 0; t < cfg.seq_len; ++t) {
      const std::size_t pick = detail::draw_weighted(cumulative[cluster], rng);
      seq.push_back(detail::padded_id('i', members[cluster][pick], cfg.items));
      cluster = detail::draw_weighted(trans_cum[cluster], rng);
    }
    out.sequences.user_ids.push_back(detail::padded_id('u', u, cfg.users));
    out.sequences.items.push_back(std::move(seq));
  }
  return out;
}

struct SynthPaths {
  std::string sequences;
  std::string visual;
  std::string textual;
};

// Writes sequences.tsv, visual.tsv and textual.tsv into dir.
inline SynthPaths write_synth(const SynthResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  SynthPaths p{(fs::path(dir) / "sequences.tsv").string(), (fs::path(dir) / "visual.tsv").string(),
               (fs::path(dir) / "textual.tsv").string()};
  auto open = [](const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path + "'");
    return f;
  };
  {
    auto f = open(p.sequences);
    write_sequences(f, r.sequences);
  }
  {
    auto f = open(p.visual);
    write_features(f, r.visual);
  }
  {
    auto f = open(p.textual);
    write_features(f, r.textual);
  }
  return p;
}

// In-memory equivalent of write_synth followed by loading: split, filter
// and normalize the visual features onto [0, 0.5] and textual onto
// [-0.5, 0.5].
inline Dataset synth_dataset(const SynthResult& r, std::size_t min_len = 2, double split_frac = 0.9) {
  Dataset ds;
  ds.corpus = build_corpus(r.sequences, min_len, split_frac);
  FeatureTable visual = r.visual;
  FeatureTable textual = r.textual;
  normalize_min_max(visual, 0.0, 0.5);
  normalize_min_max(textual, -0.5, 0.5);
  ds.features = attach_features(ds.corpus, &visual, &textual);
  return ds;
}

}  // namespace seqrank

#endif  // SEQRANK_SYNTH_HPP_
