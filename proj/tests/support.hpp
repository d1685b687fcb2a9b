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

#ifndef SEQRANK_TESTS_SUPPORT_HPP_
#define SEQRANK_TESTS_SUPPORT_HPP_

// Fixtures and independent reference implementations shared by the tests.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "seqrank/seqrank.hpp"

namespace seqrank::testing {

struct UserSpec {
  std::string id;
  std::vector<ItemIndex> train;
  std::vector<ItemIndex> test;
};

// Corpus built directly from index sequences; items are named i0..i{n-1}
// with zero padding so index order is id order.
inline Corpus make_corpus(std::size_t n_items, const std::vector<UserSpec>& users) {
  Corpus c;
  for (std::size_t i = 0; i < n_items; ++i) {
    std::string s = std::to_string(i);
    c.item_ids.push_back("i" + std::string(4 - s.size(), '0') + s);
  }
  for (const auto& u : users) {
    c.user_ids.push_back(u.id);
    c.train_seq.push_back(u.train);
    c.test_seq.push_back(u.test);
  }
  c.reindex();
  return c;
}

inline Dataset make_dataset(Corpus c, std::size_t fv, std::size_t ft, std::uint64_t seed) {
  Dataset ds;
  ds.corpus = std::move(c);
  Rng rng(seed);
  ds.features.visual = Mat(ds.corpus.num_items(), fv);
  ds.features.textual = Mat(ds.corpus.num_items(), ft);
  for (double& v : ds.features.visual.flat()) v = rng.uniform(0.0, 0.5);
  for (double& v : ds.features.textual.flat()) v = rng.uniform(-0.5, 0.5);
  return ds;
}

inline Hyper make_hyper(FeatureMask mask, std::size_t d, std::size_t fv, std::size_t ft) {
  Hyper h;
  h.d = d;
  h.mask = mask;
  h.visual_dim = mask.visual ? fv : 0;
  h.textual_dim = mask.textual ? ft : 0;
  return h;
}

// Small planted corpus used by several tests.
inline Dataset small_synth(std::size_t users = 40, std::size_t items = 80, std::uint64_t seed = 1) {
  SynthConfig sc;
  sc.users = users;
  sc.items = items;
  sc.clusters = 4;
  sc.seq_len = 12;
  sc.f_dim_visual = 4;
  sc.f_dim_textual = 4;
  sc.seed = seed;
  sc.self_transition = 0.6;
  sc.transition_sharpness = 0.3;
  return synth_dataset(synth_corpus(sc));
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("seqrank_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream f(file(name), std::ios::binary);
    f << content;
    return file(name);
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------
// Brute-force metric references written straight from the definitions.

namespace brute {

inline bool member(const std::vector<ItemIndex>& rel, ItemIndex i) {
  return std::find(rel.begin(), rel.end(), i) != rel.end();
}

inline double recall(const std::vector<ItemIndex>& ranked, const std::vector<ItemIndex>& rel, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t j = 0; j < ranked.size() && j < k; ++j) hits += member(rel, ranked[j]);
  return static_cast<double>(hits) / static_cast<double>(rel.size());
}

inline double precision(const std::vector<ItemIndex>& ranked, const std::vector<ItemIndex>& rel, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t j = 0; j < ranked.size() && j < k; ++j) hits += member(rel, ranked[j]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

// Mean over relevant items found in the top k of the precision at their
// rank, normalized by min(k, |rel|).
inline double ap(const std::vector<ItemIndex>& ranked, const std::vector<ItemIndex>& rel, std::size_t k) {
  double sum = 0.0;
  for (std::size_t j = 0; j < ranked.size() && j < k; ++j) {
    if (!member(rel, ranked[j])) continue;
    sum += precision(ranked, rel, j + 1);
  }
  return sum / static_cast<double>(std::min(k, rel.size()));
}

inline double ndcg(const std::vector<ItemIndex>& ranked, const std::vector<ItemIndex>& rel, std::size_t k) {
  double dcg = 0.0, ideal = 0.0;
  for (std::size_t j = 0; j < ranked.size() && j < k; ++j)
    if (member(rel, ranked[j])) dcg += std::log(2.0) / std::log(static_cast<double>(j) + 2.0);
  for (std::size_t j = 0; j < std::min(k, rel.size()); ++j) ideal += std::log(2.0) / std::log(static_cast<double>(j) + 2.0);
  return dcg / ideal;
}

// Explicit count over every (relevant, non-relevant) pair.
inline double auc(const std::vector<double>& scores, const std::vector<bool>& rel) {
  double good = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (!rel[a]) continue;
    for (std::size_t b = 0; b < scores.size(); ++b) {
      if (rel[b]) continue;
      ++pairs;
      if (scores[a] > scores[b]) good += 1.0;
      else if (scores[a] == scores[b]) good += 0.5;
    }
  }
  return good / static_cast<double>(pairs);
}

}  // namespace brute

// Ranker with fixed per-user scores, for evaluator tests.
class TableRanker final : public Ranker {
 public:
  explicit TableRanker(std::vector<Vec> scores) : scores_(std::move(scores)) {}
  RankerKind kind() const override { return RankerKind::kPop; }
  Vec score_items(const Dataset&, UserIndex u) const override { return scores_.at(u); }
  Checkpoint to_checkpoint(const Dataset&) const override { return {}; }

 private:
  std::vector<Vec> scores_;
};

}  // namespace seqrank::testing

#endif  // SEQRANK_TESTS_SUPPORT_HPP_
