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

#ifndef SEQRANK_EVALUATOR_HPP_
#define SEQRANK_EVALUATOR_HPP_

// Top-k retrieval metrics, AUC and the frequency-bin cold-start analysis.
//
// Conventions: AP@k is normalized by min(k, |relevant|); NDCG uses binary
// gains with a log2(j + 1) discount; AUC counts tied pairs as one half.
// Per-user values are reduced in user order, so parallel and serial runs
// produce identical bits.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "seqrank/baselines.hpp"
#include "seqrank/dataio.hpp"
#include "seqrank/error.hpp"
#include "seqrank/model.hpp"

namespace seqrank {

template <typename S>
concept ItemSet = requires(const S& s, ItemIndex i) {
  { s.contains(i) } -> std::convertible_to<bool>;
  { s.size() } -> std::convertible_to<std::size_t>;
};

struct EvalConfig {
  std::vector<std::size_t> cutoffs{10, 30, 50};
  // Upper bounds b of the cold-start bins [1, b]; the whole-set bin is
  // always appended.
  std::vector<std::size_t> bins{2, 4, 6, 8, 10, 12, 14, 16, 18};
  std::size_t threads = 1;

  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (cutoffs.empty()) out.push_back("cutoffs must not be empty");
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
      if (cutoffs[k] == 0) out.push_back("cutoffs must be positive");
      if (k && cutoffs[k] <= cutoffs[k - 1]) out.push_back("cutoffs must be strictly increasing");
    }
    for (std::size_t k = 0; k < bins.size(); ++k) {
      if (bins[k] == 0) out.push_back("bin bounds must be positive");
      if (k && bins[k] <= bins[k - 1]) out.push_back("bin bounds must be strictly increasing");
    }
    if (threads == 0) out.push_back("threads must be at least 1");
    return out;
  }

  void validate() const {
    auto p = problems();
    if (p.empty()) return;
    std::string msg = "invalid evaluation config:";
    for (const auto& s : p) msg += "\n  - " + s;
    throw ConfigError(msg);
  }
};

struct RecallPrecision {
  double recall = 0.0;
  double precision = 0.0;
};

template <ItemSet Set>
std::size_t hits_at_k(std::span<const ItemIndex> ranked, const Set& relevant, std::size_t k) {
  const std::size_t n = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t j = 0; j < n; ++j)
    if (relevant.contains(ranked[j])) ++hits;
  return hits;
}

template <ItemSet Set>
RecallPrecision recall_precision_at_k(std::span<const ItemIndex> ranked, const Set& relevant, std::size_t k) {
  if (relevant.size() == 0 || k == 0) return {};
  const auto hits = static_cast<double>(hits_at_k(ranked, relevant, k));
  return {hits / static_cast<double>(relevant.size()), hits / static_cast<double>(k)};
}

template <ItemSet Set>
double average_precision_at_k(std::span<const ItemIndex> ranked, const Set& relevant, std::size_t k) {
  if (relevant.size() == 0 || k == 0) return 0.0;
  const std::size_t n = std::min(k, ranked.size());
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!relevant.contains(ranked[j])) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(j + 1);
  }
  return sum / static_cast<double>(std::min<std::size_t>(k, relevant.size()));
}

template <ItemSet Set>
double ndcg_at_k(std::span<const ItemIndex> ranked, const Set& relevant, std::size_t k) {
  if (relevant.size() == 0 || k == 0) return 0.0;
  const std::size_t n = std::min(k, ranked.size());
  double dcg = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (relevant.contains(ranked[j])) dcg += 1.0 / std::log2(static_cast<double>(j) + 2.0);
  double idcg = 0.0;
  const std::size_t ideal = std::min<std::size_t>(k, relevant.size());
  for (std::size_t j = 0; j < ideal; ++j) idcg += 1.0 / std::log2(static_cast<double>(j) + 2.0);
  return dcg / idcg;
}

// Fraction of (relevant, non-relevant) pairs ordered correctly, ties 1/2.
// Mann-Whitney form with mid-ranks; nullopt when either side is empty.
inline std::optional<double> auc_from_scores(std::span<const double> scores, const std::vector<bool>& relevant) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = k;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t n_rel = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi < n && scores[idx[hi]] == scores[idx[lo]]) ++hi;
    // 1-based mid-rank of the tie group [lo, hi)
    const double mid = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t k = lo; k < hi; ++k)
      if (relevant[idx[k]]) {
        rank_sum += mid;
        ++n_rel;
      }
    lo = hi;
  }
  const std::size_t n_non = n - n_rel;
  if (n_rel == 0 || n_non == 0) return std::nullopt;
  const double nr = static_cast<double>(n_rel);
  const double correct = rank_sum - nr * (nr + 1.0) / 2.0;
  return correct / (nr * static_cast<double>(n_non));
}

// ---------------------------------------------------------------------------
// Rankings

struct UserRanking {
  UserIndex user = 0;
  std::vector<ItemIndex> items;  // full candidate permutation
  Vec scores;                    // aligned with items
};

// Ranks every evaluable user. Work is split across threads by user index;
// the result order is the eval-user order regardless of thread count.
inline std::vector<UserRanking> rank_users(const Ranker& ranker, const Dataset& data, std::size_t threads = 1) {
  const auto users = data.corpus.eval_users();
  std::vector<UserRanking> out(users.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < users.size(); k += stride) {
      const auto ranked = ranker.rank_candidates(data, users[k]);
      UserRanking& r = out[k];
      r.user = users[k];
      r.items.reserve(ranked.size());
      r.scores.reserve(ranked.size());
      for (const auto& s : ranked) {
        r.items.push_back(s.item);
        r.scores.push_back(s.score);
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, users.size()));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          work(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

struct CutoffMetrics {
  std::size_t k = 0;
  double recall = 0.0;
  double precision = 0.0;
  double map = 0.0;
  double ndcg = 0.0;
};

struct EvalReport {
  std::string ranker;
  std::vector<CutoffMetrics> cutoffs;
  double auc = 0.0;
  std::size_t users_evaluated = 0;
  std::size_t auc_users = 0;
  std::size_t auc_skipped = 0;

  const CutoffMetrics& at(std::size_t k) const {
    for (const auto& c : cutoffs)
      if (c.k == k) return c;
    throw Error("no metrics for cutoff " + std::to_string(k));
  }
};

using ItemSetU = std::unordered_set<ItemIndex>;

// Mean recall@k over the users whose relevant set (after `restrict`) is
// nonempty. Shared by evaluate and the cold-start bins so the whole-set
// bin reproduces the headline recall bit for bit.
template <typename Restrict>
std::optional<double> mean_recall(std::span<const UserRanking> rankings, const Corpus& c, std::size_t k,
                                  Restrict&& restrict, std::size_t* users_counted = nullptr) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rankings) {
    ItemSetU rel;
    for (ItemIndex i : c.test_seq[r.user])
      if (restrict(i)) rel.insert(i);
    if (rel.empty()) continue;
    sum += recall_precision_at_k(std::span<const ItemIndex>(r.items), rel, k).recall;
    ++n;
  }
  if (users_counted) *users_counted = n;
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

inline EvalReport evaluate_rankings(std::span<const UserRanking> rankings, const Corpus& c, const EvalConfig& cfg,
                                    std::string name = {}) {
  cfg.validate();
  if (rankings.empty()) throw DataError("no evaluable users (every filtered test sequence is empty)");
  EvalReport rep;
  rep.ranker = std::move(name);
  rep.users_evaluated = rankings.size();
  auto all = [](ItemIndex) { return true; };
  for (std::size_t k : cfg.cutoffs) {
    CutoffMetrics m;
    m.k = k;
    m.recall = *mean_recall(rankings, c, k, all);
    double prec = 0.0, map = 0.0, ndcg = 0.0;
    for (const auto& r : rankings) {
      const ItemSetU rel(c.test_seq[r.user].begin(), c.test_seq[r.user].end());
      const std::span<const ItemIndex> ranked(r.items);
      prec += recall_precision_at_k(ranked, rel, k).precision;
      map += average_precision_at_k(ranked, rel, k);
      ndcg += ndcg_at_k(ranked, rel, k);
    }
    const auto n = static_cast<double>(rankings.size());
    m.precision = prec / n;
    m.map = map / n;
    m.ndcg = ndcg / n;
    rep.cutoffs.push_back(m);
  }
  double auc_sum = 0.0;
  for (const auto& r : rankings) {
    const ItemSetU rel(c.test_seq[r.user].begin(), c.test_seq[r.user].end());
    std::vector<bool> flags(r.items.size());
    for (std::size_t j = 0; j < r.items.size(); ++j) flags[j] = rel.contains(r.items[j]);
    auto a = auc_from_scores(r.scores, flags);
    if (!a) {
      ++rep.auc_skipped;
      continue;
    }
    auc_sum += *a;
    ++rep.auc_users;
  }
  rep.auc = rep.auc_users ? auc_sum / static_cast<double>(rep.auc_users) : 0.0;
  return rep;
}

inline EvalReport evaluate(const Ranker& ranker, const Dataset& data, const EvalConfig& cfg) {
  cfg.validate();
  const auto rankings = rank_users(ranker, data, cfg.threads);
  return evaluate_rankings(rankings, data.corpus, cfg, std::string(kind_name(ranker.kind())));
}

// ---------------------------------------------------------------------------
// Cold start

// Occurrences of each item across all filtered test sequences.
inline std::vector<std::size_t> test_frequencies(const Corpus& c) {
  std::vector<std::size_t> f(c.num_items(), 0);
  for (const auto& seq : c.test_seq)
    for (ItemIndex i : seq) ++f[i];
  return f;
}

struct GrowthCurve {
  std::string model;
  std::string baseline;
  std::vector<std::optional<double>> rate;  // nullopt: undefined in that bin
};

struct ColdStartReport {
  std::size_t k = 30;
  std::vector<std::string> bin_labels;      // "[1,2]", ..., "[all]"
  std::vector<std::size_t> bin_items;       // distinct test items per bin
  std::vector<std::string> rankers;
  std::vector<std::vector<std::optional<double>>> recall;  // [ranker][bin]
  std::vector<GrowthCurve> growth;

  const std::vector<std::optional<double>>& recall_of(const std::string& name) const {
    for (std::size_t r = 0; r < rankers.size(); ++r)
      if (rankers[r] == name) return recall[r];
    throw Error("no ranker named '" + name + "' in cold-start report");
  }
};

// (recall_A - recall_B) / recall_B, undefined when B is zero or missing.
inline std::optional<double> growth_rate(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b || *b == 0.0) return std::nullopt;
  return (*a - *b) / *b;
}

struct NamedRankings {
  std::string name;
  std::vector<UserRanking> rankings;
};

// pairs: (model, baseline) names for growth curves.
inline ColdStartReport cold_start_bins(const Corpus& c, std::span<const NamedRankings> rankers, std::size_t k,
                                       std::span<const std::size_t> bins,
                                       std::span<const std::pair<std::string, std::string>> pairs) {
  ColdStartReport rep;
  rep.k = k;
  const auto freq = test_frequencies(c);
  std::vector<std::optional<std::size_t>> bounds(bins.begin(), bins.end());
  bounds.push_back(std::nullopt);
  for (const auto& b : bounds) {
    rep.bin_labels.push_back(b ? "[1," + std::to_string(*b) + "]" : "[all]");
    std::size_t n = 0;
    for (std::size_t f : freq)
      if (f > 0 && (!b || f <= *b)) ++n;
    rep.bin_items.push_back(n);
  }
  for (const auto& nr : rankers) {
    rep.rankers.push_back(nr.name);
    std::vector<std::optional<double>> row;
    for (const auto& b : bounds) {
      if (!b) {
        row.push_back(mean_recall(nr.rankings, c, k, [](ItemIndex) { return true; }));
      } else {
        const std::size_t bound = *b;
        row.push_back(mean_recall(nr.rankings, c, k, [&](ItemIndex i) { return freq[i] <= bound; }));
      }
    }
    rep.recall.push_back(std::move(row));
  }
  for (const auto& [model, base] : pairs) {
    GrowthCurve g{model, base, {}};
    const auto& a = rep.recall_of(model);
    const auto& b = rep.recall_of(base);
    for (std::size_t j = 0; j < bounds.size(); ++j) g.rate.push_back(growth_rate(a[j], b[j]));
    rep.growth.push_back(std::move(g));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["ranker"] = r.ranker;
  j["users_evaluated"] = r.users_evaluated;
  j["auc"] = r.auc;
  j["auc_percent"] = 100.0 * r.auc;
  j["auc_users"] = r.auc_users;
  j["auc_skipped"] = r.auc_skipped;
  j["metrics"] = nlohmann::json::array();
  for (const auto& m : r.cutoffs) {
    j["metrics"].push_back({{"k", m.k},
                            {"recall", m.recall},
                            {"precision", m.precision},
                            {"map", m.map},
                            {"ndcg", m.ndcg},
                            {"recall_percent", 100.0 * m.recall},
                            {"precision_percent", 100.0 * m.precision},
                            {"map_percent", 100.0 * m.map},
                            {"ndcg_percent", 100.0 * m.ndcg}});
  }
  return j;
}

namespace detail {
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

// ranker,k,metric,value,percent ; AUC rows carry an empty k.
inline void write_csv_header(std::ostream& out) { out << "ranker,k,metric,value,percent\n"; }

inline void write_csv(std::ostream& out, const EvalReport& r) {
  for (const auto& m : r.cutoffs) {
    const std::pair<const char*, double> rows[] = {
        {"recall", m.recall}, {"precision", m.precision}, {"map", m.map}, {"ndcg", m.ndcg}};
    for (const auto& [name, v] : rows)
      out << r.ranker << ',' << m.k << ',' << name << ',' << detail::csv_number(v) << ','
          << detail::csv_number(100.0 * v) << '\n';
  }
  out << r.ranker << ",,auc," << detail::csv_number(r.auc) << ',' << detail::csv_number(100.0 * r.auc) << '\n';
}

inline nlohmann::json to_json(const ColdStartReport& r) {
  nlohmann::json j;
  j["k"] = r.k;
  j["bins"] = r.bin_labels;
  j["bin_items"] = r.bin_items;
  j["recall"] = nlohmann::json::object();
  for (std::size_t k = 0; k < r.rankers.size(); ++k) {
    auto arr = nlohmann::json::array();
    for (const auto& v : r.recall[k]) arr.push_back(optional_json(v));
    j["recall"][r.rankers[k]] = arr;
  }
  j["growth"] = nlohmann::json::array();
  for (const auto& g : r.growth) {
    auto arr = nlohmann::json::array();
    for (const auto& v : g.rate) arr.push_back(optional_json(v));
    j["growth"].push_back({{"model", g.model}, {"baseline", g.baseline}, {"rate", arr}});
  }
  return j;
}

// series,bin,k,kind,value ; kind is "recall" or "growth"; undefined values
// are written as an empty field.
inline void write_csv(std::ostream& out, const ColdStartReport& r) {
  out << "series,bin,k,kind,value\n";
  auto val = [](const std::optional<double>& v) { return v ? detail::csv_number(*v) : std::string(); };
  for (std::size_t k = 0; k < r.rankers.size(); ++k)
    for (std::size_t b = 0; b < r.bin_labels.size(); ++b)
      out << r.rankers[k] << ",\"" << r.bin_labels[b] << "\"," << r.k << ",recall," << val(r.recall[k][b]) << '\n';
  for (const auto& g : r.growth)
    for (std::size_t b = 0; b < r.bin_labels.size(); ++b)
      out << g.model << '/' << g.baseline << ",\"" << r.bin_labels[b] << "\"," << r.k << ",growth," << val(g.rate[b])
          << '\n';
}

}  // namespace seqrank

#endif  // SEQRANK_EVALUATOR_HPP_
