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

#ifndef SEQRANK_DATAIO_HPP_
#define SEQRANK_DATAIO_HPP_

// Interaction sequences, item feature tables, the chronological split with
// new-item test filtering, and negative sampling.
//
// Sequence file: one line per user, `user_id<TAB>item,item,...` in
// chronological order. Feature file: `#dims <F>` then `item_id<TAB>f1 ... fF`.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "seqrank/error.hpp"
#include "seqrank/numkit.hpp"

namespace seqrank {

using UserIndex = std::size_t;
using ItemIndex = std::size_t;

struct RawSequences {
  std::vector<std::string> user_ids;
  std::vector<std::vector<std::string>> items;

  std::size_t size() const { return user_ids.size(); }
};

// Users and items are dense indices. Items are numbered in ascending id
// order, so comparing item indices is the same as comparing ids.
class Corpus {
 public:
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::vector<std::vector<ItemIndex>> train_seq;
  std::vector<std::vector<ItemIndex>> test_seq;

  std::size_t num_users() const { return user_ids.size(); }
  std::size_t num_items() const { return item_ids.size(); }

  // Rebuilds the id lookups and per-user owned-item sets. Call after
  // mutating any of the public vectors.
  void reindex() {
    item_lookup_.clear();
    user_lookup_.clear();
    for (std::size_t i = 0; i < item_ids.size(); ++i) item_lookup_.emplace(item_ids[i], i);
    for (std::size_t u = 0; u < user_ids.size(); ++u) user_lookup_.emplace(user_ids[u], u);
    owned_.assign(train_seq.size(), {});
    for (std::size_t u = 0; u < train_seq.size(); ++u) {
      auto& s = owned_[u];
      s = train_seq[u];
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
  }

  std::optional<ItemIndex> find_item(std::string_view id) const {
    auto it = item_lookup_.find(std::string(id));
    if (it == item_lookup_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<UserIndex> find_user(std::string_view id) const {
    auto it = user_lookup_.find(std::string(id));
    if (it == user_lookup_.end()) return std::nullopt;
    return it->second;
  }

  UserIndex user(std::string_view id) const {
    auto u = find_user(id);
    if (!u) throw DataError("unknown user '" + std::string(id) + "'");
    return *u;
  }

  // True when item i occurs anywhere in the user's training sequence.
  bool owns(UserIndex u, ItemIndex i) const {
    const auto& s = owned_.at(u);
    return std::binary_search(s.begin(), s.end(), i);
  }

  // Distinct training items of u, ascending.
  const std::vector<ItemIndex>& owned(UserIndex u) const { return owned_.at(u); }

  // I \ I^u in ascending index order.
  std::vector<ItemIndex> candidates(UserIndex u) const {
    std::vector<ItemIndex> out;
    const auto& s = owned_.at(u);
    out.reserve(num_items() - s.size());
    std::size_t k = 0;
    for (ItemIndex i = 0; i < num_items(); ++i) {
      if (k < s.size() && s[k] == i) {
        ++k;
        continue;
      }
      out.push_back(i);
    }
    return out;
  }

  // Users with a nonempty (filtered) test sequence.
  std::vector<UserIndex> eval_users() const {
    std::vector<UserIndex> out;
    for (UserIndex u = 0; u < test_seq.size(); ++u)
      if (!test_seq[u].empty()) out.push_back(u);
    return out;
  }

 private:
  std::unordered_map<std::string, ItemIndex> item_lookup_;
  std::unordered_map<std::string, UserIndex> user_lookup_;
  std::vector<std::vector<ItemIndex>> owned_;
};

// Raw (unnormalized or normalized) feature rows keyed by item id.
struct FeatureTable {
  std::size_t dims = 0;
  std::vector<std::string> ids;
  std::vector<Vec> rows;
};

// Per-item feature vectors aligned with Corpus item indices.
struct FeatureStore {
  Mat visual;   // |I| x F_v
  Mat textual;  // |I| x F_t
  std::size_t missing_visual = 0;
  std::size_t missing_textual = 0;
  std::vector<std::string> warnings;

  std::size_t visual_dim() const { return visual.cols(); }
  std::size_t textual_dim() const { return textual.cols(); }
};

struct Dataset {
  Corpus corpus;
  FeatureStore features;
};

struct TrainingTriple {
  UserIndex user = 0;
  std::size_t pos = 0;  // 0-based position of p in train_seq[user]; always >= 1
  ItemIndex p = 0;
  ItemIndex q = 0;

  bool operator==(const TrainingTriple&) const = default;
};

// ---------------------------------------------------------------------------
// Sequence files

inline RawSequences parse_sequences(std::istream& in, const std::string& source = "<stream>") {
  RawSequences raw;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, lineno, "expected user_id<TAB>items");
    std::string user = line.substr(0, tab);
    if (user.empty()) throw ParseError(source, lineno, "empty user id");
    if (!seen.insert(user).second) throw ParseError(source, lineno, "duplicate user '" + user + "'");
    std::vector<std::string> items;
    std::string_view rest(line);
    rest.remove_prefix(tab + 1);
    while (true) {
      const auto comma = rest.find(',');
      std::string_view tok = rest.substr(0, comma);
      if (tok.empty()) throw ParseError(source, lineno, "empty item id");
      items.emplace_back(tok);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    raw.user_ids.push_back(std::move(user));
    raw.items.push_back(std::move(items));
  }
  return raw;
}

inline RawSequences read_sequences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open sequence file '" + path + "'");
  return parse_sequences(in, path);
}

inline void write_sequences(std::ostream& out, const RawSequences& raw) {
  for (std::size_t u = 0; u < raw.size(); ++u) {
    out << raw.user_ids[u] << '\t';
    for (std::size_t k = 0; k < raw.items[u].size(); ++k) {
      if (k) out << ',';
      out << raw.items[u][k];
    }
    out << '\n';
  }
}

// Number of leading items assigned to training: ceil(frac * n), at least 2
// and at most n. The epsilon absorbs products like 0.7 * 10 = 7.000000000000001.
inline std::size_t train_length(std::size_t n, double split_frac) {
  const double x = split_frac * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(x - 1e-9));
  k = std::max<std::size_t>(k, 2);
  return std::min(k, n);
}

// Drops short users and splits each sequence chronologically. The test
// sequences are left unfiltered.
inline Corpus split_corpus(const RawSequences& raw, std::size_t min_len, double split_frac) {
  if (!(split_frac > 0.0 && split_frac < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
  if (min_len < 2) throw ConfigError("min_len must be at least 2");

  std::vector<std::size_t> kept;
  std::vector<std::string> ids;
  for (std::size_t u = 0; u < raw.size(); ++u) {
    if (raw.items[u].size() < min_len) continue;
    kept.push_back(u);
    ids.insert(ids.end(), raw.items[u].begin(), raw.items[u].end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  Corpus c;
  c.item_ids = std::move(ids);
  c.reindex();  // item lookup needed below
  for (std::size_t u : kept) {
    const auto& seq = raw.items[u];
    const std::size_t n_train = train_length(seq.size(), split_frac);
    std::vector<ItemIndex> train, test;
    for (std::size_t k = 0; k < seq.size(); ++k)
      (k < n_train ? train : test).push_back(*c.find_item(seq[k]));
    c.user_ids.push_back(raw.user_ids[u]);
    c.train_seq.push_back(std::move(train));
    c.test_seq.push_back(std::move(test));
  }
  c.reindex();
  return c;
}

// Keeps only items new to each user: drops test items already in the
// training sequence, then duplicates (first occurrence wins).
inline Corpus filter_test_new_items(Corpus c) {
  for (UserIndex u = 0; u < c.num_users(); ++u) {
    std::vector<ItemIndex> kept;
    for (ItemIndex i : c.test_seq[u]) {
      if (c.owns(u, i)) continue;
      if (std::find(kept.begin(), kept.end(), i) != kept.end()) continue;
      kept.push_back(i);
    }
    c.test_seq[u] = std::move(kept);
  }
  return c;
}

inline Corpus build_corpus(const RawSequences& raw, std::size_t min_len, double split_frac) {
  Corpus c = filter_test_new_items(split_corpus(raw, min_len, split_frac));
  if (c.num_users() == 0) throw DataError("empty corpus after filtering");
  return c;
}

inline Corpus load_corpus(const std::string& seq_path, std::size_t min_len, double split_frac) {
  return build_corpus(read_sequences(seq_path), min_len, split_frac);
}

// ---------------------------------------------------------------------------
// Feature files

inline double parse_double(std::string_view tok, const std::string& source, std::size_t lineno) {
  double v = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError(source, lineno, "non-numeric token '" + std::string(tok) + "'");
  return v;
}

inline FeatureTable parse_features(std::istream& in, std::size_t expect_dim,
                                   const std::string& source = "<stream>") {
  FeatureTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      std::istringstream hs(line);
      std::string tag;
      long long dims = -1;
      if (!(hs >> tag >> dims) || tag != "#dims" || dims < 0)
        throw ParseError(source, lineno, "expected header '#dims <F>'");
      if (static_cast<std::size_t>(dims) != expect_dim)
        throw ParseError(source, lineno,
                         "declared dimension " + std::to_string(dims) + " != expected " +
                             std::to_string(expect_dim));
      t.dims = expect_dim;
      header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, lineno, "expected item_id<TAB>values");
    std::string id = line.substr(0, tab);
    if (!seen.insert(id).second) throw ParseError(source, lineno, "duplicate item '" + id + "'");
    Vec row;
    row.reserve(t.dims);
    std::string_view rest(line);
    rest.remove_prefix(tab + 1);
    while (!rest.empty()) {
      const auto sp = rest.find(' ');
      std::string_view tok = rest.substr(0, sp);
      if (!tok.empty()) row.push_back(parse_double(tok, source, lineno));
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    if (row.size() != t.dims)
      throw ParseError(source, lineno,
                       "row has " + std::to_string(row.size()) + " values, expected " +
                           std::to_string(t.dims));
    t.ids.push_back(std::move(id));
    t.rows.push_back(std::move(row));
  }
  if (!header) throw ParseError(source, lineno, "missing '#dims' header");
  return t;
}

// Per-dimension min-max rescaling onto [lo, hi] over every row of the table.
// Constant dimensions map to lo.
inline void normalize_min_max(FeatureTable& t, double lo, double hi) {
  for (std::size_t d = 0; d < t.dims; ++d) {
    if (t.rows.empty()) return;
    double mn = t.rows.front()[d], mx = mn;
    for (const auto& r : t.rows) {
      mn = std::min(mn, r[d]);
      mx = std::max(mx, r[d]);
    }
    for (auto& r : t.rows) {
      if (mx == mn) {
        r[d] = lo;
      } else {
        r[d] = lo + (hi - lo) * (r[d] - mn) / (mx - mn);
      }
    }
  }
}

inline FeatureTable load_features(const std::string& path, std::size_t expect_dim, double lo,
                                  double hi) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature file '" + path + "'");
  FeatureTable t = parse_features(in, expect_dim, path);
  normalize_min_max(t, lo, hi);
  return t;
}

inline void write_features(std::ostream& out, const FeatureTable& t) {
  out << "#dims " << t.dims << '\n';
  out << std::setprecision(17);
  for (std::size_t k = 0; k < t.ids.size(); ++k) {
    out << t.ids[k] << '\t';
    for (std::size_t d = 0; d < t.dims; ++d) {
      if (d) out << ' ';
      out << t.rows[k][d];
    }
    out << '\n';
  }
}

namespace detail {
inline Mat align_features(const Corpus& c, const FeatureTable* table, std::size_t& missing) {
  const std::size_t dims = table ? table->dims : 0;
  Mat m(c.num_items(), dims);
  missing = 0;
  if (!table || dims == 0) return m;
  std::vector<bool> filled(c.num_items(), false);
  for (std::size_t k = 0; k < table->ids.size(); ++k) {
    auto i = c.find_item(table->ids[k]);
    if (!i) continue;
    std::copy(table->rows[k].begin(), table->rows[k].end(), m.row(*i).begin());
    filled[*i] = true;
  }
  missing = static_cast<std::size_t>(std::count(filled.begin(), filled.end(), false));
  return m;
}
}  // namespace detail

// Aligns feature tables to the corpus item order. Items without a row get a
// zero vector and are counted in the store's missing_* fields. A null table
// means the slice is absent (dimension 0).
inline FeatureStore attach_features(const Corpus& c, const FeatureTable* visual,
                                    const FeatureTable* textual) {
  FeatureStore fs;
  fs.visual = detail::align_features(c, visual, fs.missing_visual);
  fs.textual = detail::align_features(c, textual, fs.missing_textual);
  if (fs.missing_visual)
    fs.warnings.push_back(std::to_string(fs.missing_visual) +
                          " item(s) lack visual features; zero vectors substituted");
  if (fs.missing_textual)
    fs.warnings.push_back(std::to_string(fs.missing_textual) +
                          " item(s) lack textual features; zero vectors substituted");
  return fs;
}

// ---------------------------------------------------------------------------
// Negative sampling

// One triple per training position 1..m-1 (0-based) with a negative drawn
// uniformly from I \ I^u by rejection.
inline std::vector<TrainingTriple> sample_triples(const Corpus& c, UserIndex u, Rng& rng) {
  const auto& seq = c.train_seq.at(u);
  std::vector<TrainingTriple> out;
  if (seq.size() < 2) return out;
  if (c.owned(u).size() >= c.num_items())
    throw SamplingError("user '" + c.user_ids[u] + "' owns every item; no negative available");
  out.reserve(seq.size() - 1);
  for (std::size_t pos = 1; pos < seq.size(); ++pos) {
    ItemIndex q;
    do {
      q = rng.index(c.num_items());
    } while (c.owns(u, q));
    out.push_back({u, pos, seq[pos], q});
  }
  return out;
}

}  // namespace seqrank

#endif  // SEQRANK_DATAIO_HPP_
