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

#ifndef SEQRANK_MODEL_HPP_
#define SEQRANK_MODEL_HPP_

// Forward computation of the visual/textual recurrent ranker.
//
// An item is represented by the concatenation [x_i; E f_i; V g_i] of its
// latent row, embedded visual features and embedded textual features (each
// slice d wide, inactive slices omitted). The user state evolves as
// h^t = sigmoid(InMat i^t + RecMat h^{t-1}) with h^0 = 0, and the
// preference for p over q after t-1 steps is h^{t-1} . (i_p - i_q).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqrank/dataio.hpp"
#include "seqrank/error.hpp"
#include "seqrank/numkit.hpp"

namespace seqrank {

enum class Slice { kLatent = 0, kVisual = 1, kTextual = 2 };

struct FeatureMask {
  bool latent = true;
  bool visual = true;
  bool textual = true;

  bool has(Slice s) const {
    switch (s) {
      case Slice::kLatent: return latent;
      case Slice::kVisual: return visual;
      case Slice::kTextual: return textual;
    }
    return false;
  }
  std::size_t count() const { return std::size_t{latent} + visual + textual; }

  std::uint8_t bits() const {
    return static_cast<std::uint8_t>((latent ? 1 : 0) | (visual ? 2 : 0) | (textual ? 4 : 0));
  }
  static FeatureMask from_bits(std::uint8_t b) { return {(b & 1) != 0, (b & 2) != 0, (b & 4) != 0}; }

  static FeatureMask latent_only() { return {true, false, false}; }
  static FeatureMask all() { return {true, true, true}; }

  bool operator==(const FeatureMask&) const = default;
};

struct Hyper {
  std::size_t d = 20;
  std::size_t visual_dim = 0;
  std::size_t textual_dim = 0;
  FeatureMask mask;
  double alpha = 0.1;
  double lambda_theta = 0.001;
  double lambda_e = 0.001;
  double lambda_v = 0.001;
  double init_lo = -0.5;
  double init_hi = 0.5;

  // D: width of item inputs and hidden states.
  std::size_t width() const { return d * mask.count(); }

  // Offset of a slice inside a D-wide vector, or nullopt when inactive.
  std::optional<std::size_t> offset(Slice s) const {
    if (!mask.has(s)) return std::nullopt;
    std::size_t off = 0;
    if (s != Slice::kLatent && mask.latent) off += d;
    if (s == Slice::kTextual && mask.visual) off += d;
    return off;
  }

  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (d < 1) out.push_back("d must be at least 1");
    if (mask.count() == 0) out.push_back("feature mask selects no slice");
    if (!(alpha >= 0.0)) out.push_back("alpha must be non-negative");
    if (!(lambda_theta >= 0.0 && lambda_e >= 0.0 && lambda_v >= 0.0))
      out.push_back("regularizers must be non-negative");
    if (!(init_lo <= init_hi)) out.push_back("init_lo must not exceed init_hi");
    if (mask.visual && visual_dim == 0) out.push_back("visual slice active but visual_dim is 0");
    if (mask.textual && textual_dim == 0) out.push_back("textual slice active but textual_dim is 0");
    return out;
  }

  void validate() const {
    auto p = problems();
    if (p.empty()) return;
    std::string msg = "invalid hyperparameters:";
    for (const auto& s : p) msg += "\n  - " + s;
    throw ConfigError(msg);
  }
};

inline std::span<const double> slice_of(std::span<const double> full, const Hyper& h, Slice s) {
  auto off = h.offset(s);
  if (!off) return {};
  return full.subspan(*off, h.d);
}

// Parameter blocks. Blocks belonging to inactive slices are empty; InMat and
// RecMat are D x D.
struct ModelParams {
  Mat X;       // |I| x d   latent item rows
  Mat E;       // d x F_v   visual embedding
  Mat V;       // d x F_t   textual embedding
  Mat InMat;   // D x D     input-to-hidden transition
  Mat RecMat;  // D x D     hidden-to-hidden recurrence

  bool operator==(const ModelParams&) const = default;

  bool all_finite() const {
    return seqrank::all_finite(X.flat()) && seqrank::all_finite(E.flat()) &&
           seqrank::all_finite(V.flat()) && seqrank::all_finite(InMat.flat()) &&
           seqrank::all_finite(RecMat.flat());
  }

  double squared_norm() const {
    return seqrank::squared_norm(X.flat()) + seqrank::squared_norm(E.flat()) +
           seqrank::squared_norm(V.flat()) + seqrank::squared_norm(InMat.flat()) +
           seqrank::squared_norm(RecMat.flat());
  }
};

struct ItemInput {
  Vec full;
  std::span<const double> slice(const Hyper& h, Slice s) const { return slice_of(full, h, s); }
};

struct HiddenState {
  Vec full;
  std::span<const double> slice(const Hyper& h, Slice s) const { return slice_of(full, h, s); }
  static HiddenState zero(std::size_t width) { return {Vec(width, 0.0)}; }
};

struct PairScore {
  double value = 0.0;  // pos_score - neg_score
  double pos_score = 0.0;
  double neg_score = 0.0;
};

struct ScoredItem {
  ItemIndex item = 0;
  double score = 0.0;
  bool operator==(const ScoredItem&) const = default;
};

namespace detail {
inline void fill_uniform(Mat& m, const Hyper& h, Rng& rng) {
  for (double& v : m.flat()) v = rng.uniform(h.init_lo, h.init_hi);
}
}  // namespace detail

// Entries i.i.d. uniform on [init_lo, init_hi], drawn in the fixed order
// X, InMat, RecMat, E, V so that inactive content slices do not disturb the
// stream seen by the others.
inline ModelParams init_params(const Hyper& h, std::size_t n_items, Rng& rng) {
  h.validate();
  const std::size_t D = h.width();
  ModelParams p;
  if (h.mask.latent) p.X = Mat(n_items, h.d);
  p.InMat = Mat(D, D);
  p.RecMat = Mat(D, D);
  if (h.mask.visual) p.E = Mat(h.d, h.visual_dim);
  if (h.mask.textual) p.V = Mat(h.d, h.textual_dim);
  detail::fill_uniform(p.X, h, rng);
  detail::fill_uniform(p.InMat, h, rng);
  detail::fill_uniform(p.RecMat, h, rng);
  detail::fill_uniform(p.E, h, rng);
  detail::fill_uniform(p.V, h, rng);
  return p;
}

// Item representation restricted to the active slices. Only X, E and V are
// read from params.
inline ItemInput item_input(ItemIndex item, const ModelParams& params, const FeatureStore& feats,
                            const Hyper& h) {
  ItemInput in;
  in.full.reserve(h.width());
  if (h.mask.latent) {
    if (item >= params.X.rows())
      throw DataError("unknown item index " + std::to_string(item));
    auto row = params.X.row(item);
    in.full.insert(in.full.end(), row.begin(), row.end());
  }
  if (h.mask.visual) {
    if (item >= feats.visual.rows()) throw DataError("no visual features for item " + std::to_string(item));
    auto e = matvec(params.E, feats.visual.row(item));
    in.full.insert(in.full.end(), e.begin(), e.end());
  }
  if (h.mask.textual) {
    if (item >= feats.textual.rows()) throw DataError("no textual features for item " + std::to_string(item));
    auto e = matvec(params.V, feats.textual.row(item));
    in.full.insert(in.full.end(), e.begin(), e.end());
  }
  return in;
}

inline HiddenState step_hidden(const HiddenState& prev, const ItemInput& inp, const ModelParams& params) {
  Vec a = matvec(params.InMat, inp.full);
  Vec b = matvec(params.RecMat, prev.full);
  HiddenState next{std::move(a)};
  for (std::size_t k = 0; k < next.full.size(); ++k) next.full[k] = sigmoid(next.full[k] + b[k]);
  return next;
}

// Inputs and states of one pass over a sequence: states[k] is the state
// after consuming items[k].
struct SequenceTrace {
  std::vector<ItemInput> inputs;
  std::vector<HiddenState> states;
};

inline SequenceTrace trace_sequence(std::span<const ItemIndex> items, const ModelParams& params,
                                    const FeatureStore& feats, const Hyper& h) {
  SequenceTrace tr;
  tr.inputs.reserve(items.size());
  tr.states.reserve(items.size());
  HiddenState prev = HiddenState::zero(h.width());
  for (ItemIndex i : items) {
    tr.inputs.push_back(item_input(i, params, feats, h));
    prev = step_hidden(prev, tr.inputs.back(), params);
    tr.states.push_back(prev);
  }
  return tr;
}

inline std::vector<HiddenState> run_sequence(UserIndex u, const ModelParams& params, const FeatureStore& feats,
                                             const Corpus& corpus, const Hyper& h) {
  if (u >= corpus.num_users()) throw DataError("unknown user index " + std::to_string(u));
  return trace_sequence(corpus.train_seq[u], params, feats, h).states;
}

inline PairScore score_pair(const HiddenState& prev, const ItemInput& p_inp, const ItemInput& q_inp) {
  PairScore s;
  s.pos_score = dot(prev.full, p_inp.full);
  s.neg_score = dot(prev.full, q_inp.full);
  s.value = s.pos_score - s.neg_score;
  return s;
}

// Sorts candidates by descending score, ties by ascending item index.
inline std::vector<ScoredItem> rank_scored(std::span<const ItemIndex> candidates, std::span<const double> scores) {
  std::vector<ScoredItem> out;
  out.reserve(candidates.size());
  for (ItemIndex i : candidates) out.push_back({i, scores[i]});
  std::sort(out.begin(), out.end(), [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  });
  return out;
}

// Catalog-wide scores h^m . i for the user's final training state.
inline Vec score_all_items(UserIndex u, const ModelParams& params, const FeatureStore& feats,
                           const Corpus& corpus, const Hyper& h) {
  const auto& seq = corpus.train_seq.at(u);
  if (seq.empty()) throw DataError("user '" + corpus.user_ids[u] + "' has no training sequence");
  const auto states = run_sequence(u, params, feats, corpus, h);
  const HiddenState& last = states.back();
  Vec scores(corpus.num_items());
  for (ItemIndex i = 0; i < corpus.num_items(); ++i) scores[i] = dot(last.full, item_input(i, params, feats, h).full);
  return scores;
}

inline std::vector<ScoredItem> rank_candidates(UserIndex u, const ModelParams& params, const FeatureStore& feats,
                                               const Corpus& corpus, const Hyper& h) {
  const Vec scores = score_all_items(u, params, feats, corpus, h);
  const auto cand = corpus.candidates(u);
  return rank_scored(cand, scores);
}

}  // namespace seqrank

#endif  // SEQRANK_MODEL_HPP_
