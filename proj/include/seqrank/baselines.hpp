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

#ifndef SEQRANK_BASELINES_HPP_
#define SEQRANK_BASELINES_HPP_

// The comparison ladder behind one ranking interface: Random, POP,
// pointwise MF, BPR-MF, content BPR (VBPR/T-BPR/VT-BPR) and the recurrent
// rankers (RNN/V-RNN/T-RNN/VT-RNN).

#include <algorithm>
#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "seqrank/checkpoint.hpp"
#include "seqrank/dataio.hpp"
#include "seqrank/error.hpp"
#include "seqrank/model.hpp"
#include "seqrank/numkit.hpp"
#include "seqrank/trainer.hpp"

namespace seqrank {

enum class RankerKind { kRandom, kPop, kMF, kBPR, kVBPR, kTBPR, kVTBPR, kRNN, kVRNN, kTRNN, kVTRNN };

inline constexpr std::array<RankerKind, 11> kAllRankerKinds = {
    RankerKind::kRandom, RankerKind::kPop,   RankerKind::kMF,   RankerKind::kBPR,
    RankerKind::kVBPR,   RankerKind::kTBPR,  RankerKind::kVTBPR, RankerKind::kRNN,
    RankerKind::kVRNN,   RankerKind::kTRNN,  RankerKind::kVTRNN};

inline std::string_view kind_name(RankerKind k) {
  switch (k) {
    case RankerKind::kRandom: return "random";
    case RankerKind::kPop: return "pop";
    case RankerKind::kMF: return "mf";
    case RankerKind::kBPR: return "bpr";
    case RankerKind::kVBPR: return "vbpr";
    case RankerKind::kTBPR: return "tbpr";
    case RankerKind::kVTBPR: return "vtbpr";
    case RankerKind::kRNN: return "rnn";
    case RankerKind::kVRNN: return "vrnn";
    case RankerKind::kTRNN: return "trnn";
    case RankerKind::kVTRNN: return "vtrnn";
  }
  return "?";
}

inline RankerKind parse_kind(std::string_view name) {
  for (RankerKind k : kAllRankerKinds)
    if (kind_name(k) == name) return k;
  throw ConfigError("unknown model kind '" + std::string(name) +
                    "' (expected random, pop, mf, bpr, vbpr, tbpr, vtbpr, rnn, vrnn, trnn or vtrnn)");
}

inline bool is_recurrent(RankerKind k) {
  return k == RankerKind::kRNN || k == RankerKind::kVRNN || k == RankerKind::kTRNN || k == RankerKind::kVTRNN;
}

inline bool is_content_bpr(RankerKind k) {
  return k == RankerKind::kVBPR || k == RankerKind::kTBPR || k == RankerKind::kVTBPR;
}

// Active item-representation slices for a kind.
inline FeatureMask mask_for(RankerKind k) {
  switch (k) {
    case RankerKind::kVBPR:
    case RankerKind::kVRNN: return {true, true, false};
    case RankerKind::kTBPR:
    case RankerKind::kTRNN: return {true, false, true};
    case RankerKind::kVTBPR:
    case RankerKind::kVTRNN: return FeatureMask::all();
    default: return FeatureMask::latent_only();
  }
}

inline double default_alpha(RankerKind k) { return k == RankerKind::kMF ? 0.01 : 0.1; }

// ---------------------------------------------------------------------------
// Ranker interface

class Ranker {
 public:
  virtual ~Ranker() = default;

  virtual RankerKind kind() const = 0;

  // Scores for every catalog item, index-aligned. Higher ranks first.
  virtual Vec score_items(const Dataset& data, UserIndex u) const = 0;

  virtual Checkpoint to_checkpoint(const Dataset& data) const = 0;

  // Full permutation of I \ I^u, descending score, ties by item index.
  std::vector<ScoredItem> rank_candidates(const Dataset& data, UserIndex u) const {
    const Vec scores = score_items(data, u);
    const auto cand = data.corpus.candidates(u);
    return rank_scored(cand, scores);
  }

 protected:
  Checkpoint checkpoint_header(const Dataset& data, const Hyper& h) const {
    Checkpoint ck;
    ck.kind = std::string(kind_name(kind()));
    ck.d = static_cast<std::uint32_t>(h.d);
    ck.visual_dim = static_cast<std::uint32_t>(h.visual_dim);
    ck.textual_dim = static_cast<std::uint32_t>(h.textual_dim);
    ck.mask = h.mask.bits();
    ck.item_ids = data.corpus.item_ids;
    ck.user_ids = data.corpus.user_ids;
    return ck;
  }
};

// Uniform random scores, reproducible per (seed, user) regardless of the
// order in which users are scored.
class RandomRanker final : public Ranker {
 public:
  explicit RandomRanker(std::uint64_t seed) : seed_(seed) {}

  RankerKind kind() const override { return RankerKind::kRandom; }

  Vec score_items(const Dataset& data, UserIndex u) const override {
    Rng rng(mix_seed(seed_) ^ mix_seed(static_cast<std::uint64_t>(u) + 1));
    Vec s(data.corpus.num_items());
    for (double& v : s) v = rng.uniform01();
    return s;
  }

  Checkpoint to_checkpoint(const Dataset& data) const override {
    Hyper h;
    h.d = 0;
    h.mask = {false, false, false};
    Checkpoint ck = checkpoint_header(data, h);
    ck.seed = seed_;
    return ck;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Training-set interaction counts.
class PopRanker final : public Ranker {
 public:
  explicit PopRanker(Vec counts) : counts_(std::move(counts)) {}

  static PopRanker fit(const Corpus& c) {
    Vec counts(c.num_items(), 0.0);
    for (const auto& seq : c.train_seq)
      for (ItemIndex i : seq) counts[i] += 1.0;
    return PopRanker(std::move(counts));
  }

  RankerKind kind() const override { return RankerKind::kPop; }

  Vec score_items(const Dataset& data, UserIndex) const override {
    if (counts_.size() != data.corpus.num_items()) throw DataError("pop ranker: catalog size mismatch");
    return counts_;
  }

  Checkpoint to_checkpoint(const Dataset& data) const override {
    Hyper h;
    h.d = 0;
    h.mask = {false, false, false};
    Checkpoint ck = checkpoint_header(data, h);
    Mat m(1, counts_.size());
    std::copy(counts_.begin(), counts_.end(), m.flat().begin());
    ck.blocks.emplace_back("Pop", std::move(m));
    return ck;
  }

 private:
  Vec counts_;
};

// ---------------------------------------------------------------------------
// Matrix factorization (pointwise MF and BPR-MF)

struct FactorModel {
  Mat gamma;  // |U| x d
  Mat X;      // |I| x d

  bool operator==(const FactorModel&) const = default;
  double squared_norm() const { return seqrank::squared_norm(gamma.flat()) + seqrank::squared_norm(X.flat()); }
  bool all_finite() const { return seqrank::all_finite(gamma.flat()) && seqrank::all_finite(X.flat()); }
};

inline FactorModel init_factor_model(const Hyper& h, std::size_t n_users, std::size_t n_items, Rng& rng) {
  FactorModel m{Mat(n_users, h.d), Mat(n_items, h.d)};
  detail::fill_uniform(m.gamma, h, rng);
  detail::fill_uniform(m.X, h, rng);
  return m;
}

class FactorRanker final : public Ranker {
 public:
  FactorRanker(RankerKind kind, Hyper h, FactorModel model) : kind_(kind), h_(h), model_(std::move(model)) {}

  RankerKind kind() const override { return kind_; }

  Vec score_items(const Dataset& data, UserIndex u) const override {
    Vec s(data.corpus.num_items());
    for (ItemIndex i = 0; i < s.size(); ++i) s[i] = dot(model_.gamma.row(u), model_.X.row(i));
    return s;
  }

  Checkpoint to_checkpoint(const Dataset& data) const override {
    Checkpoint ck = checkpoint_header(data, h_);
    ck.blocks.emplace_back("Gamma", model_.gamma);
    ck.blocks.emplace_back("X", model_.X);
    return ck;
  }

  const FactorModel& model() const { return model_; }

 private:
  RankerKind kind_;
  Hyper h_;
  FactorModel model_;
};

// Gradient of ln sigma(gamma_u . (x_p - x_q)) in a FactorModel-shaped
// container (only row u of gamma and rows p, q of X are nonzero).
inline double bpr_mf_accumulate_gradient(const FactorModel& m, const TrainingTriple& t, FactorModel& grad) {
  auto g = m.gamma.row(t.user);
  auto xp = m.X.row(t.p);
  auto xq = m.X.row(t.q);
  const double x_hat = dot(g, xp) - dot(g, xq);
  const double c = sigmoid(-x_hat);
  auto gg = grad.gamma.row(t.user);
  for (std::size_t k = 0; k < g.size(); ++k) gg[k] += c * (xp[k] - xq[k]);
  axpy(c, g, grad.X.row(t.p));
  axpy(-c, g, grad.X.row(t.q));
  return x_hat;
}

// One stochastic ascent step; returns x_hat before the update.
inline double bpr_mf_step(FactorModel& m, const TrainingTriple& t, const Hyper& h) {
  auto g = m.gamma.row(t.user);
  auto xp = m.X.row(t.p);
  auto xq = m.X.row(t.q);
  const double x_hat = dot(g, xp) - dot(g, xq);
  const double c = sigmoid(-x_hat);
  const Vec diff = subtract(xp, xq);
  const Vec g_old(g.begin(), g.end());
  detail::ascend(g, diff, c, h.alpha, h.lambda_theta);
  detail::ascend(xp, g_old, c, h.alpha, h.lambda_theta);
  detail::ascend(xq, g_old, -c, h.alpha, h.lambda_theta);
  return x_hat;
}

namespace detail {
// Shared epoch driver for the BPR-style learners: same seeding, user order
// and negative stream as the recurrent trainer.
template <typename UserFn, typename FiniteFn, typename NormFn>
void bpr_epochs(const Corpus& corpus, const TrainConfig& cfg, UserFn&& per_user, FiniteFn&& finite,
                NormFn&& norm, const EpochCallback& on_epoch) {
  cfg.validate();
  Rng neg_rng(mix_seed(cfg.seed));
  Rng order_rng(mix_seed(cfg.seed + 1));
  std::vector<UserIndex> order(corpus.num_users());
  for (UserIndex u = 0; u < order.size(); ++u) order[u] = u;
  std::vector<std::vector<TrainingTriple>> frozen;
  if (cfg.frozen_negatives) {
    frozen.resize(corpus.num_users());
    for (UserIndex u = 0; u < corpus.num_users(); ++u) frozen[u] = sample_triples(corpus, u, neg_rng);
  }
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle_users) order_rng.shuffle(order);
    double sum = 0.0;
    std::size_t count = 0;
    for (UserIndex u : order) {
      std::vector<TrainingTriple> fresh;
      if (!cfg.frozen_negatives) fresh = sample_triples(corpus, u, neg_rng);
      const auto& triples = cfg.frozen_negatives ? frozen[u] : fresh;
      for (const auto& t : triples) sum += log_sigmoid(per_user(t));
      count += triples.size();
      if (!finite())
        throw DivergenceError("non-finite parameter after epoch " + std::to_string(epoch) + ", user '" +
                              corpus.user_ids[u] + "'");
    }
    if (on_epoch) on_epoch({epoch, count ? sum / static_cast<double>(count) : 0.0, norm()});
  }
}
}  // namespace detail

inline FactorModel train_bpr_mf(const Corpus& corpus, const Hyper& h, const TrainConfig& cfg,
                                const EpochCallback& on_epoch = {}) {
  Hyper hl = h;
  hl.mask = FeatureMask::latent_only();
  hl.validate();
  Rng init_rng(cfg.seed);
  FactorModel m = init_factor_model(hl, corpus.num_users(), corpus.num_items(), init_rng);
  detail::bpr_epochs(
      corpus, cfg, [&](const TrainingTriple& t) { return bpr_mf_step(m, t, hl); },
      [&] { return m.all_finite(); }, [&] { return std::sqrt(m.squared_norm()); }, on_epoch);
  return m;
}

// Pointwise squared-error factorization on implicit data: every training
// interaction is a target-1 pair and draws one target-0 negative.
struct PointwisePair {
  UserIndex user = 0;
  ItemIndex item = 0;
  double target = 0.0;
};

inline std::vector<PointwisePair> sample_pointwise(const Corpus& c, UserIndex u, Rng& rng) {
  std::vector<PointwisePair> out;
  if (c.owned(u).size() >= c.num_items())
    throw SamplingError("user '" + c.user_ids[u] + "' owns every item; no negative available");
  for (ItemIndex p : c.train_seq[u]) {
    ItemIndex q;
    do {
      q = rng.index(c.num_items());
    } while (c.owns(u, q));
    out.push_back({u, p, 1.0});
    out.push_back({u, q, 0.0});
  }
  return out;
}

// Sum of squared residuals (target - gamma_u . x_i)^2.
inline double mf_loss(const FactorModel& m, std::span<const PointwisePair> pairs) {
  double s = 0.0;
  for (const auto& pr : pairs) {
    const double r = pr.target - dot(m.gamma.row(pr.user), m.X.row(pr.item));
    s += r * r;
  }
  return s;
}

// Adds the gradient of -(target - gamma_u . x_i)^2 / 2 into grad.
inline void mf_accumulate_gradient(const FactorModel& m, const PointwisePair& pr, FactorModel& grad) {
  auto g = m.gamma.row(pr.user);
  auto x = m.X.row(pr.item);
  const double err = pr.target - dot(g, x);
  axpy(err, x, grad.gamma.row(pr.user));
  axpy(err, g, grad.X.row(pr.item));
}

inline void mf_step(FactorModel& m, const PointwisePair& pr, const Hyper& h) {
  auto g = m.gamma.row(pr.user);
  auto x = m.X.row(pr.item);
  const double err = pr.target - dot(g, x);
  const Vec g_old(g.begin(), g.end());
  detail::ascend(g, x, err, h.alpha, h.lambda_theta);
  detail::ascend(x, g_old, err, h.alpha, h.lambda_theta);
}

// EpochStats::mean_ln_sigma carries the mean squared residual for this model.
inline FactorModel train_mf(const Corpus& corpus, const Hyper& h, const TrainConfig& cfg,
                            const EpochCallback& on_epoch = {}) {
  Hyper hl = h;
  hl.mask = FeatureMask::latent_only();
  hl.validate();
  cfg.validate();
  Rng init_rng(cfg.seed);
  FactorModel m = init_factor_model(hl, corpus.num_users(), corpus.num_items(), init_rng);
  Rng neg_rng(mix_seed(cfg.seed));
  Rng order_rng(mix_seed(cfg.seed + 1));
  std::vector<UserIndex> order(corpus.num_users());
  for (UserIndex u = 0; u < order.size(); ++u) order[u] = u;
  std::vector<std::vector<PointwisePair>> frozen;
  if (cfg.frozen_negatives)
    for (UserIndex u = 0; u < corpus.num_users(); ++u) frozen.push_back(sample_pointwise(corpus, u, neg_rng));
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle_users) order_rng.shuffle(order);
    double sq = 0.0;
    std::size_t n = 0;
    for (UserIndex u : order) {
      std::vector<PointwisePair> fresh;
      if (!cfg.frozen_negatives) fresh = sample_pointwise(corpus, u, neg_rng);
      const auto& pairs = cfg.frozen_negatives ? frozen[u] : fresh;
      for (const auto& pr : pairs) {
        const double r = pr.target - dot(m.gamma.row(pr.user), m.X.row(pr.item));
        sq += r * r;
        mf_step(m, pr, hl);
      }
      n += pairs.size();
      if (!m.all_finite())
        throw DivergenceError("non-finite parameter after epoch " + std::to_string(epoch) + ", user '" +
                              corpus.user_ids[u] + "'");
    }
    if (on_epoch) on_epoch({epoch, n ? sq / static_cast<double>(n) : 0.0, std::sqrt(m.squared_norm())});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Content BPR: free user vector over the masked item representation.

struct ContentBprModel {
  Mat gamma;           // |U| x D
  ModelParams params;  // X, E, V used; InMat/RecMat empty

  bool operator==(const ContentBprModel&) const = default;
  double squared_norm() const { return seqrank::squared_norm(gamma.flat()) + params.squared_norm(); }
  bool all_finite() const { return seqrank::all_finite(gamma.flat()) && params.all_finite(); }
};

// Draw order gamma, X, E, V; with a latent-only mask this matches
// init_factor_model exactly.
inline ContentBprModel init_content_bpr(const Hyper& h, std::size_t n_users, std::size_t n_items, Rng& rng) {
  h.validate();
  ContentBprModel m;
  m.gamma = Mat(n_users, h.width());
  if (h.mask.latent) m.params.X = Mat(n_items, h.d);
  if (h.mask.visual) m.params.E = Mat(h.d, h.visual_dim);
  if (h.mask.textual) m.params.V = Mat(h.d, h.textual_dim);
  detail::fill_uniform(m.gamma, h, rng);
  detail::fill_uniform(m.params.X, h, rng);
  detail::fill_uniform(m.params.E, h, rng);
  detail::fill_uniform(m.params.V, h, rng);
  return m;
}

inline double content_bpr_accumulate_gradient(const ContentBprModel& m, const FeatureStore& feats, const Hyper& h,
                                              const TrainingTriple& t, ContentBprModel& grad) {
  const ItemInput ip = item_input(t.p, m.params, feats, h);
  const ItemInput iq = item_input(t.q, m.params, feats, h);
  auto g = m.gamma.row(t.user);
  const HiddenState user{Vec(g.begin(), g.end())};
  const double x_hat = score_pair(user, ip, iq).value;
  const double c = sigmoid(-x_hat);
  const Vec diff = subtract(ip.full, iq.full);
  axpy(c, diff, grad.gamma.row(t.user));
  if (h.mask.latent) {
    axpy(c, user.slice(h, Slice::kLatent), grad.params.X.row(t.p));
    axpy(-c, user.slice(h, Slice::kLatent), grad.params.X.row(t.q));
  }
  if (h.mask.visual)
    add_outer(grad.params.E, c, user.slice(h, Slice::kVisual),
              subtract(feats.visual.row(t.p), feats.visual.row(t.q)));
  if (h.mask.textual)
    add_outer(grad.params.V, c, user.slice(h, Slice::kTextual),
              subtract(feats.textual.row(t.p), feats.textual.row(t.q)));
  return x_hat;
}

inline double content_bpr_step(ContentBprModel& m, const FeatureStore& feats, const Hyper& h,
                               const TrainingTriple& t) {
  const ItemInput ip = item_input(t.p, m.params, feats, h);
  const ItemInput iq = item_input(t.q, m.params, feats, h);
  auto g = m.gamma.row(t.user);
  const HiddenState user{Vec(g.begin(), g.end())};
  const double x_hat = score_pair(user, ip, iq).value;
  const double c = sigmoid(-x_hat);
  const Vec diff = subtract(ip.full, iq.full);
  detail::ascend(g, diff, c, h.alpha, h.lambda_theta);
  if (h.mask.latent) {
    detail::ascend(m.params.X.row(t.p), user.slice(h, Slice::kLatent), c, h.alpha, h.lambda_theta);
    detail::ascend(m.params.X.row(t.q), user.slice(h, Slice::kLatent), -c, h.alpha, h.lambda_theta);
  }
  if (h.mask.visual) {
    const Mat gE = outer(user.slice(h, Slice::kVisual), subtract(feats.visual.row(t.p), feats.visual.row(t.q)));
    detail::ascend(m.params.E.flat(), gE.flat(), c, h.alpha, h.lambda_e);
  }
  if (h.mask.textual) {
    const Mat gV = outer(user.slice(h, Slice::kTextual), subtract(feats.textual.row(t.p), feats.textual.row(t.q)));
    detail::ascend(m.params.V.flat(), gV.flat(), c, h.alpha, h.lambda_v);
  }
  return x_hat;
}

inline ContentBprModel train_content_bpr(const Corpus& corpus, const FeatureStore& feats, const Hyper& h,
                                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  h.validate();
  Rng init_rng(cfg.seed);
  ContentBprModel m = init_content_bpr(h, corpus.num_users(), corpus.num_items(), init_rng);
  detail::bpr_epochs(
      corpus, cfg, [&](const TrainingTriple& t) { return content_bpr_step(m, feats, h, t); },
      [&] { return m.all_finite(); }, [&] { return std::sqrt(m.squared_norm()); }, on_epoch);
  return m;
}

class ContentBprRanker final : public Ranker {
 public:
  ContentBprRanker(RankerKind kind, Hyper h, ContentBprModel model)
      : kind_(kind), h_(h), model_(std::move(model)) {}

  RankerKind kind() const override { return kind_; }

  Vec score_items(const Dataset& data, UserIndex u) const override {
    Vec s(data.corpus.num_items());
    auto g = model_.gamma.row(u);
    for (ItemIndex i = 0; i < s.size(); ++i) s[i] = dot(g, item_input(i, model_.params, data.features, h_).full);
    return s;
  }

  Checkpoint to_checkpoint(const Dataset& data) const override {
    Checkpoint ck = checkpoint_header(data, h_);
    ck.blocks.emplace_back("Gamma", model_.gamma);
    if (h_.mask.latent) ck.blocks.emplace_back("X", model_.params.X);
    if (h_.mask.visual) ck.blocks.emplace_back("E", model_.params.E);
    if (h_.mask.textual) ck.blocks.emplace_back("V", model_.params.V);
    return ck;
  }

  const ContentBprModel& model() const { return model_; }

 private:
  RankerKind kind_;
  Hyper h_;
  ContentBprModel model_;
};

// ---------------------------------------------------------------------------
// Recurrent rankers

class RnnRanker final : public Ranker {
 public:
  RnnRanker(RankerKind kind, Hyper h, ModelParams params) : kind_(kind), h_(h), params_(std::move(params)) {}

  RankerKind kind() const override { return kind_; }

  Vec score_items(const Dataset& data, UserIndex u) const override {
    return score_all_items(u, params_, data.features, data.corpus, h_);
  }

  Checkpoint to_checkpoint(const Dataset& data) const override {
    Checkpoint ck = checkpoint_header(data, h_);
    if (h_.mask.latent) ck.blocks.emplace_back("X", params_.X);
    if (h_.mask.visual) ck.blocks.emplace_back("E", params_.E);
    if (h_.mask.textual) ck.blocks.emplace_back("V", params_.V);
    ck.blocks.emplace_back("InMat", params_.InMat);
    ck.blocks.emplace_back("RecMat", params_.RecMat);
    return ck;
  }

  const ModelParams& params() const { return params_; }
  const Hyper& hyper() const { return h_; }

 private:
  RankerKind kind_;
  Hyper h_;
  ModelParams params_;
};

// ---------------------------------------------------------------------------
// Factories

// Fits a ranker of the given kind. The mask in h is overridden by the kind.
inline std::unique_ptr<Ranker> train_ranker(RankerKind kind, const Dataset& data, Hyper h, const TrainConfig& cfg,
                                            const EpochCallback& on_epoch = {}) {
  h.mask = mask_for(kind);
  switch (kind) {
    case RankerKind::kRandom: return std::make_unique<RandomRanker>(cfg.seed);
    case RankerKind::kPop: return std::make_unique<PopRanker>(PopRanker::fit(data.corpus));
    case RankerKind::kMF: return std::make_unique<FactorRanker>(kind, h, train_mf(data.corpus, h, cfg, on_epoch));
    case RankerKind::kBPR:
      return std::make_unique<FactorRanker>(kind, h, train_bpr_mf(data.corpus, h, cfg, on_epoch));
    case RankerKind::kVBPR:
    case RankerKind::kTBPR:
    case RankerKind::kVTBPR:
      return std::make_unique<ContentBprRanker>(kind, h,
                                                train_content_bpr(data.corpus, data.features, h, cfg, on_epoch));
    default: return std::make_unique<RnnRanker>(kind, h, train(data.corpus, data.features, h, cfg, on_epoch));
  }
}

// Rebuilds a ranker from a checkpoint, checking that its item table, user
// table and feature dimensions agree with the dataset.
inline std::unique_ptr<Ranker> ranker_from_checkpoint(const Checkpoint& ck, const Dataset& data) {
  RankerKind kind;
  try {
    kind = parse_kind(ck.kind);
  } catch (const ConfigError&) {
    throw DataError("checkpoint has unknown model kind '" + ck.kind + "'");
  }
  const Corpus& c = data.corpus;
  if (ck.item_ids != c.item_ids)
    throw DataError("checkpoint item table (" + std::to_string(ck.item_ids.size()) +
                    " items) does not match the corpus (" + std::to_string(c.num_items()) + " items)");
  if (kind == RankerKind::kRandom) return std::make_unique<RandomRanker>(ck.seed);
  if (kind == RankerKind::kPop) {
    const Mat& m = ck.block("Pop", 1, c.num_items());
    return std::make_unique<PopRanker>(Vec(m.flat().begin(), m.flat().end()));
  }

  Hyper h;
  h.d = ck.d;
  h.visual_dim = ck.visual_dim;
  h.textual_dim = ck.textual_dim;
  h.mask = FeatureMask::from_bits(ck.mask);
  if (!(h.mask == mask_for(kind))) throw DataError("checkpoint mask does not match kind '" + ck.kind + "'");
  if (h.mask.visual && h.visual_dim != data.features.visual_dim())
    throw DataError("checkpoint expects visual features of dimension " + std::to_string(h.visual_dim) +
                    " but the feature file has " + std::to_string(data.features.visual_dim()));
  if (h.mask.textual && h.textual_dim != data.features.textual_dim())
    throw DataError("checkpoint expects textual features of dimension " + std::to_string(h.textual_dim) +
                    " but the feature file has " + std::to_string(data.features.textual_dim()));
  const std::size_t D = h.width();

  auto latent_blocks = [&](ModelParams& p) {
    if (h.mask.latent) p.X = ck.block("X", c.num_items(), h.d);
    if (h.mask.visual) p.E = ck.block("E", h.d, h.visual_dim);
    if (h.mask.textual) p.V = ck.block("V", h.d, h.textual_dim);
  };
  auto check_users = [&] {
    if (ck.user_ids != c.user_ids)
      throw DataError("checkpoint user table (" + std::to_string(ck.user_ids.size()) +
                      " users) does not match the corpus (" + std::to_string(c.num_users()) + " users)");
  };

  if (kind == RankerKind::kMF || kind == RankerKind::kBPR) {
    check_users();
    FactorModel m{ck.block("Gamma", c.num_users(), h.d), ck.block("X", c.num_items(), h.d)};
    return std::make_unique<FactorRanker>(kind, h, std::move(m));
  }
  if (is_content_bpr(kind)) {
    check_users();
    ContentBprModel m;
    m.gamma = ck.block("Gamma", c.num_users(), D);
    latent_blocks(m.params);
    return std::make_unique<ContentBprRanker>(kind, h, std::move(m));
  }
  ModelParams p;
  latent_blocks(p);
  p.InMat = ck.block("InMat", D, D);
  p.RecMat = ck.block("RecMat", D, D);
  return std::make_unique<RnnRanker>(kind, h, std::move(p));
}

}  // namespace seqrank

#endif  // SEQRANK_BASELINES_HPP_
