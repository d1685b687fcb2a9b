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

#ifndef SEQRANK_GRADCHECK_HPP_
#define SEQRANK_GRADCHECK_HPP_

// Central finite-difference verification of the hand-derived gradients on
// a tiny random configuration (one user sequence, fixed negatives, no
// regularization).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "seqrank/baselines.hpp"
#include "seqrank/dataio.hpp"
#include "seqrank/model.hpp"
#include "seqrank/trainer.hpp"

namespace seqrank {

struct GradCheckConfig {
  std::size_t d = 2;
  std::size_t visual_dim = 3;
  std::size_t textual_dim = 3;
  std::size_t seq_len = 4;
  std::size_t items = 6;
  double step = 1e-5;
  double tolerance = 1e-5;
  std::uint64_t seed = 7;
  double init_lo = -0.5;
  double init_hi = 0.5;
  // Added to every analytic gradient entry; lets tests confirm the check
  // actually fails on a wrong gradient.
  double perturb = 0.0;
};

struct BlockError {
  std::string block;
  double max_rel_error = 0.0;
  std::size_t entries = 0;
};

struct GradCheckReport {
  std::string model;
  std::vector<BlockError> blocks;
  double tolerance = 1e-5;

  double max_error() const {
    double m = 0.0;
    for (const auto& b : blocks) m = std::max(m, b.max_rel_error);
    return m;
  }
  bool passed() const { return max_error() < tolerance; }
  const BlockError* find(const std::string& name) const {
    for (const auto& b : blocks)
      if (b.block == name) return &b;
    return nullptr;
  }
};

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

// One user owning seq_len distinct items out of `items`; features drawn in
// the normalized ranges.
inline Dataset grad_check_dataset(const GradCheckConfig& cfg, Rng& rng) {
  if (cfg.seq_len < 2 || cfg.seq_len >= cfg.items)
    throw ConfigError("gradcheck needs 2 <= seq_len < items");
  Dataset ds;
  Corpus& c = ds.corpus;
  for (std::size_t i = 0; i < cfg.items; ++i) c.item_ids.push_back("g" + std::to_string(i));
  std::sort(c.item_ids.begin(), c.item_ids.end());
  std::vector<ItemIndex> perm(cfg.items);
  for (std::size_t i = 0; i < cfg.items; ++i) perm[i] = i;
  rng.shuffle(perm);
  c.user_ids = {"u0"};
  c.train_seq = {std::vector<ItemIndex>(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(cfg.seq_len))};
  c.test_seq = {{}};
  c.reindex();
  ds.features.visual = Mat(cfg.items, cfg.visual_dim);
  ds.features.textual = Mat(cfg.items, cfg.textual_dim);
  for (double& v : ds.features.visual.flat()) v = rng.uniform(0.0, 0.5);
  for (double& v : ds.features.textual.flat()) v = rng.uniform(-0.5, 0.5);
  return ds;
}

namespace detail {

// Reference objectives evaluated in extended precision, written directly
// from the model definition rather than through model.hpp, so the finite
// differences are both independent of the analytic path and far below the
// double roundoff floor.
using Wide = long double;

inline Wide wide_log_sigmoid(Wide x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

inline std::vector<Wide> wide_item(ItemIndex i, const ModelParams& p, const FeatureStore& f, const Hyper& h) {
  std::vector<Wide> out;
  if (h.mask.latent)
    for (std::size_t k = 0; k < h.d; ++k) out.push_back(p.X(i, k));
  auto embed = [&](const Mat& M, const Mat& feats) {
    for (std::size_t r = 0; r < M.rows(); ++r) {
      Wide s = 0;
      for (std::size_t c = 0; c < M.cols(); ++c) s += static_cast<Wide>(M(r, c)) * feats(i, c);
      out.push_back(s);
    }
  };
  if (h.mask.visual) embed(p.E, f.visual);
  if (h.mask.textual) embed(p.V, f.textual);
  return out;
}

inline Wide wide_dot(const std::vector<Wide>& a, const std::vector<Wide>& b) {
  Wide s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline Wide wide_rnn_objective(std::span<const ItemIndex> items, std::span<const TrainingTriple> triples,
                               const ModelParams& p, const FeatureStore& f, const Hyper& h) {
  const std::size_t D = h.width();
  std::vector<std::vector<Wide>> states;
  std::vector<Wide> prev(D, 0);
  for (ItemIndex i : items) {
    const auto in = wide_item(i, p, f, h);
    std::vector<Wide> next(D);
    for (std::size_t r = 0; r < D; ++r) {
      Wide a = 0;
      for (std::size_t c = 0; c < D; ++c) a += static_cast<Wide>(p.InMat(r, c)) * in[c];
      for (std::size_t c = 0; c < D; ++c) a += static_cast<Wide>(p.RecMat(r, c)) * prev[c];
      next[r] = 1 / (1 + std::exp(-a));
    }
    states.push_back(next);
    prev = std::move(next);
  }
  Wide total = 0;
  for (const auto& t : triples) {
    const auto ip = wide_item(t.p, p, f, h);
    const auto iq = wide_item(t.q, p, f, h);
    const auto& hs = states.at(t.pos - 1);
    total += wide_log_sigmoid(wide_dot(hs, ip) - wide_dot(hs, iq));
  }
  return total;
}

inline Wide wide_user_objective(const Mat& gamma, std::span<const TrainingTriple> triples, const ModelParams& p,
                                const FeatureStore& f, const Hyper& h) {
  Wide total = 0;
  for (const auto& t : triples) {
    std::vector<Wide> g(gamma.row(t.user).begin(), gamma.row(t.user).end());
    total += wide_log_sigmoid(wide_dot(g, wide_item(t.p, p, f, h)) - wide_dot(g, wide_item(t.q, p, f, h)));
  }
  return total;
}

inline Wide wide_pointwise_objective(const Mat& gamma, const Mat& X, std::span<const PointwisePair> pairs) {
  Wide total = 0;
  for (const auto& pr : pairs) {
    Wide fit = 0;
    for (std::size_t j = 0; j < gamma.cols(); ++j)
      fit += static_cast<Wide>(gamma(pr.user, j)) * static_cast<Wide>(X(pr.item, j));
    const Wide r = static_cast<Wide>(pr.target) - fit;
    total -= r * r / 2;
  }
  return total;
}

struct CheckBlock {
  std::string name;
  std::span<double> params;
  std::span<const double> analytic;
};

inline GradCheckReport compare_blocks(const std::string& model, const std::vector<CheckBlock>& blocks,
                                      const std::function<long double()>& objective, const GradCheckConfig& cfg) {
  GradCheckReport rep;
  rep.model = model;
  rep.tolerance = cfg.tolerance;
  for (const auto& b : blocks) {
    BlockError be{b.name, 0.0, b.params.size()};
    for (std::size_t k = 0; k < b.params.size(); ++k) {
      const double saved = b.params[k];
      b.params[k] = saved + cfg.step;
      const long double up = objective();
      b.params[k] = saved - cfg.step;
      const long double down = objective();
      b.params[k] = saved;
      // Divide by the step actually realized in double arithmetic.
      const long double width = static_cast<long double>(saved + cfg.step) - static_cast<long double>(saved - cfg.step);
      const auto numeric = static_cast<double>((up - down) / width);
      be.max_rel_error = std::max(be.max_rel_error, relative_error(b.analytic[k] + cfg.perturb, numeric));
    }
    rep.blocks.push_back(be);
  }
  return rep;
}

inline Hyper grad_check_hyper(const GradCheckConfig& cfg, FeatureMask mask) {
  Hyper h;
  h.d = cfg.d;
  h.visual_dim = cfg.visual_dim;
  h.textual_dim = cfg.textual_dim;
  h.mask = mask;
  h.lambda_theta = h.lambda_e = h.lambda_v = 0.0;
  h.init_lo = cfg.init_lo;
  h.init_hi = cfg.init_hi;
  return h;
}
}  // namespace detail

// Checks one trainable kind (bpr, vbpr, tbpr, vtbpr, rnn, vrnn, trnn, vtrnn).
inline GradCheckReport grad_check(RankerKind kind, const GradCheckConfig& cfg = {}) {
  Rng rng(cfg.seed);
  Dataset ds = grad_check_dataset(cfg, rng);
  const Hyper h = detail::grad_check_hyper(cfg, mask_for(kind));
  const auto triples = sample_triples(ds.corpus, 0, rng);
  const std::string name(kind_name(kind));

  if (is_recurrent(kind)) {
    ModelParams params = init_params(h, ds.corpus.num_items(), rng);
    const ModelParams g = sequence_gradient(ds.corpus.train_seq[0], triples, params, ds.features, h);
    std::vector<detail::CheckBlock> blocks;
    if (h.mask.latent) blocks.push_back({"X", params.X.flat(), g.X.flat()});
    if (h.mask.visual) blocks.push_back({"E", params.E.flat(), g.E.flat()});
    if (h.mask.textual) blocks.push_back({"V", params.V.flat(), g.V.flat()});
    blocks.push_back({"InMat", params.InMat.flat(), g.InMat.flat()});
    blocks.push_back({"RecMat", params.RecMat.flat(), g.RecMat.flat()});
    return detail::compare_blocks(
        name, blocks,
        [&] { return detail::wide_rnn_objective(ds.corpus.train_seq[0], triples, params, ds.features, h); }, cfg);
  }

  if (kind == RankerKind::kMF) {
    FactorModel m = init_factor_model(h, ds.corpus.num_users(), ds.corpus.num_items(), rng);
    FactorModel g{Mat(m.gamma.rows(), m.gamma.cols()), Mat(m.X.rows(), m.X.cols())};
    const auto pairs = sample_pointwise(ds.corpus, 0, rng);
    for (const auto& pr : pairs) mf_accumulate_gradient(m, pr, g);
    return detail::compare_blocks(name, {{"Gamma", m.gamma.flat(), g.gamma.flat()}, {"X", m.X.flat(), g.X.flat()}},
                                  [&] { return detail::wide_pointwise_objective(m.gamma, m.X, pairs); }, cfg);
  }

  if (kind == RankerKind::kBPR) {
    FactorModel m = init_factor_model(h, ds.corpus.num_users(), ds.corpus.num_items(), rng);
    FactorModel g{Mat(m.gamma.rows(), m.gamma.cols()), Mat(m.X.rows(), m.X.cols())};
    for (const auto& t : triples) bpr_mf_accumulate_gradient(m, t, g);
    auto objective = [&] {
      ModelParams latent;
      latent.X = m.X;
      return detail::wide_user_objective(m.gamma, triples, latent, ds.features, h);
    };
    return detail::compare_blocks(name, {{"Gamma", m.gamma.flat(), g.gamma.flat()}, {"X", m.X.flat(), g.X.flat()}},
                                  objective, cfg);
  }

  if (is_content_bpr(kind)) {
    ContentBprModel m = init_content_bpr(h, ds.corpus.num_users(), ds.corpus.num_items(), rng);
    ContentBprModel g;
    g.gamma = Mat(m.gamma.rows(), m.gamma.cols());
    g.params.X = Mat(m.params.X.rows(), m.params.X.cols());
    g.params.E = Mat(m.params.E.rows(), m.params.E.cols());
    g.params.V = Mat(m.params.V.rows(), m.params.V.cols());
    for (const auto& t : triples) content_bpr_accumulate_gradient(m, ds.features, h, t, g);
    auto objective = [&] { return detail::wide_user_objective(m.gamma, triples, m.params, ds.features, h); };
    std::vector<detail::CheckBlock> blocks{{"Gamma", m.gamma.flat(), g.gamma.flat()}};
    if (h.mask.latent) blocks.push_back({"X", m.params.X.flat(), g.params.X.flat()});
    if (h.mask.visual) blocks.push_back({"E", m.params.E.flat(), g.params.E.flat()});
    if (h.mask.textual) blocks.push_back({"V", m.params.V.flat(), g.params.V.flat()});
    return detail::compare_blocks(name, blocks, objective, cfg);
  }

  throw ConfigError("model kind '" + name + "' has no gradient to check");
}

inline constexpr std::array<RankerKind, 9> kGradientKinds = {
    RankerKind::kVTRNN, RankerKind::kRNN,  RankerKind::kVRNN,  RankerKind::kTRNN, RankerKind::kMF,
    RankerKind::kBPR,   RankerKind::kVBPR, RankerKind::kTBPR,  RankerKind::kVTBPR};

inline std::vector<GradCheckReport> grad_check_all(const GradCheckConfig& cfg = {}) {
  std::vector<GradCheckReport> out;
  for (RankerKind k : kGradientKinds) out.push_back(grad_check(k, cfg));
  return out;
}

}  // namespace seqrank

#endif  // SEQRANK_GRADCHECK_HPP_
