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

#ifndef SEQRANK_TRAINER_HPP_
#define SEQRANK_TRAINER_HPP_

// BPR training of the recurrent ranker by stochastic gradient ascent.
//
// Each user sequence is handled in two phases. Forward direction: for every
// step the item-side parameters (latent rows of p and q, E, V) move along
// sigma(-x_hat) * d x_hat / d theta with the hidden state held fixed, applied
// immediately. Backward direction: the BPR signal is pushed back through the
// recurrence (BPTT); InMat, RecMat, E and V gradients are summed over the
// whole sequence and applied once, while the latent row of each consumed
// positive item is updated as its step is visited.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqrank/dataio.hpp"
#include "seqrank/error.hpp"
#include "seqrank/model.hpp"
#include "seqrank/numkit.hpp"

namespace seqrank {

struct TrainConfig {
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
  bool shuffle_users = false;
  // Rescales any gradient block whose Frobenius norm exceeds this value.
  std::optional<double> clip_norm;
  // Sample negatives once and reuse them every epoch (off: fresh per epoch).
  bool frozen_negatives = false;

  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (epochs < 1) out.push_back("epochs must be at least 1");
    if (clip_norm && !(*clip_norm > 0.0)) out.push_back("clip_norm must be positive");
    return out;
  }

  void validate() const {
    auto p = problems();
    if (p.empty()) return;
    std::string msg = "invalid training config:";
    for (const auto& s : p) msg += "\n  - " + s;
    throw ConfigError(msg);
  }
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_ln_sigma = 0.0;
  double param_norm = 0.0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Per-step quantities shared by both directions.
struct StepGrad {
  double x_hat = 0.0;
  double c = 0.0;  // sigma(-x_hat)
  Vec diff;        // i_p - i_q
  Vec gate;        // diff (.) h^{t-1} (.) (1 - h^{t-1})
};

// Derivatives of x_hat (not yet scaled by c) with respect to the step's
// item-side parameters. d x_hat / d x_q is -latent.
struct ForwardGrad {
  StepGrad step;
  Vec latent;  // h_x^{t-1}
  Mat E;       // h_f^{t-1} (f_p - f_q)^T
  Mat V;       // h_g^{t-1} (g_p - g_q)^T
};

// Sums over one sequence of the backward-direction gradients of
// sum_t ln sigma(x_hat^t), already scaled by each step's c.
struct SeqAccum {
  Mat dInMat;
  Mat dRecMat;
  Mat dE;
  Mat dV;
  // (item, (InMat^T e)_x) for each consumed positive, in descending position.
  std::vector<std::pair<ItemIndex, Vec>> latent;
  // e vectors at the hidden layer input, indexed by position k (state k).
  std::vector<Vec> e;
};

// ---------------------------------------------------------------------------
// Objective

namespace detail {
inline double regularizer(const ModelParams& p, const Hyper& h) {
  return 0.5 * (h.lambda_theta * (squared_norm(p.X.flat()) + squared_norm(p.InMat.flat()) +
                                  squared_norm(p.RecMat.flat())) +
                h.lambda_e * squared_norm(p.E.flat()) + h.lambda_v * squared_norm(p.V.flat()));
}
}  // namespace detail

// Sum of ln sigma(x_hat) over the triples, without regularization.
inline double sum_log_sigmoid(const ModelParams& params, const Corpus& corpus, const FeatureStore& feats,
                              const Hyper& h, std::span<const TrainingTriple> triples) {
  std::map<UserIndex, SequenceTrace> traces;
  double sum = 0.0;
  for (const auto& t : triples) {
    auto it = traces.find(t.user);
    if (it == traces.end())
      it = traces.emplace(t.user, trace_sequence(corpus.train_seq.at(t.user), params, feats, h)).first;
    const auto& prev = it->second.states.at(t.pos - 1);
    const auto s = score_pair(prev, item_input(t.p, params, feats, h), item_input(t.q, params, feats, h));
    sum += log_sigmoid(s.value);
  }
  return sum;
}

// sum ln sigma(x_hat) - regularization, with lambda_theta on X/InMat/RecMat,
// lambda_e on E and lambda_v on V.
inline double bpr_objective(const ModelParams& params, const Corpus& corpus, const FeatureStore& feats,
                            const Hyper& h, std::span<const TrainingTriple> triples) {
  if (triples.empty()) throw Error("bpr_objective: no triples");
  return sum_log_sigmoid(params, corpus, feats, h, triples) - detail::regularizer(params, h);
}

// ---------------------------------------------------------------------------
// Forward direction

inline ForwardGrad forward_gradient(const HiddenState& prev, ItemIndex p, ItemIndex q, const ModelParams& params,
                                    const FeatureStore& feats, const Hyper& h) {
  const ItemInput ip = item_input(p, params, feats, h);
  const ItemInput iq = item_input(q, params, feats, h);
  ForwardGrad g;
  const PairScore s = score_pair(prev, ip, iq);
  g.step.x_hat = s.value;
  g.step.c = sigmoid(-s.value);
  g.step.diff = subtract(ip.full, iq.full);
  g.step.gate.resize(prev.full.size());
  for (std::size_t k = 0; k < prev.full.size(); ++k)
    g.step.gate[k] = g.step.diff[k] * ((1.0 - prev.full[k]) * prev.full[k]);

  if (h.mask.latent) {
    auto hx = prev.slice(h, Slice::kLatent);
    g.latent.assign(hx.begin(), hx.end());
  }
  if (h.mask.visual) {
    g.E = outer(prev.slice(h, Slice::kVisual), subtract(feats.visual.row(p), feats.visual.row(q)));
  }
  if (h.mask.textual) {
    g.V = outer(prev.slice(h, Slice::kTextual), subtract(feats.textual.row(p), feats.textual.row(q)));
  }
  return g;
}

namespace detail {
inline double clip_scale(double norm, const std::optional<double>& clip) {
  if (!clip || norm <= *clip || norm == 0.0) return 1.0;
  return *clip / norm;
}

// theta += alpha * (scale * grad - lambda * theta)
inline void ascend(std::span<double> theta, std::span<const double> grad, double scale, double alpha,
                   double lambda) {
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] += alpha * (scale * grad[k] - lambda * theta[k]);
}
}  // namespace detail

// Applies the stochastic ascent step for the forward-direction derivatives.
inline void apply_forward_updates(const ForwardGrad& g, ItemIndex p, ItemIndex q, ModelParams& params,
                                  const Hyper& h, const std::optional<double>& clip = std::nullopt) {
  const double c = g.step.c;
  if (h.mask.latent) {
    const double s = c * detail::clip_scale(c * std::sqrt(squared_norm(g.latent)), clip);
    detail::ascend(params.X.row(p), g.latent, s, h.alpha, h.lambda_theta);
    detail::ascend(params.X.row(q), g.latent, -s, h.alpha, h.lambda_theta);
  }
  if (h.mask.visual) {
    const double s = c * detail::clip_scale(c * std::sqrt(squared_norm(g.E.flat())), clip);
    detail::ascend(params.E.flat(), g.E.flat(), s, h.alpha, h.lambda_e);
  }
  if (h.mask.textual) {
    const double s = c * detail::clip_scale(c * std::sqrt(squared_norm(g.V.flat())), clip);
    detail::ascend(params.V.flat(), g.V.flat(), s, h.alpha, h.lambda_v);
  }
}

// Computes and applies the forward-direction update for one step.
inline ForwardGrad forward_updates(const HiddenState& prev, ItemIndex p, ItemIndex q, ModelParams& params,
                                   const FeatureStore& feats, const Hyper& h,
                                   const std::optional<double>& clip = std::nullopt) {
  ForwardGrad g = forward_gradient(prev, p, q, params, feats, h);
  apply_forward_updates(g, p, q, params, h, clip);
  return g;
}

// ---------------------------------------------------------------------------
// Backward direction (BPTT)

// steps[k] belongs to position k+1 (the step whose score uses state k).
// For k = m-2 .. 0:
//   delta^k = c_{k+1} diff_{k+1} + [k < m-2] RecMat^T e^{k+1}
//   e^k     = delta^k (.) h^k (.) (1 - h^k)
inline SeqAccum backward_gradient(std::span<const ItemIndex> items, const SequenceTrace& trace,
                                  std::span<const StepGrad> steps, const ModelParams& params,
                                  const FeatureStore& feats, const Hyper& h) {
  const std::size_t D = h.width();
  SeqAccum acc;
  acc.dInMat = Mat(D, D);
  acc.dRecMat = Mat(D, D);
  if (h.mask.visual) acc.dE = Mat(h.d, h.visual_dim);
  if (h.mask.textual) acc.dV = Mat(h.d, h.textual_dim);
  const std::size_t m = items.size();
  if (m < 2) return acc;
  if (steps.size() != m - 1 || trace.states.size() != m)
    throw DimensionError("backward_gradient: expected one step per position 1..m-1");
  acc.e.assign(m, Vec(D, 0.0));

  for (std::size_t kk = m - 1; kk-- > 0;) {
    const std::size_t k = kk;
    const Vec& hk = trace.states[k].full;
    Vec delta(D);
    const StepGrad& st = steps[k];
    for (std::size_t j = 0; j < D; ++j) delta[j] = st.c * st.diff[j];
    if (k + 2 < m) {
      const Vec back = matvec_transposed(params.RecMat, acc.e[k + 1]);
      for (std::size_t j = 0; j < D; ++j) delta[j] += back[j];
    }
    Vec& e = acc.e[k];
    for (std::size_t j = 0; j < D; ++j) e[j] = delta[j] * (hk[j] * (1.0 - hk[j]));

    add_outer(acc.dInMat, 1.0, e, trace.inputs[k].full);
    if (k >= 1) add_outer(acc.dRecMat, 1.0, e, trace.states[k - 1].full);

    const Vec u = matvec_transposed(params.InMat, e);
    if (h.mask.latent) {
      auto ux = slice_of(u, h, Slice::kLatent);
      acc.latent.emplace_back(items[k], Vec(ux.begin(), ux.end()));
    }
    if (h.mask.visual) add_outer(acc.dE, 1.0, slice_of(u, h, Slice::kVisual), feats.visual.row(items[k]));
    if (h.mask.textual) add_outer(acc.dV, 1.0, slice_of(u, h, Slice::kTextual), feats.textual.row(items[k]));
  }
  return acc;
}

inline void apply_backward_updates(const SeqAccum& acc, ModelParams& params, const Hyper& h,
                                   const std::optional<double>& clip = std::nullopt) {
  if (acc.e.empty()) return;
  auto step = [&](std::span<double> theta, std::span<const double> grad, double lambda) {
    detail::ascend(theta, grad, detail::clip_scale(std::sqrt(squared_norm(grad)), clip), h.alpha, lambda);
  };
  if (h.mask.latent)
    for (const auto& [item, g] : acc.latent) step(params.X.row(item), g, h.lambda_theta);
  step(params.InMat.flat(), acc.dInMat.flat(), h.lambda_theta);
  step(params.RecMat.flat(), acc.dRecMat.flat(), h.lambda_theta);
  if (h.mask.visual) step(params.E.flat(), acc.dE.flat(), h.lambda_e);
  if (h.mask.textual) step(params.V.flat(), acc.dV.flat(), h.lambda_v);
}

inline SeqAccum backward_pass(std::span<const ItemIndex> items, const SequenceTrace& trace,
                              std::span<const StepGrad> steps, ModelParams& params, const FeatureStore& feats,
                              const Hyper& h, const std::optional<double>& clip = std::nullopt) {
  SeqAccum acc = backward_gradient(items, trace, steps, params, feats, h);
  apply_backward_updates(acc, params, h, clip);
  return acc;
}

// ---------------------------------------------------------------------------
// Full gradient (for verification)

// Exact gradient of sum_t ln sigma(x_hat^t) over one user's triples at fixed
// parameters: the forward-direction terms plus the BPTT terms. Returned in a
// ModelParams-shaped container.
inline ModelParams sequence_gradient(std::span<const ItemIndex> items, std::span<const TrainingTriple> triples,
                                     const ModelParams& params, const FeatureStore& feats, const Hyper& h) {
  ModelParams g;
  g.X = Mat(params.X.rows(), params.X.cols());
  g.E = Mat(params.E.rows(), params.E.cols());
  g.V = Mat(params.V.rows(), params.V.cols());
  g.InMat = Mat(params.InMat.rows(), params.InMat.cols());
  g.RecMat = Mat(params.RecMat.rows(), params.RecMat.cols());
  if (items.size() < 2) return g;

  const SequenceTrace trace = trace_sequence(items, params, feats, h);
  std::vector<StepGrad> steps(items.size() - 1);
  for (const auto& t : triples) {
    const ForwardGrad fg = forward_gradient(trace.states.at(t.pos - 1), t.p, t.q, params, feats, h);
    const double c = fg.step.c;
    if (h.mask.latent) {
      axpy(c, fg.latent, g.X.row(t.p));
      axpy(-c, fg.latent, g.X.row(t.q));
    }
    if (h.mask.visual) axpy(c, fg.E.flat(), g.E.flat());
    if (h.mask.textual) axpy(c, fg.V.flat(), g.V.flat());
    steps.at(t.pos - 1) = fg.step;
  }
  const SeqAccum acc = backward_gradient(items, trace, steps, params, feats, h);
  for (const auto& [item, lg] : acc.latent) axpy(1.0, lg, g.X.row(item));
  axpy(1.0, acc.dInMat.flat(), g.InMat.flat());
  axpy(1.0, acc.dRecMat.flat(), g.RecMat.flat());
  if (h.mask.visual) axpy(1.0, acc.dE.flat(), g.E.flat());
  if (h.mask.textual) axpy(1.0, acc.dV.flat(), g.V.flat());
  return g;
}

// ---------------------------------------------------------------------------
// Training loop

// One user's forward steps followed by one backward pass. Returns the sum of
// ln sigma(x_hat) seen during the forward steps.
inline double train_user(ModelParams& params, const Corpus& corpus, const FeatureStore& feats, const Hyper& h,
                         std::span<const TrainingTriple> triples, const std::optional<double>& clip = std::nullopt) {
  if (triples.empty()) return 0.0;
  const auto& items = corpus.train_seq.at(triples.front().user);
  if (items.size() < 2) return 0.0;
  const SequenceTrace trace = trace_sequence(items, params, feats, h);
  std::vector<StepGrad> steps(items.size() - 1);
  double sum = 0.0;
  for (const auto& t : triples) {
    ForwardGrad fg = forward_updates(trace.states.at(t.pos - 1), t.p, t.q, params, feats, h, clip);
    sum += log_sigmoid(fg.step.x_hat);
    steps.at(t.pos - 1) = std::move(fg.step);
  }
  backward_pass(items, trace, steps, params, feats, h, clip);
  return sum;
}

inline double param_norm(const ModelParams& p) { return std::sqrt(p.squared_norm()); }

// Continues training from the given parameters.
inline void train_from(ModelParams& params, const Corpus& corpus, const FeatureStore& feats, const Hyper& h,
                       const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  h.validate();
  cfg.validate();
  if (corpus.num_users() == 0) throw DataError("train: empty corpus");
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
      sum += train_user(params, corpus, feats, h, triples, cfg.clip_norm);
      count += triples.size();
      if (!params.all_finite())
        throw DivergenceError("non-finite parameter after epoch " + std::to_string(epoch) + ", user '" +
                              corpus.user_ids[u] + "'");
    }
    if (on_epoch) on_epoch({epoch, count ? sum / static_cast<double>(count) : 0.0, param_norm(params)});
  }
}

inline ModelParams train(const Corpus& corpus, const FeatureStore& feats, const Hyper& h, const TrainConfig& cfg,
                         const EpochCallback& on_epoch = {}) {
  h.validate();
  cfg.validate();
  Rng init_rng(cfg.seed);
  ModelParams params = init_params(h, corpus.num_items(), init_rng);
  train_from(params, corpus, feats, h, cfg, on_epoch);
  return params;
}

}  // namespace seqrank

#endif  // SEQRANK_TRAINER_HPP_
