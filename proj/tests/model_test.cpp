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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"

namespace seqrank {
namespace {

using testing::make_corpus;
using testing::make_dataset;
using testing::make_hyper;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

TEST(InitParams, DegenerateRangeGivesZeros) {
  Hyper h = make_hyper(FeatureMask::all(), 3, 2, 2);
  h.init_lo = h.init_hi = 0.0;
  Rng rng(1);
  const ModelParams p = init_params(h, 5, rng);
  EXPECT_EQ(p.squared_norm(), 0.0);
  EXPECT_EQ(p.X.rows(), 5u);
  EXPECT_EQ(p.InMat.rows(), 9u);
  EXPECT_EQ(p.E.cols(), 2u);
}

TEST(InitParams, SeededRepeatIsIdentical) {
  const Hyper h = make_hyper(FeatureMask::all(), 3, 2, 4);
  Rng a(7), b(7);
  EXPECT_EQ(init_params(h, 10, a), init_params(h, 10, b));
}

TEST(InitParams, SampleMeanWithinCltBound) {
  Hyper h = make_hyper(FeatureMask::latent_only(), 20, 0, 0);
  h.init_lo = -0.2;
  h.init_hi = 0.6;
  Rng rng(3);
  const ModelParams p = init_params(h, 5000, rng);
  const auto x = p.X.flat();
  ASSERT_EQ(x.size(), 100000u);
  double sum = 0.0;
  for (double v : x) {
    sum += v;
    EXPECT_GE(v, h.init_lo);
    EXPECT_LT(v, h.init_hi);
  }
  const double sd = (h.init_hi - h.init_lo) / std::sqrt(12.0);
  EXPECT_LT(std::abs(sum / x.size() - 0.2), 4.0 * sd / std::sqrt(static_cast<double>(x.size())));
}

TEST(InitParams, InactiveSlicesHaveNoBlocks) {
  const Hyper h = make_hyper({true, false, true}, 2, 3, 4);
  Rng rng(1);
  const ModelParams p = init_params(h, 4, rng);
  EXPECT_TRUE(p.E.empty());
  EXPECT_EQ(p.V.rows(), 2u);
  EXPECT_EQ(p.InMat.cols(), 4u);
}

TEST(ItemInput, ZeroEmbeddingsLeaveOnlyLatentSlice) {
  const Dataset ds = make_dataset(make_corpus(3, {{"u", {0, 1}, {}}}), 2, 2, 1);
  const Hyper h = make_hyper(FeatureMask::all(), 2, 2, 2);
  Rng rng(1);
  ModelParams p = init_params(h, 3, rng);
  p.E = Mat(2, 2);
  p.V = Mat(2, 2);
  const ItemInput in = item_input(1, p, ds.features, h);
  EXPECT_EQ(in.full, (Vec{p.X(1, 0), p.X(1, 1), 0, 0, 0, 0}));
}

TEST(ItemInput, HandArithmetic) {
  Dataset ds;
  ds.corpus = make_corpus(1, {});
  ds.features.visual = Mat::from_rows({{0.25}});
  ds.features.textual = Mat::from_rows({{0.5}});
  const Hyper h = make_hyper(FeatureMask::all(), 1, 1, 1);
  ModelParams p;
  p.X = Mat::from_rows({{0.5}});
  p.E = Mat::from_rows({{2}});
  p.V = Mat::from_rows({{-1}});
  EXPECT_EQ(item_input(0, p, ds.features, h).full, (Vec{0.5, 0.5, -0.5}));
}

TEST(ItemInput, LatentOnlyInputIsTheLatentRow) {
  const Dataset ds = make_dataset(make_corpus(4, {}), 3, 3, 2);
  const Hyper h = make_hyper(FeatureMask::latent_only(), 3, 0, 0);
  Rng rng(4);
  const ModelParams p = init_params(h, 4, rng);
  const ItemInput in = item_input(2, p, ds.features, h);
  ASSERT_EQ(in.full.size(), 3u);
  EXPECT_TRUE(std::equal(in.full.begin(), in.full.end(), p.X.row(2).begin()));
}

TEST(ItemInput, SliceOffsetsFollowMask) {
  const Hyper h = make_hyper({false, true, true}, 2, 1, 1);
  EXPECT_FALSE(h.offset(Slice::kLatent));
  EXPECT_EQ(h.offset(Slice::kVisual), 0u);
  EXPECT_EQ(h.offset(Slice::kTextual), 2u);
  EXPECT_EQ(h.width(), 4u);
}

TEST(StepHidden, ZeroMatricesGiveHalf) {
  ModelParams p;
  p.InMat = Mat(3, 3);
  p.RecMat = Mat(3, 3);
  const HiddenState next = step_hidden(HiddenState{{0.1, 0.2, 0.3}}, ItemInput{{1, -1, 4}}, p);
  EXPECT_EQ(next.full, (Vec{0.5, 0.5, 0.5}));
}

TEST(StepHidden, ScalarHandValue) {
  ModelParams p;
  p.InMat = Mat::from_rows({{1}});
  p.RecMat = Mat::from_rows({{1}});
  const HiddenState next = step_hidden(HiddenState{{0.5}}, ItemInput{{0.3}}, p);
  EXPECT_NEAR(next.full[0], 0.68997448112761, 1e-13);
}

TEST(StepHidden, EntriesStrictlyInsideUnitInterval) {
  Rng rng(5);
  ModelParams p;
  p.InMat = Mat(4, 4);
  p.RecMat = Mat(4, 4);
  for (int trial = 0; trial < 100; ++trial) {
    for (double& v : p.InMat.flat()) v = rng.uniform(-3, 3);
    for (double& v : p.RecMat.flat()) v = rng.uniform(-3, 3);
    Vec x(4), h(4);
    for (double& v : x) v = rng.uniform(-2, 2);
    for (double& v : h) v = rng.uniform(0, 1);
    for (double v : step_hidden(HiddenState{h}, ItemInput{x}, p).full) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(RunSequence, SingleItemGivesSingleState) {
  const Dataset ds = make_dataset(make_corpus(3, {{"u", {2}, {}}}), 0, 0, 1);
  const Hyper h = make_hyper(FeatureMask::latent_only(), 2, 0, 0);
  Rng rng(1);
  const ModelParams p = init_params(h, 3, rng);
  EXPECT_EQ(run_sequence(0, p, ds.features, ds.corpus, h).size(), 1u);
}

TEST(RunSequence, AllZeroParamsGiveHalfEverywhere) {
  const Dataset ds = make_dataset(make_corpus(4, {{"u", {0, 3, 1, 2}, {}}}), 2, 2, 1);
  Hyper h = make_hyper(FeatureMask::all(), 2, 2, 2);
  h.init_lo = h.init_hi = 0.0;
  Rng rng(1);
  const ModelParams p = init_params(h, 4, rng);
  for (const auto& s : run_sequence(0, p, ds.features, ds.corpus, h)) EXPECT_EQ(s.full, Vec(6, 0.5));
}

TEST(RunSequence, ScalarTwoStepRecurrence) {
  const Dataset ds = make_dataset(make_corpus(2, {{"u", {0, 1}, {}}}), 0, 0, 1);
  const Hyper h = make_hyper(FeatureMask::latent_only(), 1, 0, 0);
  ModelParams p;
  p.X = Mat::from_rows({{0.4}, {-0.9}});
  p.InMat = Mat::from_rows({{0.7}});
  p.RecMat = Mat::from_rows({{-1.2}});
  const auto states = run_sequence(0, p, ds.features, ds.corpus, h);
  const double h1 = logistic(0.7 * 0.4);
  const double h2 = logistic(0.7 * -0.9 + -1.2 * h1);
  ASSERT_EQ(states.size(), 2u);
  EXPECT_NEAR(states[0].full[0], h1, 1e-12);
  EXPECT_NEAR(states[1].full[0], h2, 1e-12);
}

TEST(RunSequence, UnknownUserIsADataError) {
  const Dataset ds = make_dataset(make_corpus(2, {{"u", {0, 1}, {}}}), 0, 0, 1);
  const Hyper h = make_hyper(FeatureMask::latent_only(), 1, 0, 0);
  Rng rng(1);
  const ModelParams p = init_params(h, 2, rng);
  EXPECT_THROW(run_sequence(3, p, ds.features, ds.corpus, h), DataError);
}

TEST(ScorePair, IdenticalItemsAndZeroStateScoreZero) {
  const ItemInput a{{0.3, -0.2}}, b{{0.1, 0.9}};
  EXPECT_EQ(score_pair(HiddenState{{0.4, 0.6}}, a, a).value, 0.0);
  EXPECT_EQ(score_pair(HiddenState::zero(2), a, b).value, 0.0);
}

TEST(ScorePair, HandDifference) {
  const PairScore s = score_pair(HiddenState{{0.5, 0.25}}, ItemInput{{1, 2}}, ItemInput{{-1, 4}});
  EXPECT_EQ(s.pos_score, 1.0);
  EXPECT_EQ(s.neg_score, 0.5);
  EXPECT_EQ(s.value, 0.5);
}

TEST(ScorePair, AntisymmetryIsExact) {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec h(5), p(5), q(5);
    for (auto* v : {&h, &p, &q})
      for (double& x : *v) x = rng.uniform(-1, 1);
    EXPECT_EQ(score_pair(HiddenState{h}, ItemInput{p}, ItemInput{q}).value,
              -score_pair(HiddenState{h}, ItemInput{q}, ItemInput{p}).value);
  }
}

TEST(RankCandidates, HandSetScores) {
  const Dataset ds = make_dataset(make_corpus(4, {{"u", {0}, {}}}), 0, 0, 1);
  const Hyper h = make_hyper(FeatureMask::latent_only(), 1, 0, 0);
  ModelParams p;
  p.X = Mat::from_rows({{0.0}, {0.2}, {-0.1}, {0.7}});
  p.InMat = Mat::from_rows({{1}});
  p.RecMat = Mat::from_rows({{0}});
  // Final state sigma(0) = 0.5, so scores are half the latent values.
  const auto ranked = rank_candidates(0, p, ds.features, ds.corpus, h);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0], (ScoredItem{3, 0.35}));
  EXPECT_EQ(ranked[1], (ScoredItem{1, 0.1}));
  EXPECT_EQ(ranked[2], (ScoredItem{2, -0.05}));
}

TEST(RankCandidates, ZeroScoresFallBackToItemOrder) {
  const Dataset ds = make_dataset(make_corpus(6, {{"u", {4, 1}, {}}}), 0, 0, 1);
  const Hyper h = make_hyper(FeatureMask::latent_only(), 2, 0, 0);
  Rng rng(1);
  ModelParams p = init_params(h, 6, rng);
  p.X = Mat(6, 2);
  const auto ranked = rank_candidates(0, p, ds.features, ds.corpus, h);
  std::vector<ItemIndex> order;
  for (const auto& s : ranked) {
    order.push_back(s.item);
    EXPECT_EQ(s.score, 0.0);
  }
  EXPECT_EQ(order, (std::vector<ItemIndex>{0, 2, 3, 5}));
}

TEST(RankCandidates, PermutationOfUnownedItems) {
  const Dataset ds = testing::small_synth(10, 30);
  const Hyper h = make_hyper(FeatureMask::all(), 3, 4, 4);
  Rng rng(2);
  const ModelParams p = init_params(h, ds.corpus.num_items(), rng);
  for (UserIndex u = 0; u < ds.corpus.num_users(); ++u) {
    auto ranked = rank_candidates(u, p, ds.features, ds.corpus, h);
    std::vector<ItemIndex> items;
    for (const auto& s : ranked) items.push_back(s.item);
    std::sort(items.begin(), items.end());
    EXPECT_EQ(items, ds.corpus.candidates(u));
    for (ItemIndex i : items) EXPECT_FALSE(ds.corpus.owns(u, i));
  }
}

TEST(MaskedAblation, LatentOnlyMatchesModelWithoutFeatureFiles) {
  const Dataset with = testing::small_synth(8, 30);
  Dataset without = with;
  without.features = attach_features(without.corpus, nullptr, nullptr);
  const Hyper h = make_hyper(FeatureMask::latent_only(), 4, 0, 0);
  Rng rng(6);
  const ModelParams p = init_params(h, with.corpus.num_items(), rng);
  for (UserIndex u = 0; u < with.corpus.num_users(); ++u) {
    const auto a = run_sequence(u, p, with.features, with.corpus, h);
    const auto b = run_sequence(u, p, without.features, without.corpus, h);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t t = 0; t < a.size(); ++t) EXPECT_EQ(a[t].full, b[t].full);
    EXPECT_EQ(score_all_items(u, p, with.features, with.corpus, h),
              score_all_items(u, p, without.features, without.corpus, h));
  }
}

}  // namespace
}  // namespace seqrank
