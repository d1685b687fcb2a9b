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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"

namespace seqrank {
namespace {

using testing::make_corpus;
using testing::TempDir;

RawSequences parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sequences(in, "seq.tsv");
}

TEST(ParseSequences, ReadsUsersInFileOrder) {
  const auto raw = parse("u2\ta,b,c\nu1\tc\r\n\nu3\tx,y\n");
  ASSERT_EQ(raw.size(), 3u);
  EXPECT_EQ(raw.user_ids, (std::vector<std::string>{"u2", "u1", "u3"}));
  EXPECT_EQ(raw.items[0], (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(raw.items[1], (std::vector<std::string>{"c"}));
}

TEST(ParseSequences, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("u1\ta\nno-tab-here\n"), 2u);
  EXPECT_EQ(line_of("u1\ta\nu2\ta,,b\n"), 2u);
  EXPECT_EQ(line_of("u1\ta\n\nu1\tb\n"), 3u);
  EXPECT_EQ(line_of("\tabc\n"), 1u);
}

TEST(TrainLength, CeilingWithFloorOfTwo) {
  EXPECT_EQ(train_length(10, 0.9), 9u);
  EXPECT_EQ(train_length(10, 0.7), 7u);
  EXPECT_EQ(train_length(11, 0.9), 10u);
  EXPECT_EQ(train_length(3, 0.1), 2u);
  EXPECT_EQ(train_length(2, 0.9), 2u);
}

TEST(LoadCorpus, TenItemsSplitNineToOne) {
  TempDir dir;
  const auto path = dir.write("seq.tsv", "u\ta,b,c,d,e,f,g,h,i,j\n");
  const Corpus c = load_corpus(path, 10, 0.9);
  ASSERT_EQ(c.num_users(), 1u);
  EXPECT_EQ(c.train_seq[0].size(), 9u);
  EXPECT_EQ(c.test_seq[0].size(), 1u);
  EXPECT_EQ(c.item_ids[c.test_seq[0][0]], "j");
}

TEST(LoadCorpus, ShortUserIsDropped) {
  TempDir dir;
  const auto path = dir.write("seq.tsv", "short\ta,b,c,d\nlong\ta,b,c,d,e\n");
  const Corpus c = load_corpus(path, 5, 0.9);
  EXPECT_EQ(c.user_ids, (std::vector<std::string>{"long"}));
}

TEST(LoadCorpus, MissingFileAndEmptyResultAreDataErrors) {
  EXPECT_THROW(load_corpus("/nonexistent/seq.tsv", 2, 0.9), DataError);
  TempDir dir;
  const auto path = dir.write("seq.tsv", "u\ta,b\n");
  EXPECT_THROW(load_corpus(path, 3, 0.9), DataError);
}

TEST(LoadCorpus, ThreeUserToyMatchesHandSplit) {
  // min_len 3, split 0.5:
  //   u1 a,b,c,d   -> train a,b       test c,d
  //   u2 d,a,e     -> train d,a       test e
  //   u3 b,b,a,c,b -> train b,b,a     test c,b -> filtered to c
  //   u4 z,y       -> dropped (too short), so z and y are not catalog items
  TempDir dir;
  const auto path = dir.write("seq.tsv", "u1\ta,b,c,d\nu2\td,a,e\nu3\tb,b,a,c,b\nu4\tz,y\n");
  const Corpus c = load_corpus(path, 3, 0.5);
  EXPECT_EQ(c.item_ids, (std::vector<std::string>{"a", "b", "c", "d", "e"}));
  EXPECT_EQ(c.user_ids, (std::vector<std::string>{"u1", "u2", "u3"}));
  using V = std::vector<ItemIndex>;
  EXPECT_EQ(c.train_seq, (std::vector<V>{{0, 1}, {3, 0}, {1, 1, 0}}));
  EXPECT_EQ(c.test_seq, (std::vector<V>{{2, 3}, {4}, {2}}));
  EXPECT_EQ(c.candidates(2), (V{2, 3, 4}));
}

TEST(SplitCorpus, ConcatenationReproducesRawSequence) {
  Rng rng(4);
  RawSequences raw;
  for (int u = 0; u < 30; ++u) {
    raw.user_ids.push_back("u" + std::to_string(u));
    std::vector<std::string> items;
    const std::size_t n = 2 + rng.index(15);
    for (std::size_t k = 0; k < n; ++k) items.push_back("i" + std::to_string(rng.index(12)));
    raw.items.push_back(items);
  }
  for (double frac : {0.1, 0.5, 0.9}) {
    const Corpus c = split_corpus(raw, 2, frac);
    ASSERT_EQ(c.num_users(), raw.size());
    for (UserIndex u = 0; u < c.num_users(); ++u) {
      std::vector<std::string> joined;
      for (ItemIndex i : c.train_seq[u]) joined.push_back(c.item_ids[i]);
      for (ItemIndex i : c.test_seq[u]) joined.push_back(c.item_ids[i]);
      EXPECT_EQ(joined, raw.items[u]);
    }
  }
}

TEST(SplitCorpus, RejectsBadParameters) {
  RawSequences raw{{"u"}, {{"a", "b"}}};
  EXPECT_THROW(split_corpus(raw, 2, 0.0), ConfigError);
  EXPECT_THROW(split_corpus(raw, 2, 1.0), ConfigError);
  EXPECT_THROW(split_corpus(raw, 1, 0.5), ConfigError);
}

TEST(FilterTestNewItems, DropsOwnedAndRepeatedItems) {
  // items a=0, b=1, c=2; train [b, c], test [a, b, a]
  Corpus c = make_corpus(3, {{"u", {1, 2}, {0, 1, 0}}});
  c = filter_test_new_items(c);
  EXPECT_EQ(c.test_seq[0], (std::vector<ItemIndex>{0}));
}

TEST(FilterTestNewItems, DisjointTestIsUnchanged) {
  Corpus c = make_corpus(5, {{"u", {0, 1}, {3, 2, 4}}});
  EXPECT_EQ(filter_test_new_items(c).test_seq[0], (std::vector<ItemIndex>{3, 2, 4}));
}

TEST(FilterTestNewItems, FullyOwnedTestLeavesUserOutOfEvaluation) {
  Corpus c = make_corpus(4, {{"a", {0, 1}, {1, 0}}, {"b", {0, 1}, {2}}});
  c = filter_test_new_items(c);
  EXPECT_TRUE(c.test_seq[0].empty());
  EXPECT_EQ(c.eval_users(), (std::vector<UserIndex>{1}));
}

FeatureTable features(const std::string& text, std::size_t dim) {
  std::istringstream in(text);
  return parse_features(in, dim, "f.tsv");
}

TEST(Features, MinMaxHandValues) {
  FeatureTable t = features("#dims 2\na\t0 7\nb\t2 7\nc\t4 7\n", 2);
  normalize_min_max(t, 0.0, 0.5);
  EXPECT_EQ(t.rows[0][0], 0.0);
  EXPECT_EQ(t.rows[1][0], 0.25);
  EXPECT_EQ(t.rows[2][0], 0.5);
  for (const auto& r : t.rows) EXPECT_EQ(r[1], 0.0);  // constant column maps to lo
}

TEST(Features, EndpointsMapToRangeBoundsAndNormalizationIsIdempotent) {
  Rng rng(8);
  FeatureTable t;
  t.dims = 3;
  for (int k = 0; k < 20; ++k) {
    t.ids.push_back("i" + std::to_string(k));
    t.rows.push_back({rng.uniform(-3, 9), rng.uniform(0, 1), rng.uniform(100, 200)});
  }
  normalize_min_max(t, -0.5, 0.5);
  for (std::size_t d = 0; d < 3; ++d) {
    double mn = 1e9, mx = -1e9;
    for (const auto& r : t.rows) {
      mn = std::min(mn, r[d]);
      mx = std::max(mx, r[d]);
    }
    EXPECT_EQ(mn, -0.5);
    EXPECT_EQ(mx, 0.5);
  }
  FeatureTable again = t;
  normalize_min_max(again, -0.5, 0.5);
  for (std::size_t k = 0; k < t.rows.size(); ++k)
    for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(again.rows[k][d], t.rows[k][d], 1e-12);
}

TEST(Features, ParseErrorsNameTheLine) {
  auto line_of = [](const std::string& text, std::size_t dim) {
    try {
      features(text, dim);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("#dims 2\na\t1 2\nb\t1 x\n", 2), 3u);
  EXPECT_EQ(line_of("#dims 2\na\t1 2 3\n", 2), 2u);
  EXPECT_EQ(line_of("#dims 3\na\t1 2 3\n", 2), 1u);
  EXPECT_EQ(line_of("a\t1 2\n", 2), 1u);
  EXPECT_EQ(line_of("#dims 1\na\t1\na\t2\n", 1), 3u);
  EXPECT_EQ(line_of("#dims 1\na\tnan\n", 1), 2u);
}

TEST(Features, WriteThenParseRoundTripsExactly) {
  FeatureTable t;
  t.dims = 2;
  t.ids = {"x", "y"};
  t.rows = {{0.1, -1.0 / 3.0}, {1e-300, 12345.678901234567}};
  std::ostringstream out;
  write_features(out, t);
  const FeatureTable back = features(out.str(), 2);
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(Features, MissingItemsGetZeroRowsAndAWarning) {
  const Corpus c = make_corpus(3, {{"u", {0, 1}, {2}}});
  FeatureTable t;
  t.dims = 2;
  t.ids = {"i0001", "unknown"};
  t.rows = {{0.25, 0.5}, {9, 9}};
  const FeatureStore fs = attach_features(c, &t, nullptr);
  EXPECT_EQ(fs.missing_visual, 2u);
  EXPECT_EQ(fs.visual.rows(), 3u);
  EXPECT_EQ(fs.visual(1, 0), 0.25);
  EXPECT_EQ(fs.visual(0, 0), 0.0);
  EXPECT_EQ(fs.visual(2, 1), 0.0);
  EXPECT_EQ(fs.textual_dim(), 0u);
  ASSERT_EQ(fs.warnings.size(), 1u);
}

TEST(SampleTriples, ForcedNegative) {
  const Corpus c = make_corpus(3, {{"u", {0, 1}, {}}});
  Rng rng(1);
  const auto t = sample_triples(c, 0, rng);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], (TrainingTriple{0, 1, 1, 2}));
}

TEST(SampleTriples, SeededRepeatIsIdentical) {
  const Corpus c = make_corpus(20, {{"u", {0, 3, 5, 7, 3}, {}}});
  Rng a(5), b(5);
  EXPECT_EQ(sample_triples(c, 0, a), sample_triples(c, 0, b));
}

TEST(SampleTriples, NegativesNeverOwnedAndPositionsCoverSequence) {
  const testing::UserSpec u{"u", {4, 1, 4, 6, 2, 9}, {}};
  const Corpus c = make_corpus(12, {u});
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const auto ts = sample_triples(c, 0, rng);
    ASSERT_EQ(ts.size(), u.train.size() - 1);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      EXPECT_EQ(ts[k].pos, k + 1);
      EXPECT_EQ(ts[k].p, u.train[k + 1]);
      EXPECT_FALSE(c.owns(0, ts[k].q));
    }
  }
}

TEST(SampleTriples, NegativesAreUniformWithinFourSigma) {
  // Owns {0, 1}; the four other items should each be drawn with p = 1/4.
  const Corpus c = make_corpus(6, {{"u", {0, 1}, {}}});
  Rng rng(17);
  std::vector<int> counts(6, 0);
  const int n = 10000;
  for (int k = 0; k < n; ++k) ++counts[sample_triples(c, 0, rng)[0].q];
  const double mean = n * 0.25, sigma = std::sqrt(n * 0.25 * 0.75);
  EXPECT_EQ(counts[0] + counts[1], 0);
  for (int i = 2; i < 6; ++i) EXPECT_LT(std::abs(counts[i] - mean), 4 * sigma) << "item " << i;
}

TEST(SampleTriples, UserOwningEveryItemCannotBeSampled) {
  const Corpus c = make_corpus(2, {{"u", {0, 1}, {}}});
  Rng rng(1);
  EXPECT_THROW(sample_triples(c, 0, rng), SamplingError);
}

TEST(Corpus, LookupsAndOwnership) {
  const Corpus c = make_corpus(5, {{"alice", {3, 1, 3}, {0}}});
  EXPECT_EQ(c.user("alice"), 0u);
  EXPECT_THROW(c.user("bob"), DataError);
  EXPECT_EQ(c.find_item("i0003"), 3u);
  EXPECT_FALSE(c.find_item("zzz"));
  EXPECT_EQ(c.owned(0), (std::vector<ItemIndex>{1, 3}));
  EXPECT_EQ(c.candidates(0), (std::vector<ItemIndex>{0, 2, 4}));
}

}  // namespace
}  // namespace seqrank
