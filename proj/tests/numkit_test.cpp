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
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "seqrank/numkit.hpp"

namespace seqrank {
namespace {

TEST(Dot, HandValues) {
  EXPECT_EQ(dot(Vec{1, 2}, Vec{3, 4}), 11.0);
  EXPECT_EQ(dot(Vec{0.5}, Vec{0.5}), 0.25);
  EXPECT_EQ(dot(Vec{1.5, -2, 7}, Vec{0, 0, 0}), 0.0);
}

TEST(Dot, LengthMismatchThrows) { EXPECT_THROW(dot(Vec{1, 2}, Vec{1}), DimensionError); }

TEST(Dot, SymmetricAndBilinear) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Vec a(5), b(5), c(5);
    for (auto* v : {&a, &b, &c})
      for (double& x : *v) x = rng.uniform(-2, 2);
    const double s = rng.uniform(-3, 3);
    EXPECT_EQ(dot(a, b), dot(b, a));
    Vec lin(5);
    for (int k = 0; k < 5; ++k) lin[k] = s * a[k] + c[k];
    EXPECT_NEAR(dot(lin, b), s * dot(a, b) + dot(c, b), 1e-12);
  }
}

TEST(Matvec, HandValues) {
  EXPECT_EQ(matvec(Mat::identity(2), Vec{3, 5}), (Vec{3, 5}));
  EXPECT_EQ(matvec(Mat(2, 2), Vec{3, 5}), (Vec{0, 0}));
  EXPECT_EQ(matvec(Mat::from_rows({{1, 2}, {3, 4}}), Vec{1, 1}), (Vec{3, 7}));
}

TEST(Matvec, TransposedMatchesExplicitTranspose) {
  const Mat m = Mat::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(matvec_transposed(m, Vec{1, -1}), (Vec{-3, -3, -3}));
  EXPECT_THROW(matvec(m, Vec{1, 2}), DimensionError);
  EXPECT_THROW(matvec_transposed(m, Vec{1, 2, 3}), DimensionError);
}

TEST(Outer, HandValues) {
  EXPECT_EQ(outer(Vec{1, 2}, Vec{3}), Mat::from_rows({{3}, {6}}));
  EXPECT_EQ(outer(Vec{0, 0}, Vec{4, 5}), Mat(2, 2));
  EXPECT_EQ(outer(Vec{1}, Vec{1}), Mat::from_rows({{1}}));
}

TEST(Outer, ApplyingToBasisRecoversScaledColumn) {
  const Vec a{1.5, -2, 0.25};
  const Vec b{2, 3, -1, 4};
  const Mat m = outer(a, b);
  for (std::size_t j = 0; j < b.size(); ++j) {
    Vec e(b.size(), 0.0);
    e[j] = 1.0;
    const Vec col = matvec(m, e);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(col[i], a[i] * b[j]);
  }
}

TEST(AddOuter, AccumulatesScaledProduct) {
  Mat m = Mat::from_rows({{1, 1}, {1, 1}});
  add_outer(m, 2.0, Vec{1, 2}, Vec{3, 4});
  EXPECT_EQ(m, Mat::from_rows({{7, 9}, {13, 17}}));
  EXPECT_THROW(add_outer(m, 1.0, Vec{1}, Vec{1, 2}), DimensionError);
}

TEST(Hadamard, HandValues) {
  EXPECT_EQ(hadamard(Vec{1, 2}, Vec{3, 4}), (Vec{3, 8}));
  EXPECT_EQ(hadamard(Vec{-1.5, 2}, Vec{1, 1}), (Vec{-1.5, 2}));
  EXPECT_EQ(hadamard(Vec{-1.5, 2}, Vec{0, 0}), (Vec{0, 0}));
}

TEST(VectorOps, SubtractAxpyNorm) {
  EXPECT_EQ(subtract(Vec{5, 1}, Vec{2, 3}), (Vec{3, -2}));
  Vec y{1, 1};
  axpy(2.0, Vec{1, -1}, y);
  EXPECT_EQ(y, (Vec{3, -1}));
  EXPECT_EQ(squared_norm(Vec{3, 4}), 25.0);
  EXPECT_TRUE(all_finite(Vec{1, 2}));
  EXPECT_FALSE(all_finite(Vec{1, std::numeric_limits<double>::quiet_NaN()}));
  EXPECT_FALSE(all_finite(Vec{std::numeric_limits<double>::infinity()}));
}

TEST(Mat, FromRowsRejectsRaggedInput) { EXPECT_THROW(Mat::from_rows({{1, 2}, {3}}), DimensionError); }

TEST(Sigmoid, FixedPoints) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_GT(sigmoid(40.0), 1.0 - 1e-15);
  // 1 - sigmoid(40) is about 4e-18, below half an ulp of 1.0.
  EXPECT_LE(sigmoid(40.0), 1.0);
  EXPECT_LT(sigmoid(30.0), 1.0);
}

TEST(Sigmoid, ComplementIdentityAndRange) {
  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const double x = rng.uniform(-30, 30);
    EXPECT_NEAR(sigmoid(x) + sigmoid(-x), 1.0, 1e-15);
    EXPECT_GT(sigmoid(x), 0.0);
    EXPECT_LT(sigmoid(x), 1.0);
  }
}

TEST(Sigmoid, MonotoneAndFiniteEverywhere) {
  double prev = sigmoid(-50.0);
  for (double x = -49.75; x <= 50.0; x += 0.25) {
    const double s = sigmoid(x);
    // Above about 36.7 the value rounds to 1.0, so strictness stops there.
    if (x <= 30.0) {
      EXPECT_GT(s, prev) << "x=" << x;
    } else {
      EXPECT_GE(s, prev) << "x=" << x;
    }
    prev = s;
  }
  for (double x : {-1e308, -745.0, 745.0, 1e308}) {
    EXPECT_TRUE(std::isfinite(sigmoid(x)));
    EXPECT_TRUE(std::isfinite(log_sigmoid(x)));
  }
}

TEST(LogSigmoid, MatchesDirectFormulaAndStaysStable) {
  for (double x : {-5.0, -0.5, 0.0, 0.5, 5.0}) EXPECT_NEAR(log_sigmoid(x), std::log(sigmoid(x)), 1e-14);
  EXPECT_EQ(log_sigmoid(0.0), std::log(0.5));
  EXPECT_NEAR(log_sigmoid(-1000.0), -1000.0, 1e-9);
}

TEST(Rng, SeededStreamsRepeat) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(Rng(42).next(), Rng(43).next());
}

TEST(Rng, FirstWordMatchesStandardEngine) {
  // The mt19937_64 output sequence is fixed by the C++ standard: the 10000th
  // draw from the default seed is 9981545732273789042.
  Rng r(5489u);
  std::uint64_t x = 0;
  for (int k = 0; k < 10000; ++k) x = r.next();
  EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, UniformAndIndexStayInRange) {
  Rng r(9);
  for (int k = 0; k < 10000; ++k) {
    const double u = r.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.index(7), 7u);
  }
  EXPECT_THROW(r.index(0), Error);
}

TEST(Rng, NormalMomentsWithinClt) {
  Rng r(21);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_LT(std::abs(s / n), 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng r(5);
  std::vector<int> v(50);
  for (int k = 0; k < 50; ++k) v[k] = k;
  r.shuffle(v);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < 50; ++k) EXPECT_EQ(sorted[k], k);
}

TEST(MixSeed, DistinctInputsGiveDistinctOutputs) {
  EXPECT_NE(mix_seed(0), mix_seed(1));
  EXPECT_EQ(mix_seed(7), mix_seed(7));
  // splitmix64 from state 0: first output is 0xe220a8397b1dcdaf.
  EXPECT_EQ(mix_seed(0), 0xe220a8397b1dcdafULL);
}

}  // namespace
}  // namespace seqrank
