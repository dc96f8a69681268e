// Copyright 2026 The bpdnn Authors. All Rights Reserved.
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

#include <gtest/gtest.h>

#include <set>

#include "bpdnn/bpd_matrix.hpp"
#include "oracles.hpp"

namespace bpdnn {
namespace {

// m=2, n=4, p=2, perms [0,1], values [1,2,3,4].
BpdMatrix small() { return BpdMatrix(2, 4, 2, {0, 1}, {1, 2, 3, 4}); }

TEST(MakeBpd, NaturalPermsCountUp) {
  const BpdMatrix w = make_bpd(4, 16, 4, PermPolicy::natural(), InitPolicy::zeros());
  ASSERT_EQ(w.block_count(), 4u);
  EXPECT_EQ(std::vector<std::uint32_t>(w.perms().begin(), w.perms().end()), (std::vector<std::uint32_t>{0, 1, 2, 3}));
}

TEST(MakeBpd, BlockOneIsDense) {
  const BpdMatrix w = make_bpd(2, 2, 1, PermPolicy::natural(), InitPolicy::filled(1.0));
  EXPECT_EQ(w.block_count(), 4u);
  for (const auto k : w.perms()) EXPECT_EQ(k, 0u);
  const DenseMatrix d = to_dense(w);
  for (const double v : d.data) EXPECT_EQ(v, 1.0);
}

TEST(MakeBpd, PaddedFiveByFive) {
  const BpdMatrix w = make_bpd(5, 5, 2, PermPolicy::natural(), InitPolicy::filled(1.0));
  EXPECT_EQ(w.rows_padded(), 6u);
  EXPECT_EQ(w.cols_padded(), 6u);
  EXPECT_EQ(w.block_count(), 9u);
  EXPECT_EQ(w.slot_count(), 18u);
  std::size_t padding = 0;
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    if (w.is_padding(s)) {
      ++padding;
      EXPECT_EQ(w.values()[s], 0.0) << "slot " << s;
    }
  }
  // Enumerated by hand over the 6x6 grid with k_l = l mod 2.
  EXPECT_EQ(padding, 5u);
}

TEST(MakeBpd, RandomPermsInRangeAndSeeded) {
  const auto a = make_bpd(40, 40, 5, PermPolicy::random(9), InitPolicy::zeros());
  const auto b = make_bpd(40, 40, 5, PermPolicy::random(9), InitPolicy::zeros());
  const auto c = make_bpd(40, 40, 5, PermPolicy::random(10), InitPolicy::zeros());
  EXPECT_EQ(a.perms().size(), 64u);
  for (const auto k : a.perms()) EXPECT_LT(k, 5u);
  EXPECT_EQ(a, b);
  EXPECT_NE(std::vector<std::uint32_t>(a.perms().begin(), a.perms().end()),
            std::vector<std::uint32_t>(c.perms().begin(), c.perms().end()));
}

TEST(MakeBpd, ScaledUniformBound) {
  const auto w = make_bpd(30, 40, 4, PermPolicy::natural(), InitPolicy::scaled_uniform(3));
  const double bound = 1.0 / std::sqrt(10.0);
  for (std::size_t s = 0; s < w.slot_count(); ++s) EXPECT_LE(std::abs(w.values()[s]), bound);
}

TEST(EntryAt, WorkedExample) {
  const BpdMatrix w = small();
  EXPECT_EQ(entry_at(w, 0, 3), 3.0);
  EXPECT_EQ(entry_at(w, 0, 1), 0.0);
  EXPECT_EQ(entry_at(w, 1, 2), 4.0);
  EXPECT_THROW(entry_at(w, 2, 0), std::out_of_range);
  EXPECT_THROW(entry_at(w, 0, 4), std::out_of_range);
}

TEST(ToDense, WorkedExample) {
  const DenseMatrix d = to_dense(small());
  const std::vector<double> expect{1, 0, 0, 3, 0, 2, 4, 0};
  EXPECT_EQ(d.data, expect);
}

TEST(ToDense, ZeroValuesGiveZeroMatrix) {
  const DenseMatrix d = to_dense(make_bpd(7, 9, 3, PermPolicy::random(1), InitPolicy::zeros()));
  for (const double v : d.data) EXPECT_EQ(v, 0.0);
}

TEST(Matvec, WorkedExamples) {
  const BpdMatrix w = small();
  EXPECT_EQ(matvec(w, std::vector<double>{1, 1, 1, 1}), (std::vector<double>{4, 6}));
  EXPECT_EQ(matvec(w, std::vector<double>{1, 0, 0, 2}), (std::vector<double>{7, 0}));
  EXPECT_EQ(matvec(w, std::vector<double>{0, 0, 0, 0}), (std::vector<double>{0, 0}));
  EXPECT_THROW(matvec(w, std::vector<double>{1, 1, 1}), std::invalid_argument);
}

TEST(BpdMatrix, ConstructorRejectsBadInput) {
  EXPECT_THROW(BpdMatrix(0, 4, 2, {}, {}), std::invalid_argument);
  EXPECT_THROW(BpdMatrix(2, 4, 0, {}, {}), std::invalid_argument);
  EXPECT_THROW(BpdMatrix(2, 4, 2, {0}, {1, 2, 3, 4}), std::invalid_argument);
  EXPECT_THROW(BpdMatrix(2, 4, 2, {0, 2}, {1, 2, 3, 4}), std::invalid_argument);
  EXPECT_THROW(BpdMatrix(2, 4, 2, {0, 1}, {1, 2, 3}), std::invalid_argument);
  // A nonzero padding slot.
  auto w = make_bpd(3, 3, 2, PermPolicy::natural(), InitPolicy::zeros());
  std::vector<double> values(w.values().begin(), w.values().end());
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    if (w.is_padding(s)) {
      values[s] = 1.0;
      break;
    }
  }
  EXPECT_THROW(BpdMatrix(3, 3, 2, std::vector<std::uint32_t>(w.perms().begin(), w.perms().end()), values),
               std::invalid_argument);
}

TEST(BpdMatrix, PositionsAreABijectionOntoThePattern) {
  const auto w = make_bpd(13, 22, 4, PermPolicy::random(5), InitPolicy::zeros());
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    const SlotPosition pos = w.position(s);
    EXPECT_TRUE(seen.insert({pos.row, pos.col}).second);
    EXPECT_EQ(pos.padding, pos.row >= w.rows() || pos.col >= w.cols());
    if (!pos.padding) {
      EXPECT_EQ(w.slot_for_row(pos.row, pos.col / 4), s);
      EXPECT_EQ(w.col_for_row(pos.row, pos.col / 4), pos.col);
      EXPECT_EQ(w.row_for_col(pos.col, pos.row / 4), pos.row);
    }
  }
}

// Property sweeps over random shapes.
class RandomShapes : public ::testing::TestWithParam<int> {};

TEST_P(RandomShapes, MatvecMatchesDenseOracle) {
  Rng rng(static_cast<std::uint64_t>(GetParam()));
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng.below(64);
    const std::size_t n = 1 + rng.below(64);
    const std::size_t p = 1 + rng.below(8);
    const auto w = make_bpd(m, n, p, PermPolicy::random(rng.next()), InitPolicy::scaled_uniform(rng.next()));
    const auto x = oracle::random_vector(n, rng);
    OpCounter ops;
    const auto y = matvec(w, x, &ops);
    EXPECT_LE(oracle::relative_error(y, oracle::dense_matvec(oracle::expand(w), x)), 1e-12);
    EXPECT_EQ(ops.multiplies, m * w.cols_padded() / p);
    EXPECT_EQ(to_dense(w), oracle::expand(w));
  }
}

TEST_P(RandomShapes, OneCandidatePerRowAndColumnInEachBlock) {
  Rng rng(static_cast<std::uint64_t>(GetParam()) + 100);
  const std::size_t p = 1 + rng.below(8);
  const std::size_t m = p * (1 + rng.below(6));
  const std::size_t n = p * (1 + rng.below(6));
  // Values are all ones so every candidate position is visible.
  const auto d = to_dense(make_bpd(m, n, p, PermPolicy::random(rng.next()), InitPolicy::filled(1.0)));
  for (std::size_t bi = 0; bi < m / p; ++bi) {
    for (std::size_t bj = 0; bj < n / p; ++bj) {
      for (std::size_t r = 0; r < p; ++r) {
        double row_sum = 0.0;
        double col_sum = 0.0;
        for (std::size_t t = 0; t < p; ++t) {
          row_sum += d(bi * p + r, bj * p + t);
          col_sum += d(bi * p + t, bj * p + r);
        }
        EXPECT_EQ(row_sum, 1.0);
        EXPECT_EQ(col_sum, 1.0);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomShapes, ::testing::Range(1, 11));

}  // namespace
}  // namespace bpdnn
