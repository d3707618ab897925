// Copyright 2026 the coldsel authors
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

#include <numeric>

#include "coldsel/oracle.hpp"
#include "test_support.hpp"

using namespace coldsel;
using coldsel::ref::gaussian;

namespace {

EmbeddingMatrix axis_users() { return EmbeddingMatrix::from_rows({{1, 0}, {0, 1}}); }
EmbeddingMatrix three_items() { return EmbeddingMatrix::from_rows({{1, 0}, {0, 1}, {0.6, 0.6}}); }

}  // namespace

TEST(ExactTopK, HandCases) {
  const auto x = three_items();
  const std::vector<double> u1{1, 0}, u2{0, 1};
  auto t = oracle::exact_top_k(u1, x, 1);
  EXPECT_EQ(t.items, std::vector<Index>{0});
  EXPECT_EQ(t.values, std::vector<double>{1.0});
  t = oracle::exact_top_k(u2, x, 2);
  EXPECT_EQ(t.items, (std::vector<Index>{1, 2}));
  EXPECT_EQ(t.values, (std::vector<double>{1.0, 0.6}));
  const auto single = EmbeddingMatrix::from_rows({{-3, 2}});
  EXPECT_EQ(oracle::exact_top_k(u1, single, 1).items, std::vector<Index>{0});
}

TEST(ExactTopK, RejectsBadK) {
  const std::vector<double> u{1, 0};
  EXPECT_THROW(oracle::exact_top_k(u, three_items(), 0), ValidationError);
  EXPECT_THROW(oracle::exact_top_k(u, three_items(), 4), ValidationError);
}

TEST(ExactTopK, TiesByAscendingIndex) {
  const auto x = EmbeddingMatrix::from_rows({{1, 0}, {2, 0}, {2, 0}, {1, 0}});
  const std::vector<double> u{1, 0};
  const auto t = oracle::exact_top_k(u, x, 4);
  EXPECT_EQ(t.items, (std::vector<Index>{1, 2, 0, 3}));
}

TEST(FavLoss, HandCases) {
  const auto u = axis_users();
  const auto x = three_items();
  const std::vector<Index> all{0, 1, 2}, y2{2}, y0{0};
  EXPECT_EQ(oracle::fav_loss(u, x, all), 0.0);
  EXPECT_NEAR(oracle::fav_loss(u, x, y2), 0.8, 1e-12);
  EXPECT_EQ(oracle::fav_loss(u, x, y0), 1.0);
  EXPECT_THROW(oracle::fav_loss(u, x, std::vector<Index>{}), ValidationError);
}

TEST(Coverage, HandCases) {
  const auto u = axis_users();
  const auto x = three_items();
  EXPECT_NEAR(oracle::coverage_value(u, x, std::vector<Index>{2}), 1.2, 1e-12);
  EXPECT_EQ(oracle::coverage_value(u, x, std::vector<Index>{0, 1}), 2.0);
}

TEST(Coverage, MatchesReferenceOnRandomInstances) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto users = gaussian(rng, 12, 4);
    const auto items = gaussian(rng, 20, 4);
    std::vector<Index> s{3, 9, 17};
    EXPECT_NEAR(oracle::coverage_value(users, items, s), ref::coverage(users, items, s), 1e-9);
  }
}

TEST(Exhaustive, HandCases) {
  const auto u = axis_users();
  const auto x = three_items();
  auto r = oracle::exhaustive_optimal(u, x, 1);
  EXPECT_EQ(r.subset, std::vector<Index>{2});
  EXPECT_NEAR(r.loss, 0.8, 1e-12);
  r = oracle::exhaustive_optimal(u, x, 2);
  EXPECT_EQ(r.subset, (std::vector<Index>{0, 1}));
  EXPECT_EQ(r.loss, 0.0);
  r = oracle::exhaustive_optimal(u, x, 3);
  EXPECT_EQ(r.subset, (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(r.loss, 0.0);
}

TEST(Exhaustive, MatchesBitmaskSweep) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 3 + rng() % 10, m = 1 + rng() % 4;
    if (m > n) continue;
    const auto users = gaussian(rng, 1 + rng() % 15, 3);
    const auto items = gaussian(rng, n, 3);
    const auto r = oracle::exhaustive_optimal(users, items, m);
    const double want = ref::optimal_coverage(users, items, m);
    EXPECT_NEAR(r.coverage, want, 1e-9);
    EXPECT_NEAR(r.loss, ref::best_total(users, items) - want, 1e-9);
    EXPECT_NEAR(ref::coverage(users, items, r.subset), r.coverage, 1e-9);
  }
}

TEST(Exhaustive, BudgetExceededIsAnError) {
  std::mt19937_64 rng(3);
  const auto users = gaussian(rng, 2, 2);
  const auto items = gaussian(rng, 40, 2);
  EXPECT_EQ(oracle::binomial(40, 20), 137846528820ULL);
  EXPECT_THROW(oracle::exhaustive_optimal(users, items, 20), RuntimeError);
  EXPECT_THROW(oracle::exhaustive_optimal(users, items, 3, 100), RuntimeError);
}

TEST(OptimalSubsets, ListsAllTies) {
  // Two identical items: both singletons are optimal.
  const auto items = EmbeddingMatrix::from_rows({{1, 1}, {1, 1}, {0, 0}});
  const auto users = EmbeddingMatrix::from_rows({{1, 0}});
  const auto all = oracle::optimal_subsets(users, items, 1, 1e-12);
  EXPECT_EQ(all, (std::vector<std::vector<Index>>{{0}, {1}}));
}

TEST(OracleIdentity, LossPlusCoverageIsBestTotal) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto users = gaussian(rng, 1 + rng() % 20, 5);
    const auto items = gaussian(rng, 2 + rng() % 30, 5);
    std::vector<Index> y;
    for (std::size_t i = 0; i < items.count(); ++i) {
      if (rng() % 3 == 0) y.push_back(static_cast<Index>(i));
    }
    if (y.empty()) y.push_back(0);
    const double best = ref::best_total(users, items);
    EXPECT_NEAR(oracle::fav_loss(users, items, y) + oracle::coverage_value(users, items, y), best, 1e-9);
    std::vector<Index> all(items.count());
    std::iota(all.begin(), all.end(), Index{0});
    EXPECT_EQ(oracle::fav_loss(users, items, all), 0.0);
  }
}

TEST(ScoreTable, RowMajorByUser) {
  const auto t = oracle::score_table(axis_users(), three_items());
  EXPECT_EQ(t, (std::vector<double>{1, 0, 0.6, 0, 1, 0.6}));
}
