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

#include <algorithm>
#include <set>

#include "coldsel/hull.hpp"
#include "coldsel/oracle.hpp"
#include "test_support.hpp"

using namespace coldsel;

namespace {

// Andrew's monotone chain, strict vertices only, smallest index among duplicates.
std::vector<Index> monotone_chain(const EmbeddingMatrix& x) {
  std::vector<Index> pts(x.count());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = static_cast<Index>(i);
  std::sort(pts.begin(), pts.end(), [&](Index a, Index b) {
    if (x.row(a)[0] != x.row(b)[0]) return x.row(a)[0] < x.row(b)[0];
    if (x.row(a)[1] != x.row(b)[1]) return x.row(a)[1] < x.row(b)[1];
    return a < b;
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [&](Index a, Index b) {
    return x.row(a)[0] == x.row(b)[0] && x.row(a)[1] == x.row(b)[1];
  }), pts.end());
  if (pts.size() < 3) {
    std::sort(pts.begin(), pts.end());
    return pts;
  }
  auto cross = [&](Index o, Index a, Index b) {
    return (x.row(a)[0] - x.row(o)[0]) * (x.row(b)[1] - x.row(o)[1]) -
           (x.row(a)[1] - x.row(o)[1]) * (x.row(b)[0] - x.row(o)[0]);
  };
  std::vector<Index> h(2 * pts.size());
  std::size_t k = 0;
  for (Index p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  std::sort(h.begin(), h.end());
  return h;
}

EmbeddingMatrix square_with_center() {
  return EmbeddingMatrix::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
}

}  // namespace

TEST(SupportArgmax, HandCases) {
  const auto x = EmbeddingMatrix::from_rows({{0, 0}, {2, 1}, {-1, 3}});
  EXPECT_EQ(support_argmax(x, std::vector<double>{1, 0}), 1u);
  EXPECT_EQ(support_argmax(x, std::vector<double>{0, 1}), 2u);
  const auto pair = EmbeddingMatrix::from_rows({{-1, 0}, {1, 0}});
  EXPECT_EQ(support_argmax(pair, std::vector<double>{1, 0}), 1u);
  EXPECT_EQ(support_argmax(pair, std::vector<double>{-1, 0}), 0u);
  EXPECT_THROW(support_argmax(x, std::vector<double>{0, 0}), ValidationError);
}

TEST(ApproxExtreme, SquareCornersNeverCenter) {
  const auto e = approx_extreme_points(square_with_center(), 1000, 7);
  EXPECT_EQ(e.indices, (std::vector<Index>{0, 1, 2, 3}));
  EXPECT_FALSE(e.exact);
  EXPECT_EQ(e.witnesses.size(), e.indices.size());
}

TEST(ApproxExtreme, SinglePointAndCollinear) {
  EXPECT_EQ(approx_extreme_points(EmbeddingMatrix::from_rows({{3, 4}}), 10, 1).indices, std::vector<Index>{0});
  const auto line = EmbeddingMatrix::from_rows({{2, 2}, {0, 0}, {1, 1}, {3, 3}, {-1, -1}});
  EXPECT_EQ(approx_extreme_points(line, 200, 3).indices, (std::vector<Index>{3, 4}));
}

TEST(ApproxExtreme, LargerBudgetIsSuperset) {
  std::mt19937_64 rng(31);
  const auto x = ref::gaussian(rng, 200, 4);
  const auto small = approx_extreme_points(x, 50, 9);
  const auto large = approx_extreme_points(x, 500, 9);
  EXPECT_TRUE(std::includes(large.indices.begin(), large.indices.end(), small.indices.begin(), small.indices.end()));
}

TEST(ExactHull2d, HandCases) {
  auto x = EmbeddingMatrix::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.7}});
  EXPECT_EQ(exact_hull_2d(x).indices, (std::vector<Index>{0, 1, 2, 3}));
  EXPECT_TRUE(exact_hull_2d(x).exact);
  x = EmbeddingMatrix::from_rows({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_EQ(exact_hull_2d(x).indices, (std::vector<Index>{0, 1, 2}));
  x = EmbeddingMatrix::from_rows({{0, 0}, {1, 1}, {2, 2}});
  EXPECT_EQ(exact_hull_2d(x).indices, (std::vector<Index>{0, 2}));
  EXPECT_THROW(exact_hull_2d(EmbeddingMatrix::from_rows({{1, 2, 3}})), ValidationError);
}

TEST(ExactHull2d, MatchesMonotoneChain) {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<int> grid(-4, 4);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 25;
    std::vector<std::vector<double>> rows(n);
    // Integer grid forces duplicates and collinear triples.
    for (auto& r : rows) r = {static_cast<double>(grid(rng)), static_cast<double>(grid(rng))};
    const auto x = EmbeddingMatrix::from_rows(rows);
    ASSERT_EQ(exact_hull_2d(x).indices, monotone_chain(x)) << "trial " << t;
  }
}

TEST(ApproxExtreme, SubsetOfTrueHullIn2d) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 50; ++t) {
    const auto x = ref::gaussian(rng, 3 + rng() % 40, 2);
    const auto truth = exact_hull_2d(x).indices;
    const auto approx = approx_extreme_points(x, 2000, t);
    EXPECT_TRUE(std::includes(truth.begin(), truth.end(), approx.indices.begin(), approx.indices.end()));
  }
}

TEST(SelectHull, SquareAxesPicksTwoCorners) {
  const auto users = EmbeddingMatrix::from_rows({{1, 0}, {0, 1}});
  const auto r = select_hull(users, square_with_center(), 2, 1000, 7);
  EXPECT_EQ(r.method, Method::Hull);
  // (1,1) serves both users; every further corner adds nothing, so index order decides.
  EXPECT_EQ(r.ranked, (std::vector<Index>{2, 0}));
  EXPECT_EQ(oracle::fav_loss(users, square_with_center(), r.ranked), 0.0);
}

TEST(SelectHull, ExtremeSetOfSizeMIsReturnedWhole) {
  const auto users = EmbeddingMatrix::from_rows({{1, 2}, {-1, 0.5}});
  const auto x = EmbeddingMatrix::from_rows({{0, 0}, {4, 0}, {0, 4}, {1, 1}});
  const auto r = select_hull(users, x, 3, 1000, 1);
  std::vector<Index> got = r.ranked;
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<Index>{0, 1, 2}));
}

TEST(SelectHull, MatchesExhaustiveWhenHullFits) {
  std::mt19937_64 rng(34);
  int checked = 0;
  for (int t = 0; t < 200 && checked < 40; ++t) {
    const auto x = ref::gaussian(rng, 4 + rng() % 8, 2);
    const auto users = ref::gaussian(rng, 1 + rng() % 10, 2);
    const std::size_t h = exact_hull_2d(x).indices.size();
    if (h > 4) continue;
    ++checked;
    const std::size_t m = std::max<std::size_t>(h, 1 + rng() % 4);
    if (m > x.count()) continue;
    const auto best = oracle::exhaustive_optimal(users, x, m);
    const auto r = select_hull(users, x, m, 20000, t);
    EXPECT_NEAR(oracle::fav_loss(users, x, r.ranked), best.loss, 1e-9);
  }
  EXPECT_GT(checked, 10);
}
