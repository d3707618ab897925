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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "coldsel/core.hpp"

namespace coldsel {

struct RatingsTable;

namespace metrics {

// Relevance for every ranking metric: membership in Top(u, m), the m items
// with the largest inner product with u (ties by ascending index).

double precision_at_m(std::span<const double> user, const EmbeddingMatrix& items,
                      std::span<const Index> ranked, std::size_t m);
double ap_at_m(std::span<const double> user, const EmbeddingMatrix& items,
               std::span<const Index> ranked, std::size_t m);
/// Binary gains, log2 discounts, normalised by the ideal DCG of m hits.
double ndcg_at_m(std::span<const double> user, const EmbeddingMatrix& items,
                 std::span<const Index> ranked, std::size_t m);

/// Same metrics given a precomputed relevance set (sorted item indices).
struct RankingScores {
  double precision = 0.0;
  double ap = 0.0;
  double ndcg = 0.0;
};
RankingScores score_ranking(std::span<const Index> ranked, std::span<const Index> relevant_sorted,
                            std::size_t m);

/// Means over all users; MAP is the mean AP.
struct PopulationScores {
  double precision = 0.0;
  double map = 0.0;
  double ndcg = 0.0;
};
PopulationScores evaluate_population(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                     std::span<const Index> ranked, std::size_t m);
double map_at_m(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                std::span<const Index> ranked, std::size_t m);

struct NormDistribution {
  std::vector<double> normalized;  // norm / max norm, in item order
  double median = 0.0;             // lower median
  double max_norm = 0.0;
};

/// Throws when every item is the zero vector.
NormDistribution norm_distribution(const EmbeddingMatrix& items);

struct GroupOccupancy {
  double lower = 0.0;  // fraction of items (by norm rank) where the group starts
  double upper = 0.0;
  std::size_t item_count = 0;
  double share = 0.0;  // fraction of the pooled top-k multiset
};

/// Pools every user's exact top-k into a multiset of size k*W and reports
/// the share of each norm-rank group. `edges` are increasing cumulative
/// fractions in (0, 1]; group g holds the items ranked (by norm, descending)
/// in [ceil(edges[g-1]*N), ceil(edges[g]*N)).
std::vector<GroupOccupancy> norm_group_occupancy(const EmbeddingMatrix& users,
                                                 const EmbeddingMatrix& items, std::size_t k,
                                                 std::span<const double> edges);

struct NormBucket {
  std::size_t count = 0;  // items in the bucket
  double mean = 0.0;
  double variance = 0.0;  // population variance
};

/// Buckets items by how many ratings >= high_threshold they received and
/// reports mean/variance of their norms per bucket.
std::map<std::size_t, NormBucket> norm_vs_high_ratings(const EmbeddingMatrix& items,
                                                       const RatingsTable& ratings,
                                                       double high_threshold);

}  // namespace metrics
}  // namespace coldsel
