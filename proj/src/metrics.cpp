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

#include "coldsel/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "coldsel/oracle.hpp"
#include "coldsel/parallel.hpp"
#include "coldsel/ratings.hpp"

namespace coldsel::metrics {

namespace {

std::vector<Index> relevant_set(std::span<const double> user, const EmbeddingMatrix& items,
                                std::size_t m) {
  auto top = oracle::exact_top_k(user, items, m).items;
  std::sort(top.begin(), top.end());
  return top;
}

void check_length(std::span<const Index> ranked, std::size_t m) {
  if (m == 0 || ranked.size() < m) {
    throw ValidationError("ranking metric needs a list of at least m=" + std::to_string(m) +
                          " items, got " + std::to_string(ranked.size()));
  }
}

}  // namespace

RankingScores score_ranking(std::span<const Index> ranked, std::span<const Index> relevant_sorted,
                            std::size_t m) {
  check_length(ranked, m);
  RankingScores s;
  std::size_t hits = 0;
  double dcg = 0.0;
  double ideal = 0.0;
  double ap_sum = 0.0;
  for (std::size_t r = 1; r <= m; ++r) {
    const double discount = 1.0 / std::log2(static_cast<double>(r) + 1.0);
    ideal += discount;
    if (std::binary_search(relevant_sorted.begin(), relevant_sorted.end(), ranked[r - 1])) {
      ++hits;
      dcg += discount;
      ap_sum += static_cast<double>(hits) / static_cast<double>(r);
    }
  }
  s.precision = static_cast<double>(hits) / static_cast<double>(m);
  s.ap = ap_sum / static_cast<double>(m);
  s.ndcg = dcg / ideal;
  return s;
}

double precision_at_m(std::span<const double> user, const EmbeddingMatrix& items,
                      std::span<const Index> ranked, std::size_t m) {
  check_length(ranked, m);
  return score_ranking(ranked, relevant_set(user, items, m), m).precision;
}

double ap_at_m(std::span<const double> user, const EmbeddingMatrix& items,
               std::span<const Index> ranked, std::size_t m) {
  check_length(ranked, m);
  return score_ranking(ranked, relevant_set(user, items, m), m).ap;
}

double ndcg_at_m(std::span<const double> user, const EmbeddingMatrix& items,
                 std::span<const Index> ranked, std::size_t m) {
  check_length(ranked, m);
  return score_ranking(ranked, relevant_set(user, items, m), m).ndcg;
}

PopulationScores evaluate_population(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                     std::span<const Index> ranked, std::size_t m) {
  check_length(ranked, m);
  require(!users.empty(), "evaluate_population: no users");
  std::vector<RankingScores> per_user(users.count());
  parallel_for(users.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t w = begin; w < end; ++w) {
      per_user[w] = score_ranking(ranked, relevant_set(users.row(w), items, m), m);
    }
  }, 16);
  PopulationScores out;
  for (const auto& s : per_user) {
    out.precision += s.precision;
    out.map += s.ap;
    out.ndcg += s.ndcg;
  }
  const double inv = 1.0 / static_cast<double>(users.count());
  out.precision *= inv;
  out.map *= inv;
  out.ndcg *= inv;
  return out;
}

double map_at_m(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                std::span<const Index> ranked, std::size_t m) {
  return evaluate_population(users, items, ranked, m).map;
}

NormDistribution norm_distribution(const EmbeddingMatrix& items) {
  require(!items.empty(), "norm_distribution: no items");
  NormDistribution out;
  std::vector<double> norms(items.count());
  for (std::size_t i = 0; i < items.count(); ++i) norms[i] = norm(items.row(i));
  out.max_norm = *std::max_element(norms.begin(), norms.end());
  if (out.max_norm <= 0.0) throw ValidationError("norm_distribution: every item is a zero vector");
  out.normalized.resize(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) out.normalized[i] = norms[i] / out.max_norm;
  std::vector<double> sorted = out.normalized;
  std::sort(sorted.begin(), sorted.end());
  out.median = sorted[(sorted.size() - 1) / 2];
  return out;
}

std::vector<GroupOccupancy> norm_group_occupancy(const EmbeddingMatrix& users,
                                                 const EmbeddingMatrix& items, std::size_t k,
                                                 std::span<const double> edges) {
  require(!users.empty(), "norm_group_occupancy: no users");
  require(k >= 1 && k <= items.count(), "norm_group_occupancy: k must be in [1, N]");
  require(!edges.empty(), "norm_group_occupancy: no group edges");
  for (std::size_t g = 0; g < edges.size(); ++g) {
    require(edges[g] > 0.0 && edges[g] <= 1.0, "norm_group_occupancy: edges must lie in (0, 1]");
    require(g == 0 || edges[g] > edges[g - 1], "norm_group_occupancy: edges must increase");
  }
  const std::size_t n = items.count();

  std::vector<std::vector<Index>> tops(users.count());
  parallel_for(users.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t w = begin; w < end; ++w) tops[w] = oracle::exact_top_k(users.row(w), items, k).items;
  }, 16);
  std::vector<std::size_t> hits(n, 0);
  for (const auto& t : tops) {
    for (Index i : t) ++hits[i];
  }

  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = norm(items.row(i));
  const auto by_norm = rank_descending(norms, n);

  const double pool = static_cast<double>(k) * static_cast<double>(users.count());
  std::vector<GroupOccupancy> out;
  std::size_t start = 0;
  double lower = 0.0;
  for (double edge : edges) {
    const auto stop = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil(edge * static_cast<double>(n) - 1e-9)));
    GroupOccupancy g;
    g.lower = lower;
    g.upper = edge;
    std::size_t in_group = 0;
    for (std::size_t r = start; r < std::max(start, stop); ++r) in_group += hits[by_norm[r]];
    g.item_count = stop > start ? stop - start : 0;
    g.share = static_cast<double>(in_group) / pool;
    out.push_back(g);
    start = std::max(start, stop);
    lower = edge;
  }
  return out;
}

std::map<std::size_t, NormBucket> norm_vs_high_ratings(const EmbeddingMatrix& items,
                                                       const RatingsTable& ratings,
                                                       double high_threshold) {
  std::vector<std::size_t> high(items.count(), 0);
  std::vector<std::int64_t> to_matrix(ratings.item_count());
  for (std::size_t i = 0; i < ratings.item_count(); ++i) {
    to_matrix[i] = items.find(ratings.item_id(static_cast<Index>(i)));
    if (to_matrix[i] < 0) {
      throw ValidationError("norm_vs_high_ratings: rated item '" + ratings.item_id(static_cast<Index>(i)) +
                            "' has no embedding");
    }
  }
  for (const auto& r : ratings.ratings()) {
    if (r.value >= high_threshold) ++high[static_cast<std::size_t>(to_matrix[r.item])];
  }
  std::map<std::size_t, std::vector<double>> groups;
  for (std::size_t i = 0; i < items.count(); ++i) groups[high[i]].push_back(norm(items.row(i)));
  std::map<std::size_t, NormBucket> out;
  for (const auto& [count, norms] : groups) {
    NormBucket b;
    b.count = norms.size();
    for (double v : norms) b.mean += v;
    b.mean /= static_cast<double>(norms.size());
    for (double v : norms) b.variance += (v - b.mean) * (v - b.mean);
    b.variance /= static_cast<double>(norms.size());
    out.emplace(count, b);
  }
  return out;
}

}  // namespace coldsel::metrics
