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

// Brute-force reference computations. Everything here is a full linear scan
// or a full enumeration; the selectors and graph code are tested against it.

#include <cstdint>
#include <span>
#include <vector>

#include "coldsel/core.hpp"

namespace coldsel::oracle {

struct TopResult {
  std::int64_t user_index = -1;
  std::vector<Index> items;  // best first, ties by ascending index
  std::vector<double> values;
};

/// The k items with the largest u^T x.
TopResult exact_top_k(std::span<const double> user, const EmbeddingMatrix& items, std::size_t k);

/// Per-user max_x u^T x.
std::vector<double> user_best_values(const EmbeddingMatrix& users, const EmbeddingMatrix& items);

/// sum_u [max_x u^T x - max_{y in Y} u^T y]. Throws on an empty subset.
double fav_loss(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                std::span<const Index> subset);
double fav_loss(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                const SelectionResult& selection);
/// Same, reusing a problem's cached per-user maxima.
double fav_loss(const SelectionProblem& problem, std::span<const Index> subset);

/// f(Y) = sum_u max_{y in Y} u^T y. Throws on an empty subset.
double coverage_value(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                      std::span<const Index> subset);

/// Dense W x N table of u_w^T x_n, row-major by user.
std::vector<double> score_table(const EmbeddingMatrix& users, const EmbeddingMatrix& items);

inline constexpr std::uint64_t kDefaultSubsetBudget = 2'000'000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

struct ExhaustiveResult {
  std::vector<Index> subset;  // ascending
  double loss = 0.0;
  double coverage = 0.0;
};

/// Minimises fav_loss over all size-m subsets by lexicographic enumeration.
/// Ties keep the lexicographically smallest subset. Throws RuntimeError when
/// C(N, m) exceeds `budget`.
ExhaustiveResult exhaustive_optimal(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                    std::size_t m, std::uint64_t budget = kDefaultSubsetBudget);

/// Every size-m subset whose coverage is within `tolerance` of the optimum.
std::vector<std::vector<Index>> optimal_subsets(const EmbeddingMatrix& users,
                                                const EmbeddingMatrix& items, std::size_t m,
                                                double tolerance,
                                                std::uint64_t budget = kDefaultSubsetBudget);

}  // namespace coldsel::oracle
