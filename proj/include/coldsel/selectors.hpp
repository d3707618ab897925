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

#include <optional>
#include <span>
#include <vector>

#include "coldsel/core.hpp"

namespace coldsel {

/// The m items of largest Euclidean norm.
SelectionResult select_max_norm(const EmbeddingMatrix& items, std::size_t m);

/// Ranks items by q^T x where q is the mean user vector.
SelectionResult select_user_expectation(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                        std::size_t m);

/// Mean of the user vectors, summed sequentially in index order.
std::vector<double> mean_user(const EmbeddingMatrix& users);

/// Greedy state for the coverage objective f(Y) = sum_u max_{y in Y} u^T y.
/// best_per_user[w] is max over `chosen` of u_w^T y (-inf while empty).
class GreedyState {
 public:
  GreedyState(const EmbeddingMatrix& users, const EmbeddingMatrix& items);

  const std::vector<Index>& chosen() const noexcept { return chosen_; }
  const std::vector<double>& gains() const noexcept { return gains_; }
  const std::vector<double>& best_per_user() const noexcept { return best_; }
  bool contains(Index item) const { return in_set_[item] != 0; }

  /// Ranking key of adding `item`: sum_u u^T x on an empty state, otherwise
  /// the marginal gain sum_u max(0, u^T x - best_u).
  double key(Index item) const;

  /// Appends `item`, recording `gain` as its score, and refreshes best_per_user.
  void add(Index item, double gain);

  /// Greedily adds items from `pool` (all items when empty) until the state
  /// holds `target` items or the pool is exhausted. Ties go to the smaller
  /// index. With `lazy`, stale marginal gains are used as upper bounds
  /// (CELF); the resulting sequence is identical to the plain loop.
  void extend(std::size_t target, std::span<const Index> pool, bool lazy);

 private:
  void extend_plain(std::size_t target, std::span<const Index> pool);
  void extend_lazy(std::size_t target, std::span<const Index> pool);

  const EmbeddingMatrix* users_;
  const EmbeddingMatrix* items_;
  std::vector<Index> chosen_;
  std::vector<double> gains_;
  std::vector<double> best_;
  std::vector<char> in_set_;
};

/// Greedy maximisation of the coverage objective. Ranking is insertion
/// order; scores are marginal gains (the first is f({y1})).
SelectionResult select_submodular_greedy(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                         std::size_t m, bool lazy = false);

}  // namespace coldsel
