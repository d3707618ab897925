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

#include "coldsel/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coldsel/parallel.hpp"

namespace coldsel::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_subset(const EmbeddingMatrix& items, std::span<const Index> subset) {
  if (subset.empty()) throw ValidationError("empty selection: max over an empty set is undefined");
  for (Index i : subset) require(i < items.count(), "selection index out of range");
}

// Per-user max over the subset, evaluated by scan.
std::vector<double> subset_best(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                std::span<const Index> subset) {
  require(users.dim() == items.dim(), "user/item dimension mismatch");
  std::vector<double> best(users.count(), kNegInf);
  const std::size_t dim = items.dim();
  parallel_for(users.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t w = begin; w < end; ++w) {
      const double* u = users.row_ptr(w);
      for (Index i : subset) best[w] = std::max(best[w], detail::dot(u, items.row_ptr(i), dim));
    }
  });
  return best;
}

bool next_combination(std::vector<Index>& c, std::size_t n) {
  const std::size_t k = c.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Walks all size-m subsets, calling visit(subset, coverage) for those that
// survive the bound check against `floor` (which visit may raise).
template <typename Visit>
void enumerate(const EmbeddingMatrix& users, const EmbeddingMatrix& items, std::size_t m,
               std::uint64_t budget, double& floor, Visit&& visit) {
  require(users.dim() == items.dim(), "user/item dimension mismatch");
  require(!users.empty(), "exhaustive search needs at least one user");
  const std::size_t n = items.count();
  require(m >= 1 && m <= n, "exhaustive search: m must be in [1, N]");
  const std::uint64_t total = binomial(n, m);
  if (total > budget) {
    throw RuntimeError("exhaustive search refused: C(" + std::to_string(n) + ", " +
                       std::to_string(m) + ") exceeds the subset budget of " +
                       std::to_string(budget));
  }
  const std::size_t w_count = users.count();
  const std::vector<double> table = score_table(users, items);
  // suffix[w] = sum of global maxima for users w..W-1; an upper bound on what
  // the remaining users can contribute.
  std::vector<double> suffix(w_count + 1, 0.0);
  for (std::size_t w = w_count; w-- > 0;) {
    const double* row = table.data() + w * n;
    suffix[w] = suffix[w + 1] + *std::max_element(row, row + n);
  }
  std::vector<Index> combo(m);
  std::iota(combo.begin(), combo.end(), Index{0});
  do {
    double cov = 0.0;
    bool pruned = false;
    for (std::size_t w = 0; w < w_count; ++w) {
      const double* row = table.data() + w * n;
      double best = kNegInf;
      for (Index i : combo) best = std::max(best, row[i]);
      cov += best;
      const double bound = cov + suffix[w + 1];
      if (bound < floor - 1e-9 * (1.0 + std::abs(floor))) {
        pruned = true;
        break;
      }
    }
    if (!pruned) visit(combo, cov);
  } while (next_combination(combo, n));
}

}  // namespace

TopResult exact_top_k(std::span<const double> user, const EmbeddingMatrix& items, std::size_t k) {
  require(user.size() == items.dim(), "exact_top_k: dimension mismatch");
  if (k == 0 || k > items.count()) {
    throw ValidationError("exact_top_k: k=" + std::to_string(k) + " must be in [1, " +
                          std::to_string(items.count()) + "]");
  }
  std::vector<double> scores(items.count());
  for (std::size_t i = 0; i < items.count(); ++i) {
    scores[i] = detail::dot(user.data(), items.row_ptr(i), items.dim());
  }
  TopResult out;
  out.items = rank_descending(scores, k);
  out.values.reserve(k);
  for (Index i : out.items) out.values.push_back(scores[i]);
  return out;
}

std::vector<double> user_best_values(const EmbeddingMatrix& users, const EmbeddingMatrix& items) {
  require(!items.empty(), "user_best_values: no items");
  std::vector<Index> all(items.count());
  std::iota(all.begin(), all.end(), Index{0});
  return subset_best(users, items, all);
}

double fav_loss(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                std::span<const Index> subset) {
  check_subset(items, subset);
  const auto global = user_best_values(users, items);
  const auto local = subset_best(users, items, subset);
  double loss = 0.0;
  for (std::size_t w = 0; w < users.count(); ++w) loss += global[w] - local[w];
  return loss;
}

double fav_loss(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                const SelectionResult& selection) {
  return fav_loss(users, items, selection.ranked);
}

double fav_loss(const SelectionProblem& problem, std::span<const Index> subset) {
  check_subset(problem.items(), subset);
  const auto local = subset_best(problem.users(), problem.items(), subset);
  const auto& global = problem.user_best();
  double loss = 0.0;
  for (std::size_t w = 0; w < global.size(); ++w) loss += global[w] - local[w];
  return loss;
}

double coverage_value(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                      std::span<const Index> subset) {
  check_subset(items, subset);
  const auto local = subset_best(users, items, subset);
  double total = 0.0;
  for (double v : local) total += v;
  return total;
}

std::vector<double> score_table(const EmbeddingMatrix& users, const EmbeddingMatrix& items) {
  require(users.dim() == items.dim(), "score_table: dimension mismatch");
  const std::size_t n = items.count();
  std::vector<double> table(users.count() * n);
  parallel_for(users.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t w = begin; w < end; ++w) {
      for (std::size_t i = 0; i < n; ++i) {
        table[w * n + i] = detail::dot(users.row_ptr(w), items.row_ptr(i), items.dim());
      }
    }
  });
  return table;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(acc);
}

ExhaustiveResult exhaustive_optimal(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                    std::size_t m, std::uint64_t budget) {
  double best = kNegInf;
  std::vector<Index> best_subset;
  enumerate(users, items, m, budget, best, [&](const std::vector<Index>& combo, double cov) {
    if (cov > best) {
      best = cov;
      best_subset = combo;
    }
  });
  ExhaustiveResult out;
  out.subset = std::move(best_subset);
  out.coverage = best;
  out.loss = fav_loss(users, items, out.subset);
  return out;
}

std::vector<std::vector<Index>> optimal_subsets(const EmbeddingMatrix& users,
                                                const EmbeddingMatrix& items, std::size_t m,
                                                double tolerance, std::uint64_t budget) {
  const double opt = exhaustive_optimal(users, items, m, budget).coverage;
  double floor = opt - tolerance;
  std::vector<std::vector<Index>> out;
  enumerate(users, items, m, budget, floor, [&](const std::vector<Index>& combo, double cov) {
    if (cov >= opt - tolerance) out.push_back(combo);
  });
  return out;
}

}  // namespace coldsel::oracle
