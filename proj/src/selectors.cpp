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

#include "coldsel/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "coldsel/parallel.hpp"

namespace coldsel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

SelectionResult ranked_by(Method method, const std::vector<double>& scores, std::size_t m) {
  SelectionResult out;
  out.method = method;
  out.ranked = rank_descending(scores, m);
  out.scores.reserve(m);
  for (Index i : out.ranked) out.scores.push_back(scores[i]);
  return out;
}

}  // namespace

SelectionResult select_max_norm(const EmbeddingMatrix& items, std::size_t m) {
  require(m >= 1 && m <= items.count(), "select_max_norm: m must be in [1, N]");
  std::vector<double> norms(items.count());
  for (std::size_t i = 0; i < items.count(); ++i) norms[i] = norm(items.row(i));
  return ranked_by(Method::MaxNorm, norms, m);
}

std::vector<double> mean_user(const EmbeddingMatrix& users) {
  if (users.empty()) throw ValidationError("user expectation over an empty user set");
  std::vector<double> q(users.dim(), 0.0);
  for (std::size_t w = 0; w < users.count(); ++w) {
    const double* u = users.row_ptr(w);
    for (std::size_t d = 0; d < q.size(); ++d) q[d] += u[d];
  }
  const double inv = 1.0 / static_cast<double>(users.count());
  for (double& v : q) v *= inv;
  return q;
}

SelectionResult select_user_expectation(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                        std::size_t m) {
  require(m >= 1 && m <= items.count(), "select_user_expectation: m must be in [1, N]");
  require(users.dim() == items.dim(), "select_user_expectation: dimension mismatch");
  const auto q = mean_user(users);
  std::vector<double> scores(items.count());
  for (std::size_t i = 0; i < items.count(); ++i) {
    scores[i] = detail::dot(q.data(), items.row_ptr(i), q.size());
  }
  return ranked_by(Method::UserExpectation, scores, m);
}

GreedyState::GreedyState(const EmbeddingMatrix& users, const EmbeddingMatrix& items)
    : users_(&users), items_(&items), best_(users.count(), kNegInf), in_set_(items.count(), 0) {
  require(!users.empty(), "greedy selection needs at least one user");
  require(users.dim() == items.dim(), "greedy selection: dimension mismatch");
}

double GreedyState::key(Index item) const {
  const std::size_t dim = items_->dim();
  const double* x = items_->row_ptr(item);
  double total = 0.0;
  if (chosen_.empty()) {
    for (std::size_t w = 0; w < users_->count(); ++w) total += detail::dot(users_->row_ptr(w), x, dim);
    return total;
  }
  for (std::size_t w = 0; w < users_->count(); ++w) {
    const double s = detail::dot(users_->row_ptr(w), x, dim);
    if (s > best_[w]) total += s - best_[w];
  }
  return total;
}

void GreedyState::add(Index item, double gain) {
  require(item < items_->count(), "greedy: item index out of range");
  require(!in_set_[item], "greedy: item already chosen");
  in_set_[item] = 1;
  chosen_.push_back(item);
  gains_.push_back(gain);
  const std::size_t dim = items_->dim();
  const double* x = items_->row_ptr(item);
  for (std::size_t w = 0; w < users_->count(); ++w) {
    best_[w] = std::max(best_[w], detail::dot(users_->row_ptr(w), x, dim));
  }
}

void GreedyState::extend(std::size_t target, std::span<const Index> pool, bool lazy) {
  std::vector<Index> all;
  if (pool.empty()) {
    all.resize(items_->count());
    std::iota(all.begin(), all.end(), Index{0});
    pool = all;
  }
  if (lazy) {
    extend_lazy(target, pool);
  } else {
    extend_plain(target, pool);
  }
}

void GreedyState::extend_plain(std::size_t target, std::span<const Index> pool) {
  std::vector<double> keys(pool.size());
  while (chosen_.size() < target) {
    parallel_for(pool.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t p = begin; p < end; ++p) keys[p] = in_set_[pool[p]] ? kNegInf : key(pool[p]);
    }, 16);
    std::ptrdiff_t best = -1;
    for (std::size_t p = 0; p < pool.size(); ++p) {
      if (in_set_[pool[p]]) continue;
      if (best < 0 || keys[p] > keys[best] || (keys[p] == keys[best] && pool[p] < pool[best])) {
        best = static_cast<std::ptrdiff_t>(p);
      }
    }
    if (best < 0) return;
    add(pool[best], keys[best]);
  }
}

void GreedyState::extend_lazy(std::size_t target, std::span<const Index> pool) {
  // The first pick ranks by f({x}), which is not an upper bound on later
  // marginal gains, so it goes through the plain loop.
  if (chosen_.empty() && target > 0) extend_plain(1, pool);

  struct Entry {
    double bound;
    Index item;
    std::size_t stamp;  // |chosen| when bound was computed
  };
  auto lower = [](const Entry& a, const Entry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.item > b.item;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower);
  {
    std::vector<Index> open;
    for (Index i : pool) {
      if (!in_set_[i]) open.push_back(i);
    }
    std::vector<double> keys(open.size());
    parallel_for(open.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t p = begin; p < end; ++p) keys[p] = key(open[p]);
    }, 16);
    for (std::size_t p = 0; p < open.size(); ++p) heap.push({keys[p], open[p], chosen_.size()});
  }
  while (chosen_.size() < target && !heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    if (in_set_[top.item]) continue;
    if (top.stamp == chosen_.size()) {
      add(top.item, top.bound);
      continue;
    }
    top.bound = key(top.item);
    top.stamp = chosen_.size();
    heap.push(top);
  }
}

SelectionResult select_submodular_greedy(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                         std::size_t m, bool lazy) {
  require(m >= 1 && m <= items.count(), "select_submodular_greedy: m must be in [1, N]");
  GreedyState state(users, items);
  state.extend(m, {}, lazy);
  SelectionResult out;
  out.method = Method::Submodular;
  out.ranked = state.chosen();
  out.scores = state.gains();
  return out;
}

}  // namespace coldsel
