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

#include "coldsel/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "coldsel/parallel.hpp"

namespace coldsel {

void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

std::size_t thread_count() {
  if (const char* env = std::getenv("COLDSEL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

double inner_product(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("inner_product: dimension mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  return detail::dot(a.data(), b.data(), a.size());
}

double norm(std::span<const double> a) { return std::sqrt(inner_product(a, a)); }

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<double> values,
                                 std::vector<std::string> ids)
    : dim_(dim), values_(std::move(values)), ids_(std::move(ids)) {
  require(dim_ > 0, "EmbeddingMatrix: dim must be positive");
  require(values_.size() == ids_.size() * dim_,
          "EmbeddingMatrix: expected " + std::to_string(ids_.size() * dim_) + " values, got " +
              std::to_string(values_.size()));
  require(ids_.size() <= std::numeric_limits<Index>::max(), "EmbeddingMatrix: too many rows");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("EmbeddingMatrix: non-finite component in row " +
                            std::to_string(i / dim_) + " (id '" + ids_[i / dim_] + "')");
    }
  }
  lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!lookup_.emplace(ids_[i], static_cast<Index>(i)).second) {
      throw ValidationError("EmbeddingMatrix: duplicate id '" + ids_[i] + "'");
    }
  }
}

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  std::vector<std::string> ids(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) ids[i] = std::to_string(i);
  return from_rows(rows, std::move(ids));
}

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                           std::vector<std::string> ids) {
  require(!rows.empty(), "EmbeddingMatrix::from_rows: need at least one row to infer dim");
  const std::size_t dim = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    require(r.size() == dim, "EmbeddingMatrix::from_rows: ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(dim, std::move(values), std::move(ids));
}

std::int64_t EmbeddingMatrix::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  return it == lookup_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

EmbeddingMatrix EmbeddingMatrix::subset(std::span<const Index> indices) const {
  std::vector<double> values;
  std::vector<std::string> ids;
  values.reserve(indices.size() * dim_);
  ids.reserve(indices.size());
  for (Index i : indices) {
    require(i < count(), "EmbeddingMatrix::subset: index out of range");
    auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
    ids.push_back(ids_[i]);
  }
  return EmbeddingMatrix(dim_, std::move(values), std::move(ids));
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::MaxNorm: return "max_norm";
    case Method::MaxInDegree: return "max_in_degree";
    case Method::UserExpectation: return "user_expectation";
    case Method::Ipgs: return "ipgs";
    case Method::Submodular: return "submodular";
    case Method::Hull: return "hull";
    case Method::Exhaustive: return "exhaustive";
  }
  return "unknown";
}

std::vector<Method> all_methods() {
  return {Method::MaxNorm,    Method::MaxInDegree, Method::UserExpectation, Method::Ipgs,
          Method::Submodular, Method::Hull,        Method::Exhaustive};
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

std::vector<std::string> SelectionResult::ids(const EmbeddingMatrix& items) const {
  std::vector<std::string> out;
  out.reserve(ranked.size());
  for (Index i : ranked) out.push_back(items.id(i));
  return out;
}

void SelectionResult::validate(const EmbeddingMatrix& items) const {
  require(!ranked.empty(), "SelectionResult: empty selection");
  require(scores.size() == ranked.size(), "SelectionResult: scores misaligned with ranking");
  std::unordered_set<Index> seen;
  for (Index i : ranked) {
    require(i < items.count(), "SelectionResult: item index out of range");
    require(seen.insert(i).second, "SelectionResult: duplicate item " + items.id(i));
  }
  if (method != Method::Submodular && method != Method::Hull) {
    for (std::size_t r = 1; r < scores.size(); ++r) {
      require(scores[r] <= scores[r - 1], "SelectionResult: scores increase along the ranking");
    }
  }
}

SelectionProblem::SelectionProblem(const EmbeddingMatrix& items, const EmbeddingMatrix& users,
                                   std::size_t m)
    : items_(&items), users_(&users), m_(m) {
  require(!items.empty(), "SelectionProblem: no items");
  require(!users.empty(), "SelectionProblem: no users");
  require(items.dim() == users.dim(), "SelectionProblem: item/user dimension mismatch");
  require(m >= 1 && m <= items.count(), "SelectionProblem: m must be in [1, N]");
  const std::size_t dim = items.dim();
  user_best_.assign(users.count(), 0.0);
  parallel_for(users.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t w = begin; w < end; ++w) {
      const double* u = users.row_ptr(w);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < items.count(); ++i) {
        best = std::max(best, detail::dot(u, items.row_ptr(i), dim));
      }
      user_best_[w] = best;
    }
  });
  for (double b : user_best_) best_total_ += b;
}

std::vector<Index> rank_descending(std::span<const double> scores, std::size_t m) {
  require(m <= scores.size(), "rank_descending: m exceeds candidate count");
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  auto better = [&](Index a, Index b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                    better);
  order.resize(m);
  return order;
}

}  // namespace coldsel
