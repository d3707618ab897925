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

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coldsel {

using Index = std::uint32_t;

/// Raised for caller mistakes: bad shapes, out-of-range parameters,
/// malformed input files. The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an input is well-formed but a computation cannot proceed
/// (singular systems, exceeded enumeration budgets, I/O failures).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dot product with sequential summation by index. Throws on dimension mismatch.
double inner_product(std::span<const double> a, std::span<const double> b);

/// Euclidean norm, sqrt(inner_product(a, a)).
double norm(std::span<const double> a);

namespace detail {
// Unchecked hot-loop variant; same summation order as inner_product.
inline double dot(const double* a, const double* b, std::size_t dim) noexcept {
  double acc = 0.0;
  for (std::size_t d = 0; d < dim; ++d) acc += a[d] * b[d];
  return acc;
}
}  // namespace detail

/// N vectors of a fixed dimension stored row-major, each paired with a
/// unique external id. Immutable after construction.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  /// `values` holds ids.size() * dim entries, row-major.
  EmbeddingMatrix(std::size_t dim, std::vector<double> values, std::vector<std::string> ids);

  /// Rows get ids "0", "1", ... in order.
  static EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                   std::vector<std::string> ids);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  const double* row_ptr(std::size_t i) const noexcept { return values_.data() + i * dim_; }
  const std::vector<double>& values() const noexcept { return values_; }

  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  /// Internal index for an external id, or -1 when absent.
  std::int64_t find(std::string_view id) const;

  /// Rows `indices` (in that order) as a new matrix, ids preserved.
  EmbeddingMatrix subset(std::span<const Index> indices) const;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.dim_ == b.dim_ && a.values_ == b.values_ && a.ids_ == b.ids_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> lookup_;
};

enum class Method {
  MaxNorm,
  MaxInDegree,
  UserExpectation,
  Ipgs,
  Submodular,
  Hull,
  Exhaustive,
};

std::string_view method_name(Method method);
/// Accepts the names produced by method_name (e.g. "max_norm", "ipgs").
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

/// A ranked selection of item indices. For Submodular and Hull the order is
/// insertion order and `scores` are marginal gains; otherwise scores are the
/// ranking key and are non-increasing.
struct SelectionResult {
  Method method = Method::MaxNorm;
  std::vector<Index> ranked;
  std::vector<double> scores;

  std::size_t m() const noexcept { return ranked.size(); }

  /// External ids of the ranked items.
  std::vector<std::string> ids(const EmbeddingMatrix& items) const;

  /// Checks the size, uniqueness, and ordering invariants against `items`.
  void validate(const EmbeddingMatrix& items) const;
};

/// Users, items, and the subset size. Holds references; the matrices must
/// outlive the problem. Caches each user's best inner product over all items.
class SelectionProblem {
 public:
  SelectionProblem(const EmbeddingMatrix& items, const EmbeddingMatrix& users, std::size_t m);

  const EmbeddingMatrix& items() const noexcept { return *items_; }
  const EmbeddingMatrix& users() const noexcept { return *users_; }
  std::size_t m() const noexcept { return m_; }

  /// max_x u^T x for every user.
  const std::vector<double>& user_best() const noexcept { return user_best_; }
  /// Sum of user_best() in index order.
  double best_total() const noexcept { return best_total_; }

 private:
  const EmbeddingMatrix* items_;
  const EmbeddingMatrix* users_;
  std::size_t m_;
  std::vector<double> user_best_;
  double best_total_ = 0.0;
};

/// Top `m` indices by score, descending, ties broken by ascending index.
std::vector<Index> rank_descending(std::span<const double> scores, std::size_t m);

void require(bool condition, const std::string& message);

}  // namespace coldsel
