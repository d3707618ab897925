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

#include "coldsel/mf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "coldsel/parallel.hpp"

namespace coldsel {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Solves (lambda I + sum x x^T) q = sum r x over the given observations.
// `factor(j)` returns the fixed-side vector of observation j.
template <typename Factor>
void ridge_solve(std::size_t dim, double lambda, const std::vector<std::size_t>& obs,
                 const std::vector<Rating>& ratings, Factor&& factor, double* out,
                 const std::string& who) {
  if (obs.empty()) {
    std::fill(out, out + dim, 0.0);
    return;
  }
  if (lambda == 0.0 && obs.size() < dim) {
    throw RuntimeError("ridge solve for " + who + ": " + std::to_string(obs.size()) +
                       " ratings cannot determine " + std::to_string(dim) +
                       " factors with lambda = 0");
  }
  Mat a = Mat::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) * lambda;
  Vec b = Vec::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t r : obs) {
    Eigen::Map<const Vec> x(factor(ratings[r]), static_cast<Eigen::Index>(dim));
    a.selfadjointView<Eigen::Lower>().rankUpdate(x);
    b += ratings[r].value * x;
  }
  Eigen::LLT<Mat> llt(a.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    throw RuntimeError("ridge solve for " + who + ": normal equations are singular");
  }
  Eigen::Map<Vec>(out, static_cast<Eigen::Index>(dim)) = llt.solve(b);
}

std::vector<double> gaussian_init(std::mt19937_64& rng, std::size_t rows, std::size_t dim) {
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(dim)));
  std::vector<double> v(rows * dim);
  for (double& x : v) x = gauss(rng);
  return v;
}

}  // namespace

SplitRatio SplitRatio::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("split ratio '" + text + "' must look like 4:1");
  try {
    std::size_t used = 0;
    const long w = std::stol(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("");
    const std::string rest = text.substr(colon + 1);
    const long c = std::stol(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
    if (w <= 0 || c <= 0) throw ValidationError("split ratio parts must be positive: '" + text + "'");
    return {static_cast<unsigned>(w), static_cast<unsigned>(c)};
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError("split ratio '" + text + "' must look like 4:1");
  }
}

std::string SplitRatio::to_string() const {
  return std::to_string(warm) + ":" + std::to_string(cold);
}

UserSplit split_users(const RatingsTable& ratings, SplitRatio ratio, std::uint64_t seed) {
  require(ratio.warm > 0 && ratio.cold > 0, "split ratio parts must be positive");
  const std::size_t n = ratings.user_count();
  const std::size_t parts = ratio.warm + ratio.cold;
  if (n < 2 || n < parts) {
    throw ValidationError("cannot split " + std::to_string(n) + " users at " + ratio.to_string());
  }
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_cold = n * ratio.cold / parts;
  std::vector<char> is_cold(n, 0);
  for (std::size_t p = 0; p < n_cold; ++p) is_cold[order[p]] = 1;

  UserSplit out;
  // Register users first so each side keeps a stable id order.
  for (Index u = 0; u < n; ++u) (is_cold[u] ? out.cold : out.warm).add_user(ratings.user_id(u));
  for (const auto& r : ratings.ratings()) {
    (is_cold[r.user] ? out.cold : out.warm).add(ratings.user_id(r.user), ratings.item_id(r.item), r.value);
  }
  return out;
}

MfEpoch mf_loss(const RatingsTable& ratings, const EmbeddingMatrix& users,
                const EmbeddingMatrix& items, double lambda) {
  require(users.dim() == items.dim(), "mf_loss: dimension mismatch");
  MfEpoch e;
  double sq = 0.0;
  for (const auto& r : ratings.ratings()) {
    const double pred = detail::dot(users.row_ptr(r.user), items.row_ptr(r.item), users.dim());
    sq += (r.value - pred) * (r.value - pred);
  }
  double reg = 0.0;
  for (double v : users.values()) reg += v * v;
  for (double v : items.values()) reg += v * v;
  e.rmse = ratings.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(ratings.size()));
  e.objective = sq + lambda * reg;
  return e;
}

MfModel train_mf(const RatingsTable& ratings, const MfParams& params) {
  require(!ratings.empty(), "train_mf: no ratings");
  require(params.dim >= 1, "train_mf: dim must be positive");
  require(params.lambda >= 0.0, "train_mf: lambda must be non-negative");
  const std::size_t dim = params.dim;
  const std::size_t n_users = ratings.user_count();
  const std::size_t n_items = ratings.item_count();

  std::mt19937_64 rng(params.seed);
  std::vector<double> u = gaussian_init(rng, n_users, dim);
  std::vector<double> x = gaussian_init(rng, n_items, dim);
  const auto per_user = ratings.by_user();
  const auto per_item = ratings.by_item();
  const auto& obs = ratings.ratings();

  auto snapshot = [&] {
    return mf_loss(ratings, EmbeddingMatrix(dim, u, ratings.user_ids()),
                   EmbeddingMatrix(dim, x, ratings.item_ids()), params.lambda);
  };

  MfModel model;
  model.history.push_back(snapshot());
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    parallel_for(n_items, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t i = begin; i < end; ++i) {
        ridge_solve(dim, params.lambda, per_item[i], obs,
                    [&](const Rating& r) { return u.data() + r.user * dim; }, x.data() + i * dim,
                    "item '" + ratings.item_id(static_cast<Index>(i)) + "'");
      }
    }, 32);
    parallel_for(n_users, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t w = begin; w < end; ++w) {
        ridge_solve(dim, params.lambda, per_user[w], obs,
                    [&](const Rating& r) { return x.data() + r.item * dim; }, u.data() + w * dim,
                    "user '" + ratings.user_id(static_cast<Index>(w)) + "'");
      }
    }, 32);
    model.history.push_back(snapshot());
  }
  model.users = EmbeddingMatrix(dim, std::move(u), ratings.user_ids());
  model.items = EmbeddingMatrix(dim, std::move(x), ratings.item_ids());
  return model;
}

ColdFit fit_cold_users(const RatingsTable& ratings, const EmbeddingMatrix& items, double lambda) {
  require(lambda >= 0.0, "fit_cold_users: lambda must be non-negative");
  require(!items.empty(), "fit_cold_users: no item vectors");
  const std::size_t dim = items.dim();
  std::vector<Index> item_row(ratings.item_count());
  for (std::size_t i = 0; i < ratings.item_count(); ++i) {
    const auto found = items.find(ratings.item_id(static_cast<Index>(i)));
    if (found < 0) {
      throw ValidationError("fit_cold_users: rated item '" + ratings.item_id(static_cast<Index>(i)) +
                            "' has no item vector");
    }
    item_row[i] = static_cast<Index>(found);
  }
  const auto per_user = ratings.by_user();
  const auto& obs = ratings.ratings();
  std::vector<double> q(ratings.user_count() * dim, 0.0);
  parallel_for(ratings.user_count(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t w = begin; w < end; ++w) {
      ridge_solve(dim, lambda, per_user[w], obs,
                  [&](const Rating& r) { return items.row_ptr(item_row[r.item]); }, q.data() + w * dim,
                  "cold user '" + ratings.user_id(static_cast<Index>(w)) + "'");
    }
  }, 32);
  ColdFit out;
  for (const auto& list : per_user) out.users_without_ratings += list.empty() ? 1 : 0;
  out.users = EmbeddingMatrix(dim, std::move(q), ratings.user_ids());
  return out;
}

std::pair<RatingsTable, std::size_t> restrict_to_items(const RatingsTable& ratings,
                                                       const EmbeddingMatrix& items) {
  RatingsTable out;
  std::size_t dropped = 0;
  for (const auto& id : ratings.user_ids()) out.add_user(id);
  for (const auto& r : ratings.ratings()) {
    if (items.find(ratings.item_id(r.item)) < 0) {
      ++dropped;
      continue;
    }
    out.add(ratings.user_id(r.user), ratings.item_id(r.item), r.value);
  }
  return {std::move(out), dropped};
}

}  // namespace coldsel
