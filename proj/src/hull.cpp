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

#include "coldsel/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "coldsel/parallel.hpp"
#include "coldsel/selectors.hpp"

namespace coldsel {

Index support_argmax(const EmbeddingMatrix& items, std::span<const double> direction) {
  require(direction.size() == items.dim(), "support_argmax: dimension mismatch");
  require(!items.empty(), "support_argmax: no items");
  if (std::all_of(direction.begin(), direction.end(), [](double v) { return v == 0.0; })) {
    throw ValidationError("support_argmax: zero direction");
  }
  Index best = 0;
  double best_value = detail::dot(direction.data(), items.row_ptr(0), items.dim());
  for (Index i = 1; i < items.count(); ++i) {
    const double v = detail::dot(direction.data(), items.row_ptr(i), items.dim());
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

ExtremeSet approx_extreme_points(const EmbeddingMatrix& items, std::size_t num_directions,
                                 std::uint64_t seed) {
  require(num_directions >= 1, "approx_extreme_points: need at least one direction");
  require(!items.empty(), "approx_extreme_points: no items");
  const std::size_t dim = items.dim();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> dirs(num_directions * dim);
  for (std::size_t t = 0; t < num_directions; ++t) {
    double* d = dirs.data() + t * dim;
    double sq = 0.0;
    while (sq == 0.0) {
      for (std::size_t c = 0; c < dim; ++c) d[c] = gauss(rng);
      sq = detail::dot(d, d, dim);
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t c = 0; c < dim; ++c) d[c] *= inv;
  }

  std::vector<Index> winner(num_directions);
  parallel_for(num_directions, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t t = begin; t < end; ++t) {
      winner[t] = support_argmax(items, std::span<const double>(dirs.data() + t * dim, dim));
    }
  }, 32);

  std::map<Index, std::size_t> first_hit;
  for (std::size_t t = 0; t < num_directions; ++t) first_hit.emplace(winner[t], t);

  ExtremeSet out;
  out.num_directions = num_directions;
  out.exact = false;
  for (const auto& [index, t] : first_hit) {
    out.indices.push_back(index);
    out.witnesses.emplace_back(dirs.begin() + static_cast<std::ptrdiff_t>(t * dim),
                               dirs.begin() + static_cast<std::ptrdiff_t>((t + 1) * dim));
  }
  return out;
}

ExtremeSet exact_hull_2d(const EmbeddingMatrix& items) {
  require(items.dim() == 2, "exact_hull_2d: items must be 2-D, got dim " + std::to_string(items.dim()));
  require(!items.empty(), "exact_hull_2d: no items");

  // Identical points collapse onto their smallest index.
  std::map<std::pair<double, double>, Index> unique;
  for (Index i = 0; i < items.count(); ++i) {
    unique.emplace(std::make_pair(items.row(i)[0], items.row(i)[1]), i);
  }
  struct Pt {
    double x, y;
    Index id;
  };
  std::vector<Pt> pts;
  for (const auto& [xy, id] : unique) pts.push_back({xy.first, xy.second, id});

  ExtremeSet out;
  out.exact = true;
  if (pts.size() == 1) {
    out.indices = {pts[0].id};
    return out;
  }

  // std::map orders by (x, y): pts[0] is the lowest-leftmost point.
  auto cross = [](const Pt& o, const Pt& a, const Pt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  auto dist2 = [](const Pt& a, const Pt& b) {
    return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
  };

  std::vector<Index> hull;
  std::size_t p = 0;
  for (std::size_t guard = 0; guard <= pts.size(); ++guard) {
    hull.push_back(pts[p].id);
    std::size_t q = (p + 1) % pts.size();
    for (std::size_t r = 0; r < pts.size(); ++r) {
      if (r == p || r == q) continue;
      const double c = cross(pts[p], pts[q], pts[r]);
      const double scale = std::sqrt(dist2(pts[p], pts[q]) * dist2(pts[p], pts[r]));
      const bool collinear = std::abs(c) <= 1e-12 * scale;
      if ((!collinear && c < 0.0) ||
          (collinear && dist2(pts[p], pts[r]) > dist2(pts[p], pts[q]))) {
        q = r;
      }
    }
    p = q;
    if (p == 0) {
      std::sort(hull.begin(), hull.end());
      out.indices = std::move(hull);
      return out;
    }
  }
  throw RuntimeError("exact_hull_2d: gift wrapping did not close (degenerate input)");
}

SelectionResult select_hull(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                            std::size_t m, std::size_t num_directions, std::uint64_t seed,
                            bool lazy) {
  require(m >= 1 && m <= items.count(), "select_hull: m must be in [1, N]");
  const ExtremeSet extremes = approx_extreme_points(items, num_directions, seed);
  GreedyState state(users, items);
  state.extend(std::min(m, extremes.indices.size()), extremes.indices, lazy);
  if (state.chosen().size() < m) state.extend(m, {}, lazy);
  SelectionResult out;
  out.method = Method::Hull;
  out.ranked = state.chosen();
  out.scores = state.gains();
  return out;
}

}  // namespace coldsel
