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
#include <span>
#include <vector>

#include "coldsel/core.hpp"

namespace coldsel {

/// Extreme points of Conv(X), either sampled by support-function probes or
/// computed exactly in 2-D.
struct ExtremeSet {
  std::vector<Index> indices;  // ascending
  std::size_t num_directions = 0;
  bool exact = false;
  /// For sampled sets: the first direction that selected indices[i].
  std::vector<std::vector<double>> witnesses;
};

/// argmax_i d^T x_i, smallest index on ties. Throws on a zero direction.
Index support_argmax(const EmbeddingMatrix& items, std::span<const double> direction);

/// Probes `num_directions` seeded uniform directions on the unit sphere and
/// keeps the support winners. Every returned index is an extreme point; the
/// set may miss some. Direction i is the same for every budget with the
/// same seed, so a larger budget returns a superset.
ExtremeSet approx_extreme_points(const EmbeddingMatrix& items, std::size_t num_directions,
                                 std::uint64_t seed);

/// Gift-wrapping hull of 2-D points. Only strict vertices are returned:
/// points in the middle of a hull edge are excluded, and of several
/// identical points only the smallest index is kept.
ExtremeSet exact_hull_2d(const EmbeddingMatrix& items);

/// Greedy coverage selection restricted to the sampled extreme set. When the
/// extreme set has at most m members it is returned in full (greedy order)
/// and padded by greedy over the remaining items.
SelectionResult select_hull(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                            std::size_t m, std::size_t num_directions, std::uint64_t seed,
                            bool lazy = false);

}  // namespace coldsel
