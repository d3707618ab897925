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

#include "coldsel/core.hpp"

namespace coldsel {

/// Gaussian-mixture users and items sharing cluster centres. Each item is
/// scaled by exp(norm_skew * z), z ~ N(0, 1), to emulate a skewed norm
/// distribution; norm_skew = 0 leaves norms unskewed.
struct SyntheticSpec {
  std::size_t n_items = 1000;
  std::size_t n_users = 1000;
  std::size_t n_cold_users = 0;
  std::size_t dim = 32;
  std::size_t clusters = 1;
  double center_scale = 1.0;  // std-dev of cluster centre coordinates
  double noise = 1.0;         // within-cluster std-dev
  double norm_skew = 0.0;
  std::uint64_t seed = 42;
};

struct SyntheticData {
  EmbeddingMatrix items;       // ids "i0", "i1", ...
  EmbeddingMatrix users;       // ids "u0", ...
  EmbeddingMatrix cold_users;  // ids "c0", ...; empty when n_cold_users == 0
};

SyntheticData gen_synthetic(const SyntheticSpec& spec);

}  // namespace coldsel
