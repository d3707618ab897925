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

#include "coldsel/synth.hpp"

#include <cmath>
#include <random>
#include <string>

namespace coldsel {

namespace {

EmbeddingMatrix draw(std::mt19937_64& rng, const SyntheticSpec& spec, const std::vector<double>& centers,
                     std::size_t count, const std::string& prefix, bool skew) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, spec.clusters - 1);
  std::vector<double> values(count * spec.dim);
  std::vector<std::string> ids(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double* c = centers.data() + pick(rng) * spec.dim;
    double* row = values.data() + i * spec.dim;
    for (std::size_t d = 0; d < spec.dim; ++d) row[d] = c[d] + spec.noise * gauss(rng);
    if (skew) {
      const double scale = std::exp(spec.norm_skew * gauss(rng));
      for (std::size_t d = 0; d < spec.dim; ++d) row[d] *= scale;
    }
    ids[i] = prefix + std::to_string(i);
  }
  return EmbeddingMatrix(spec.dim, std::move(values), std::move(ids));
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  require(spec.n_items >= 1 && spec.n_users >= 1, "gen_synthetic: sizes must be positive");
  require(spec.dim >= 1, "gen_synthetic: dim must be positive");
  require(spec.clusters >= 1, "gen_synthetic: need at least one cluster");
  require(spec.noise >= 0.0 && spec.center_scale >= 0.0 && spec.norm_skew >= 0.0,
          "gen_synthetic: scales must be non-negative");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> centers(spec.clusters * spec.dim);
  for (double& v : centers) v = spec.center_scale * gauss(rng);

  SyntheticData out;
  out.items = draw(rng, spec, centers, spec.n_items, "i", true);
  out.users = draw(rng, spec, centers, spec.n_users, "u", false);
  if (spec.n_cold_users > 0) out.cold_users = draw(rng, spec, centers, spec.n_cold_users, "c", false);
  return out;
}

}  // namespace coldsel
