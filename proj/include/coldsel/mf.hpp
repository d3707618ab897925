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
#include <string>
#include <utility>
#include <vector>

#include "coldsel/core.hpp"
#include "coldsel/ratings.hpp"

namespace coldsel {

struct SplitRatio {
  unsigned warm = 4;
  unsigned cold = 1;

  /// Parses "4:1".
  static SplitRatio parse(const std::string& text);
  std::string to_string() const;
};

struct UserSplit {
  RatingsTable warm;
  RatingsTable cold;
};

/// Seeded shuffle of users, then floor(n * cold / (warm + cold)) users go
/// cold. A user's ratings all travel together.
UserSplit split_users(const RatingsTable& ratings, SplitRatio ratio, std::uint64_t seed);

struct MfParams {
  std::size_t dim = 32;
  double lambda = 0.1;
  std::size_t epochs = 20;
  std::uint64_t seed = 42;
};

struct MfEpoch {
  double rmse = 0.0;
  double objective = 0.0;  // squared error + lambda * (sum |u|^2 + sum |x|^2)
};

struct MfModel {
  EmbeddingMatrix users;
  EmbeddingMatrix items;
  /// history[0] is the random initialisation, then one entry per epoch.
  std::vector<MfEpoch> history;
};

/// Regularised alternating least squares. Each epoch solves every item
/// vector against the current users, then every user vector against the
/// new items, as ridge regressions.
MfModel train_mf(const RatingsTable& ratings, const MfParams& params);

/// Training RMSE and regularised objective of a factorisation.
MfEpoch mf_loss(const RatingsTable& ratings, const EmbeddingMatrix& users,
                const EmbeddingMatrix& items, double lambda);

struct ColdFit {
  EmbeddingMatrix users;
  std::size_t users_without_ratings = 0;
};

/// Per-user ridge fit q = argmin sum (r - q^T x)^2 + lambda |q|^2 against
/// fixed item vectors. Every rated item must exist in `items`; users with no
/// ratings get the zero vector and are counted.
ColdFit fit_cold_users(const RatingsTable& ratings, const EmbeddingMatrix& items, double lambda);

/// Drops ratings whose item has no embedding; users are kept even if they
/// lose every rating. Returns the filtered table and the number dropped.
std::pair<RatingsTable, std::size_t> restrict_to_items(const RatingsTable& ratings,
                                                       const EmbeddingMatrix& items);

}  // namespace coldsel
