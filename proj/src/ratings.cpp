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

#include "coldsel/ratings.hpp"

#include <cmath>

namespace coldsel {

Index RatingsTable::intern(std::vector<std::string>& ids,
                           std::unordered_map<std::string, Index>& map, std::string_view id) {
  auto [it, fresh] = map.emplace(std::string(id), static_cast<Index>(ids.size()));
  if (fresh) ids.emplace_back(id);
  return it->second;
}

void RatingsTable::add(std::string_view user, std::string_view item, double value) {
  require(std::isfinite(value), "rating must be finite");
  const Index u = intern(user_ids_, user_map_, user);
  const Index i = intern(item_ids_, item_map_, item);
  const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | i;
  auto [it, fresh] = pair_slot_.emplace(key, ratings_.size());
  if (fresh) {
    ratings_.push_back({u, i, value});
  } else {
    ratings_[it->second].value = value;
  }
}

Index RatingsTable::add_user(std::string_view user) { return intern(user_ids_, user_map_, user); }

std::vector<std::vector<std::size_t>> RatingsTable::by_user() const {
  std::vector<std::vector<std::size_t>> out(user_ids_.size());
  for (std::size_t r = 0; r < ratings_.size(); ++r) out[ratings_[r].user].push_back(r);
  return out;
}

std::vector<std::vector<std::size_t>> RatingsTable::by_item() const {
  std::vector<std::vector<std::size_t>> out(item_ids_.size());
  for (std::size_t r = 0; r < ratings_.size(); ++r) out[ratings_[r].item].push_back(r);
  return out;
}

}  // namespace coldsel
