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

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coldsel/core.hpp"

namespace coldsel {

struct Rating {
  Index user = 0;
  Index item = 0;
  double value = 0.0;
};

/// (user, item, rating) triples keyed by internal indices, with the external
/// id maps. A repeated (user, item) pair keeps its first position and the
/// last rating value.
class RatingsTable {
 public:
  void add(std::string_view user, std::string_view item, double value);
  /// Registers a user that may have no ratings.
  Index add_user(std::string_view user);

  const std::vector<Rating>& ratings() const noexcept { return ratings_; }
  std::size_t size() const noexcept { return ratings_.size(); }
  bool empty() const noexcept { return ratings_.empty(); }

  std::size_t user_count() const noexcept { return user_ids_.size(); }
  std::size_t item_count() const noexcept { return item_ids_.size(); }
  const std::vector<std::string>& user_ids() const noexcept { return user_ids_; }
  const std::vector<std::string>& item_ids() const noexcept { return item_ids_; }
  const std::string& user_id(Index u) const { return user_ids_.at(u); }
  const std::string& item_id(Index i) const { return item_ids_.at(i); }

  /// Ratings grouped by user / item (indices into ratings()).
  std::vector<std::vector<std::size_t>> by_user() const;
  std::vector<std::vector<std::size_t>> by_item() const;

 private:
  Index intern(std::vector<std::string>& ids, std::unordered_map<std::string, Index>& map,
               std::string_view id);

  std::vector<Rating> ratings_;
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, Index> user_map_;
  std::unordered_map<std::string, Index> item_map_;
  std::unordered_map<std::uint64_t, std::size_t> pair_slot_;
};

}  // namespace coldsel
