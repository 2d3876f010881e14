//
// Copyright 2026 The FairFil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "fairfil/token_table.hpp"

#include <utility>

namespace fairfil {

void TokenTable::add(std::string word, Vector vec) {
  if (words_.empty() && dim_ == 0) dim_ = vec.size();
  if (vec.size() != dim_) {
    throw Error(Errc::kDimensionMismatch,
                "token '" + word + "' has dim " + std::to_string(vec.size()));
  }
  if (index_.count(word) != 0) {
    throw Error(Errc::kDuplicateWord, "duplicate token '" + word + "'");
  }
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  vectors_.push_back(std::move(vec));
}

const Vector* TokenTable::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

}  // namespace fairfil
