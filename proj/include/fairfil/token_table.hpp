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

#ifndef FAIRFIL_TOKEN_TABLE_HPP_
#define FAIRFIL_TOKEN_TABLE_HPP_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fairfil/nn.hpp"

namespace fairfil {

// Word -> static token embedding, case-sensitive, insertion-ordered.
class TokenTable {
 public:
  explicit TokenTable(Index dim = 0) : dim_(dim) {}

  // Throws DuplicateWord or DimensionMismatch.
  void add(std::string word, Vector vec);

  // nullptr when absent.
  const Vector* find(std::string_view word) const;

  Index dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const Vector& vector(std::size_t i) const { return vectors_[i]; }

  bool operator==(const TokenTable& other) const {
    return dim_ == other.dim_ && words_ == other.words_ &&
           vectors_ == other.vectors_;
  }

 private:
  Index dim_;
  std::vector<std::string> words_;
  std::vector<Vector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace fairfil

#endif  // FAIRFIL_TOKEN_TABLE_HPP_
