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

#ifndef FAIRFIL_TEXTAUG_HPP_
#define FAIRFIL_TEXTAUG_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fairfil {

// A sensitive topic split into K bias directions. Each equivalence class holds
// one word per direction; slot k of a class is its word in direction k, so a
// class defines the replacement r_j between any two directions.
class Lexicon {
 public:
  Lexicon(std::string topic, std::vector<std::string> directions,
          std::vector<std::vector<std::string>> classes);

  // Parses {"topic":..., "directions":[...], "classes":[[...], ...]}.
  static Lexicon from_json(std::string_view text);
  std::string to_json() const;

  // Built-in English gender lexicon (male, female).
  static const Lexicon& default_gender();

  struct Entry {
    std::size_t cls;
    std::size_t direction;
  };

  // Case-insensitive lookup.
  std::optional<Entry> find(std::string_view word) const;

  std::optional<std::size_t> direction_index(std::string_view name) const;

  const std::string& topic() const { return topic_; }
  const std::vector<std::string>& directions() const { return directions_; }
  const std::vector<std::vector<std::string>>& classes() const {
    return classes_;
  }
  std::size_t num_directions() const { return directions_.size(); }

  // All words of one direction, in class order.
  std::vector<std::string> words_in(std::size_t direction) const;

 private:
  std::string topic_;
  std::vector<std::string> directions_;
  std::vector<std::vector<std::string>> classes_;  // stored lowercase
  std::unordered_map<std::string, Entry> index_;
};

struct SensitiveTag {
  std::size_t position;
  std::size_t direction;
  std::size_t cls;
};

struct TokenizedSentence {
  std::vector<std::string> tokens;
  // True when token i was attached to token i-1 without whitespace.
  std::vector<bool> attached;
  // Filled by find_sensitive, sorted by position.
  std::vector<SensitiveTag> tags;
  bool tagged = false;
  bool mixed_directions = false;
  // Set by augment when there was nothing to replace.
  bool unchanged = false;

  std::vector<std::size_t> sensitive_positions() const;
  // Direction holding the most tags; ties go to the lower index.
  std::optional<std::size_t> majority_direction() const;
  std::string text() const;
};

// Whitespace split; leading and trailing ASCII punctuation of each chunk
// becomes one token per character. Interior punctuation ("don't") is kept.
TokenizedSentence tokenize(std::string_view text);

TokenizedSentence find_sensitive(const TokenizedSentence& s,
                                 const Lexicon& lex);

// Replaces every tagged token with its replaceable word in `target`, keeping
// the token's case pattern (lower, Initial, ALL CAPS).
TokenizedSentence augment(const TokenizedSentence& s, const Lexicon& lex,
                          std::size_t target);

inline constexpr std::string_view kPlaceholder = "<w>";

// Templates each containing the placeholder exactly once.
class TemplateSet {
 public:
  explicit TemplateSet(std::vector<std::string> templates);

  // One template per non-empty line.
  static TemplateSet from_text(std::string_view text);
  static const TemplateSet& default_seat();

  const std::vector<std::string>& templates() const { return templates_; }

 private:
  std::vector<std::string> templates_;
};

std::vector<std::string> expand_templates(std::string_view word,
                                          const TemplateSet& ts);

}  // namespace fairfil

#endif  // FAIRFIL_TEXTAUG_HPP_
