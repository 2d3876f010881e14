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

#include "fairfil/textaug.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <utility>

#include "fairfil/errors.hpp"
#include "json.hpp"

namespace fairfil {
namespace {

using nlohmann::json;

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

enum class CasePattern { kLower, kInitial, kUpper };

CasePattern case_of(std::string_view token) {
  bool any_alpha = false;
  bool all_upper = true;
  for (char c : token) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) {
      any_alpha = true;
      if (!std::isupper(u)) all_upper = false;
    }
  }
  if (any_alpha && all_upper && token.size() > 1) return CasePattern::kUpper;
  if (!token.empty() && std::isupper(static_cast<unsigned char>(token[0]))) {
    return CasePattern::kInitial;
  }
  return CasePattern::kLower;
}

std::string apply_case(std::string word, CasePattern pattern) {
  switch (pattern) {
    case CasePattern::kUpper:
      for (char& c : word) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      break;
    case CasePattern::kInitial:
      if (!word.empty()) {
        word[0] =
            static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      }
      break;
    case CasePattern::kLower:
      break;
  }
  return word;
}

// male, female
const std::vector<std::vector<std::string>> kGenderPairs = {
    {"he", "she"},
    {"his", "her"},
    {"himself", "herself"},
    {"man", "woman"},
    {"men", "women"},
    {"boy", "girl"},
    {"boys", "girls"},
    {"male", "female"},
    {"males", "females"},
    {"father", "mother"},
    {"fathers", "mothers"},
    {"son", "daughter"},
    {"sons", "daughters"},
    {"brother", "sister"},
    {"brothers", "sisters"},
    {"uncle", "aunt"},
    {"uncles", "aunts"},
    {"nephew", "niece"},
    {"nephews", "nieces"},
    {"husband", "wife"},
    {"husbands", "wives"},
    {"king", "queen"},
    {"kings", "queens"},
    {"prince", "princess"},
    {"princes", "princesses"},
    {"gentleman", "lady"},
    {"gentlemen", "ladies"},
    {"mr", "mrs"},
    {"sir", "madam"},
    {"dad", "mom"},
    {"dads", "moms"},
    {"grandfather", "grandmother"},
    {"grandfathers", "grandmothers"},
    {"grandson", "granddaughter"},
    {"grandsons", "granddaughters"},
    {"boyfriend", "girlfriend"},
    {"boyfriends", "girlfriends"},
    {"groom", "bride"},
    {"grooms", "brides"},
    {"stepfather", "stepmother"},
    {"stepson", "stepdaughter"},
    {"actor", "actress"},
    {"actors", "actresses"},
    {"waiter", "waitress"},
    {"masculine", "feminine"},
    {"paternal", "maternal"},
    {"fraternity", "sorority"},
    {"bachelor", "spinster"},
    {"monk", "nun"},
    {"monks", "nuns"},
    {"lad", "lass"},
    {"guy", "gal"},
    {"guys", "gals"},
    {"gods", "goddesses"},
    {"god", "goddess"},
    {"hero", "heroine"},
    {"heroes", "heroines"},
    {"duke", "duchess"},
    {"emperor", "empress"},
};

}  // namespace

Lexicon::Lexicon(std::string topic, std::vector<std::string> directions,
                 std::vector<std::vector<std::string>> classes)
    : topic_(std::move(topic)), directions_(std::move(directions)) {
  if (directions_.size() < 2) {
    throw Error(Errc::kBadLexicon, "a topic needs at least two directions");
  }
  classes_.reserve(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].size() != directions_.size()) {
      throw Error(Errc::kBadLexicon,
                  "class " + std::to_string(c) + " has " +
                      std::to_string(classes[c].size()) + " entries, expected " +
                      std::to_string(directions_.size()));
    }
    std::vector<std::string> lowered;
    for (std::size_t k = 0; k < classes[c].size(); ++k) {
      std::string w = ascii_lower(classes[c][k]);
      if (w.empty() ||
          std::any_of(w.begin(), w.end(), [](char ch) { return is_space(ch); })) {
        throw Error(Errc::kBadLexicon,
                    "lexicon entries must be single non-empty tokens");
      }
      if (!index_.emplace(w, Entry{c, k}).second) {
        throw Error(Errc::kBadLexicon, "word '" + w + "' appears twice");
      }
      lowered.push_back(std::move(w));
    }
    classes_.push_back(std::move(lowered));
  }
}

Lexicon Lexicon::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
    return Lexicon(j.at("topic").get<std::string>(),
                   j.at("directions").get<std::vector<std::string>>(),
                   j.at("classes").get<std::vector<std::vector<std::string>>>());
  } catch (const json::exception& e) {
    throw Error(Errc::kBadLexicon, e.what());
  }
}

std::string Lexicon::to_json() const {
  json j;
  j["topic"] = topic_;
  j["directions"] = directions_;
  j["classes"] = classes_;
  return j.dump(2);
}

const Lexicon& Lexicon::default_gender() {
  static const Lexicon lex("gender", {"male", "female"}, kGenderPairs);
  return lex;
}

std::optional<Lexicon::Entry> Lexicon::find(std::string_view word) const {
  const auto it = index_.find(ascii_lower(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Lexicon::direction_index(
    std::string_view name) const {
  for (std::size_t k = 0; k < directions_.size(); ++k) {
    if (directions_[k] == name) return k;
  }
  return std::nullopt;
}

std::vector<std::string> Lexicon::words_in(std::size_t direction) const {
  std::vector<std::string> out;
  out.reserve(classes_.size());
  for (const auto& c : classes_) out.push_back(c.at(direction));
  return out;
}

std::vector<std::size_t> TokenizedSentence::sensitive_positions() const {
  std::vector<std::size_t> p;
  p.reserve(tags.size());
  for (const auto& t : tags) p.push_back(t.position);
  return p;
}

std::optional<std::size_t> TokenizedSentence::majority_direction() const {
  if (tags.empty()) return std::nullopt;
  std::map<std::size_t, std::size_t> counts;
  for (const auto& t : tags) ++counts[t.direction];
  std::size_t best = counts.begin()->first;
  for (const auto& [dir, n] : counts) {
    if (n > counts[best]) best = dir;
  }
  return best;
}

std::string TokenizedSentence::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0 && !attached[i]) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

TokenizedSentence tokenize(std::string_view text) {
  TokenizedSentence s;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::string_view chunk = text.substr(i, end - i);
    i = end;

    std::size_t lead = 0;
    while (lead < chunk.size() && is_ascii_punct(chunk[lead])) ++lead;
    std::size_t trail = chunk.size();
    while (trail > lead && is_ascii_punct(chunk[trail - 1])) --trail;

    bool first = true;
    auto push = [&](std::string_view tok) {
      s.tokens.emplace_back(tok);
      s.attached.push_back(!first);
      first = false;
    };
    for (std::size_t k = 0; k < lead; ++k) push(chunk.substr(k, 1));
    if (trail > lead) push(chunk.substr(lead, trail - lead));
    for (std::size_t k = trail; k < chunk.size(); ++k) push(chunk.substr(k, 1));
  }
  return s;
}

TokenizedSentence find_sensitive(const TokenizedSentence& s,
                                 const Lexicon& lex) {
  TokenizedSentence out = s;
  out.tags.clear();
  out.tagged = true;
  out.unchanged = false;
  for (std::size_t p = 0; p < out.tokens.size(); ++p) {
    if (const auto e = lex.find(out.tokens[p])) {
      out.tags.push_back({p, e->direction, e->cls});
    }
  }
  out.mixed_directions =
      std::any_of(out.tags.begin(), out.tags.end(), [&](const auto& t) {
        return t.direction != out.tags.front().direction;
      });
  return out;
}

TokenizedSentence augment(const TokenizedSentence& s, const Lexicon& lex,
                          std::size_t target) {
  if (!s.tagged) {
    throw Error(Errc::kUntaggedSentence, "run find_sensitive first");
  }
  if (target >= lex.num_directions()) {
    throw Error(Errc::kNoSuchDirection,
                "direction " + std::to_string(target) + " out of range");
  }
  TokenizedSentence out = s;
  out.unchanged = s.tags.empty();
  for (auto& tag : out.tags) {
    const std::string& token = out.tokens.at(tag.position);
    const auto entry = lex.find(token);
    if (!entry || entry->cls != tag.cls) {
      throw Error(Errc::kUntaggedSentence,
                  "tag at position " + std::to_string(tag.position) +
                      " does not match the lexicon");
    }
    out.tokens[tag.position] =
        apply_case(lex.classes()[tag.cls][target], case_of(token));
    tag.direction = target;
  }
  out.mixed_directions = false;
  return out;
}

TemplateSet::TemplateSet(std::vector<std::string> templates)
    : templates_(std::move(templates)) {
  for (const auto& t : templates_) {
    const auto first = t.find(kPlaceholder);
    if (first == std::string::npos ||
        t.find(kPlaceholder, first + kPlaceholder.size()) != std::string::npos) {
      throw Error(Errc::kBadTemplate,
                  "template must contain <w> exactly once: '" + t + "'");
    }
  }
}

TemplateSet TemplateSet::from_text(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool blank = std::all_of(line.begin(), line.end(),
                                   [](char c) { return is_space(c); });
    if (!blank) lines.push_back(std::move(line));
    start = end + 1;
  }
  return TemplateSet(std::move(lines));
}

const TemplateSet& TemplateSet::default_seat() {
  static const TemplateSet ts({"This is <w>.", "That is <w>.", "There is <w>.",
                               "Here is <w>.", "<w> is here.", "<w> is there."});
  return ts;
}

std::vector<std::string> expand_templates(std::string_view word,
                                          const TemplateSet& ts) {
  std::vector<std::string> out;
  out.reserve(ts.templates().size());
  for (const auto& t : ts.templates()) {
    std::string s = t;
    s.replace(s.find(kPlaceholder), kPlaceholder.size(), word);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fairfil
