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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fairfil/errors.hpp"
#include "fairfil/rng.hpp"
#include "fairfil/textaug.hpp"

namespace fairfil {
namespace {

using Tokens = std::vector<std::string>;

const Lexicon& gender() { return Lexicon::default_gender(); }
std::size_t male() { return *gender().direction_index("male"); }
std::size_t female() { return *gender().direction_index("female"); }

template <typename F>
Errc code_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::kIo;
}

TEST(Tokenize, SplitsPunctuationKeepsApostrophes) {
  EXPECT_EQ(tokenize("He is good.").tokens, (Tokens{"He", "is", "good", "."}));
  EXPECT_TRUE(tokenize("").tokens.empty());
  EXPECT_TRUE(tokenize("   ").tokens.empty());
  EXPECT_EQ(tokenize("don't stop").tokens, (Tokens{"don't", "stop"}));
  EXPECT_EQ(tokenize("(yes)!").tokens, (Tokens{"(", "yes", ")", "!"}));
}

TEST(Tokenize, TextRecoversInputUpToWhitespace) {
  EXPECT_EQ(tokenize("He is good.").text(), "He is good.");
  EXPECT_EQ(tokenize("  a   b,  c ").text(), "a b, c");
  EXPECT_EQ(tokenize("\"Hi,\" she said.").text(), "\"Hi,\" she said.");
}

TEST(FindSensitive, TagsPositionsAndDirections) {
  const auto s = find_sensitive(
      tokenize("He is good at playing his basketball ."), gender());
  EXPECT_EQ(s.sensitive_positions(), (std::vector<std::size_t>{0, 5}));
  for (const auto& t : s.tags) EXPECT_EQ(t.direction, male());
  EXPECT_FALSE(s.mixed_directions);

  const auto mixed = find_sensitive(tokenize("He met her ."), gender());
  ASSERT_EQ(mixed.tags.size(), 2u);
  EXPECT_EQ(mixed.tags[0].direction, male());
  EXPECT_EQ(mixed.tags[1].position, 2u);
  EXPECT_EQ(mixed.tags[1].direction, female());
  EXPECT_TRUE(mixed.mixed_directions);

  EXPECT_TRUE(find_sensitive(tokenize("the cat sat ."), gender()).tags.empty());
}

TEST(Augment, TableOneExample) {
  const auto s = find_sensitive(
      tokenize("He is good at playing his basketball."), gender());
  const auto out = augment(s, gender(), female());
  EXPECT_EQ(out.text(), "She is good at playing her basketball.");
  for (const auto& t : out.tags) EXPECT_EQ(t.direction, female());
}

TEST(Augment, PreservesCasePattern) {
  const auto s = find_sensitive(tokenize("HIS Father and his son"), gender());
  EXPECT_EQ(augment(s, gender(), female()).text(),
            "HER Mother and her daughter");
}

TEST(Augment, NoSensitiveWordsIsUnchanged) {
  const auto s = find_sensitive(tokenize("The sky is blue."), gender());
  const auto out = augment(s, gender(), female());
  EXPECT_TRUE(out.unchanged);
  EXPECT_EQ(out.tokens, s.tokens);
}

TEST(Augment, Errors) {
  EXPECT_EQ(code_of([] { augment(tokenize("he"), gender(), 1); }),
            Errc::kUntaggedSentence);
  const auto s = find_sensitive(tokenize("he"), gender());
  EXPECT_EQ(code_of([&] { augment(s, gender(), 2); }), Errc::kNoSuchDirection);
}

TEST(Augment, OwnDirectionIsIdentity) {
  const auto s = find_sensitive(tokenize("My uncle and his wife"), gender());
  const auto mixed_to_male = augment(s, gender(), male());
  EXPECT_EQ(mixed_to_male.text(), "My uncle and his husband");
  EXPECT_EQ(augment(mixed_to_male, gender(), male()).tokens, mixed_to_male.tokens);
}

TEST(Augment, RandomRoundTripPreservesTokens) {
  const std::vector<std::string> filler = {"the", "a",    "went", "to",
                                           "market", "quickly", "and", "saw",
                                           ",",    "very", "tall",  "tree"};
  Rng rng(2024);
  for (int n = 0; n < 1000; ++n) {
    const std::size_t k = rng.below(2);
    const auto words = gender().words_in(k);
    std::string text;
    const std::size_t len = 1 + rng.below(12);
    for (std::size_t i = 0; i < len; ++i) {
      std::string w = rng.uniform() < 0.3 ? words[rng.below(words.size())]
                                          : filler[rng.below(filler.size())];
      if (rng.uniform() < 0.2) w[0] = static_cast<char>(std::toupper(w[0]));
      text += (i ? " " : "") + w;
    }
    text += ".";
    const auto s = find_sensitive(tokenize(text), gender());
    const auto there = augment(s, gender(), 1 - k);
    const auto back = augment(find_sensitive(there, gender()), gender(), k);
    ASSERT_EQ(there.tokens.size(), s.tokens.size());
    ASSERT_EQ(back.tokens, s.tokens) << text;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (!gender().find(s.tokens[i])) ASSERT_EQ(there.tokens[i], s.tokens[i]);
    }
  }
}

TEST(Lexicon, RejectsBadShapes) {
  EXPECT_EQ(code_of([] { Lexicon("t", {"a"}, {{"x"}}); }), Errc::kBadLexicon);
  EXPECT_EQ(code_of([] { Lexicon("t", {"a", "b"}, {{"x"}}); }),
            Errc::kBadLexicon);
  EXPECT_EQ(code_of([] { Lexicon("t", {"a", "b"}, {{"x", "y"}, {"X", "z"}}); }),
            Errc::kBadLexicon);
  EXPECT_EQ(code_of([] { Lexicon("t", {"a", "b"}, {{"two words", "y"}}); }),
            Errc::kBadLexicon);
}

TEST(Lexicon, JsonRoundTrip) {
  const Lexicon lex = Lexicon::from_json(
      R"({"topic":"religion","directions":["a","b","c"],
          "classes":[["church","mosque","synagogue"]]})");
  EXPECT_EQ(lex.num_directions(), 3u);
  EXPECT_EQ(lex.find("Mosque")->direction, 1u);
  const Lexicon again = Lexicon::from_json(lex.to_json());
  EXPECT_EQ(again.classes(), lex.classes());
  EXPECT_EQ(again.directions(), lex.directions());
  EXPECT_EQ(code_of([] { Lexicon::from_json("{"); }), Errc::kBadLexicon);
}

TEST(Templates, ExpandInOrder) {
  EXPECT_EQ(expand_templates("boy", TemplateSet({"This is <w>."})),
            (Tokens{"This is boy."}));
  EXPECT_TRUE(expand_templates("boy", TemplateSet({})).empty());
  const TemplateSet three({"<w>!", "A <w>.", "<w> is here."});
  std::vector<std::string> all;
  for (const char* w : {"boy", "girl"}) {
    for (auto& s : expand_templates(w, three)) all.push_back(s);
  }
  EXPECT_EQ(all.size(), 6u);
  EXPECT_EQ(all[4], "A girl.");
  EXPECT_EQ(TemplateSet::default_seat().templates().size(), 6u);
}

TEST(Templates, PlaceholderExactlyOnce) {
  EXPECT_EQ(code_of([] { TemplateSet({"no placeholder"}); }), Errc::kBadTemplate);
  EXPECT_EQ(code_of([] { TemplateSet({"<w> and <w>"}); }), Errc::kBadTemplate);
  EXPECT_EQ(TemplateSet::from_text("This is <w>.\n\n<w> is here.\n").templates().size(),
            2u);
}

}  // namespace
}  // namespace fairfil
