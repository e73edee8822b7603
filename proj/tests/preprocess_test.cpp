// Copyright 2026 The tempent Authors.
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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support/synthetic.hpp"
#include "tempent/preprocess.hpp"
#include "tempent/vocabulary.hpp"

namespace tempent {
namespace {

using Tokens = std::vector<std::string>;
const std::string kW = testing::kWiki;

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("Nibali wins Tour!"), (Tokens{"nibali", "wins", "tour"}));
  EXPECT_EQ(tokenize(""), Tokens{});
  EXPECT_EQ(tokenize("U.S. 2016"), (Tokens{"u", "s", "2016"}));
  EXPECT_EQ(tokenize("  --  "), Tokens{});
  EXPECT_EQ(tokenize("Zürich ÉCOLE"), (Tokens{"zürich", "école"}));
  EXPECT_EQ(tokenize("Αθήνα—Москва"), (Tokens{"αθήνα", "москва"}));
}

TEST(EntityToken, Examples) {
  EXPECT_EQ(entity_token(kW + "Tour_de_France"), "E:" + kW + "Tour_de_France");
  EXPECT_EQ(entity_token(kW + "Vincenzo_Nibali"),
            "E:" + kW + "Vincenzo_Nibali");
  EXPECT_THROW(entity_token(""), Error);
  EXPECT_TRUE(is_entity_token(entity_token(kW + "Paris")));
  EXPECT_FALSE(is_entity_token("paris"));
}

TEST(EntityLabel, Examples) {
  EXPECT_EQ(entity_label(kW + "Tour_de_France"),
            (Tokens{"tour", "de", "france"}));
  EXPECT_EQ(entity_label(kW + "Kobe_(city)"), Tokens{"kobe"});
  EXPECT_EQ(entity_label(kW + "2014_FIFA_World_Cup"),
            (Tokens{"2014", "fifa", "world", "cup"}));
  EXPECT_EQ(entity_label(kW + "Z%C3%BCrich"), Tokens{"zürich"});
  EXPECT_EQ(entity_label(kW + "A_(b_(c))_D/"), (Tokens{"a", "d"}));
  EXPECT_EQ(entity_label(kW + "Paris?x=1#top"), Tokens{"paris"});
}

TEST(EntityLabel, Errors) {
  try {
    entity_label(kW + "(disambiguation)");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::kEmptyLabel);
  }
  try {
    entity_label("");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::kEmptyUri);
  }
}

Document nibali_doc() {
  return testing::make_document(
      "a1", "2014-07-15",
      {testing::Mention{"Nibali", kW + "Vincenzo_Nibali"}, "wins"});
}

TEST(ReplaceMentions, EntityAwareAndAgnostic) {
  EXPECT_EQ(replace_mentions(nibali_doc(), true).tokens,
            (Tokens{"E:" + kW + "Vincenzo_Nibali", "wins"}));
  EXPECT_EQ(replace_mentions(nibali_doc(), false).tokens,
            (Tokens{"nibali", "wins"}));
  Document plain = testing::make_document("p", "2014-07-15",
                                          {"Tour", "de", "France!"});
  EXPECT_EQ(replace_mentions(plain, true).tokens, tokenize(plain.text));
}

TEST(ReplaceMentions, MentionInsideWord) {
  // A mention splits the surrounding text; the pieces are separate tokens.
  Document d;
  d.doc_id = "x";
  d.timestamp = *parse_date("2014-07-15");
  d.text = "preKobepost";
  d.mentions.push_back({3, 7, "Kobe", kW + "Kobe_Bryant"});
  EXPECT_EQ(replace_mentions(d, true).tokens,
            (Tokens{"pre", "E:" + kW + "Kobe_Bryant", "post"}));
}

// Random documents: every mention becomes exactly one entity token, in
// order, and no word token straddles a mention.
TEST(ReplaceMentions, RandomDocumentsKeepMentionsDisjoint) {
  std::mt19937 gen(7);
  const Tokens words = {"alpha", "beta", "gamma", "delta", "x"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<testing::Part> parts;
    std::vector<std::string> uris;
    const int n = 1 + gen() % 12;
    for (int i = 0; i < n; ++i) {
      if (gen() % 3 == 0) {
        std::string uri = kW + "E" + std::to_string(gen() % 5);
        uris.push_back(uri);
        parts.push_back(testing::Mention{words[gen() % words.size()], uri});
      } else {
        parts.push_back(words[gen() % words.size()]);
      }
    }
    Document d = testing::make_document("d", "2014-07-15", parts);
    auto tokens = replace_mentions(d, true).tokens;
    Tokens entities;
    for (const auto &t : tokens) {
      if (is_entity_token(t)) entities.push_back(t.substr(2));
    }
    ASSERT_EQ(entities, uris);
    EXPECT_EQ(tokens.size(), static_cast<std::size_t>(n));
  }
}

TEST(BuildVocab, MinCountBoundary) {
  auto seqs = [](int n) {
    std::vector<TokenSequence> s;
    for (int i = 0; i < n; ++i) s.push_back({"d", {"wins", "x", "x", "x", "x", "x"}});
    return s;
  };
  EXPECT_FALSE(build_vocab(seqs(4), 5).find("wins"));
  EXPECT_TRUE(build_vocab(seqs(5), 5).find("wins"));
  EXPECT_THROW(build_vocab({}, 1), Error);
}

TEST(BuildVocab, MinCountOneKeepsEverything) {
  std::vector<TokenSequence> s = {{"a", {"b", "a", "E:u"}}, {"b", {"c", "a"}}};
  auto v = build_vocab(s, 1);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0].token, "a");
  EXPECT_EQ(v[0].count, 2u);
  EXPECT_EQ(v.total_count(), 5u);
  EXPECT_TRUE(v[*v.find("E:u")].is_entity);
  EXPECT_FALSE(v[*v.find("b")].is_entity);
}

TEST(BuildVocab, IndependentOfOrderAndSharding) {
  std::mt19937 gen(3);
  std::vector<TokenSequence> seqs;
  for (int i = 0; i < 200; ++i) {
    TokenSequence s{"d" + std::to_string(i), {}};
    for (int j = 0; j < 8; ++j) s.tokens.push_back("t" + std::to_string(gen() % 40));
    seqs.push_back(s);
  }
  const Vocabulary ref = build_vocab(seqs, 3);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(seqs.begin(), seqs.end(), gen);
    EXPECT_EQ(build_vocab(seqs, 3), ref);
    VocabCounter a, b, c;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      (i % 3 == 0 ? a : i % 3 == 1 ? b : c).add(seqs[i]);
    }
    c.merge(a);
    c.merge(b);
    EXPECT_EQ(c.finalize(3), ref);
  }
}

}  // namespace
}  // namespace tempent
