// Copyright 2026 The selprompt Authors
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


#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "selprompt/biose.hpp"
#include "selprompt/postproc.hpp"

namespace selprompt {
namespace {

using EC = ErrorClass;

TEST(NormalizeQa, Examples) {
  EXPECT_EQ(normalize_qa("The United States."), "united states");
  EXPECT_EQ(normalize_qa(""), "");
  EXPECT_EQ(normalize_qa("[Luke Kuechly]"), "luke kuechly");
  EXPECT_EQ(normalize_qa("  Die   Stadt! ", false), "die stadt");
  EXPECT_EQ(normalize_qa("a theory", false), "a theory");
  EXPECT_EQ(normalize_qa("a theory"), "theory");
}

TEST(NormalizeQa, Idempotent) {
  std::mt19937 rng(4);
  const std::vector<std::string> pieces{"The", " ", "an", "Über", "!", "[", "]", "'", "x", "  ", "A.", "東京"};
  for (int t = 0; t < 300; ++t) {
    std::string s;
    for (int k = 0; k < 8; ++k) s += pieces[rng() % pieces.size()];
    auto once = normalize_qa(s);
    EXPECT_EQ(normalize_qa(once), once) << s;
  }
}

TEST(ClassifyQa, ErrorTaxonomyRows) {
  auto wrapped = classify_qa("[The united states]");
  EXPECT_EQ(wrapped.error_class, EC::kFormatInconsistency);
  EXPECT_EQ(wrapped.answer, "united states");
  auto refusal = classify_qa(
      "The question cannot be answered as the answer is not provided in the given context");
  EXPECT_EQ(refusal.error_class, EC::kUnwarrantedRefusal);
  EXPECT_TRUE(refusal.answer.empty());
  EXPECT_EQ(classify_qa("Luke Kuechly").error_class, EC::kNone);
}

TEST(ParseNer, Canonical) {
  auto p = parse_ner("[('PER','Hiei'), ('PER','Hinata')]");
  std::vector<NerEntity> want{{EntityType::kPER, "Hiei"}, {EntityType::kPER, "Hinata"}};
  EXPECT_EQ(p.entities, want);
  EXPECT_EQ(p.error_class, EC::kNone);
  auto q = parse_ner("[(PER, John Smith), (LOC, Paris)]");
  EXPECT_EQ(q.entities.size(), 2u);
  EXPECT_EQ(q.error_class, EC::kNone);
}

TEST(ParseNer, ErrorTaxonomyRows) {
  auto nl = parse_ner("- [PER: Hiei]\n- [PER: Hinata]");
  std::vector<NerEntity> want{{EntityType::kPER, "Hiei"}, {EntityType::kPER, "Hinata"}};
  EXPECT_EQ(nl.entities, want);
  EXPECT_EQ(nl.error_class, EC::kFormatInconsistency);

  auto strings = parse_ner("[ 'LOC: 新 北 市', 'LOC: 平 溪 區' ]");
  ASSERT_EQ(strings.entities.size(), 2u);
  EXPECT_EQ(strings.entities[0].surface, "新 北 市");
  EXPECT_EQ(strings.error_class, EC::kFormatInconsistency);

  auto prefix = parse_ner("Ner Tags: ['PER: LL Cool J']");
  ASSERT_EQ(prefix.entities.size(), 1u);
  EXPECT_EQ(prefix.entities[0].surface, "LL Cool J");
  EXPECT_EQ(prefix.error_class, EC::kExtraneousInformation);

  auto trailing = parse_ner("[] (No entities found in the sentence)");
  EXPECT_TRUE(trailing.entities.empty());
  EXPECT_EQ(trailing.error_class, EC::kExtraneousInformation);

  auto refusal = parse_ner("Since the last sentence is in English, I will provide the NER tags in English as well");
  EXPECT_TRUE(refusal.entities.empty());
  EXPECT_EQ(refusal.error_class, EC::kUnwarrantedRefusal);
}

TEST(ParseNer, NeverThrows) {
  std::mt19937 rng(8);
  const std::string alphabet = "[](),:'\"- PERLOCxyz\n東";
  for (int t = 0; t < 2000; ++t) {
    std::string s;
    std::size_t n = rng() % 30;
    for (std::size_t k = 0; k < n; ++k) s.push_back(alphabet[rng() % (alphabet.size() - 3)]);
    EXPECT_NO_THROW(parse_ner(s)) << s;
  }
}

TEST(ProjectBiose, Examples) {
  std::vector<std::string> tokens{"John", "Smith", "visited", "Paris"};
  auto p = project_biose(tokens, {{EntityType::kPER, "John Smith"}, {EntityType::kLOC, "Paris"}});
  EXPECT_EQ(p.labels, (std::vector<std::string>{"B-PER", "E-PER", "O", "S-LOC"}));
  EXPECT_EQ(p.dropped, 0u);
  auto none = project_biose(tokens, {});
  EXPECT_EQ(none.labels, std::vector<std::string>(4, "O"));
  auto miss = project_biose(tokens, {{EntityType::kORG, "Acme"}});
  EXPECT_EQ(miss.labels, std::vector<std::string>(4, "O"));
  EXPECT_EQ(miss.dropped, 1u);
}

TEST(ProjectBiose, MatchingRules) {
  std::vector<std::string> tokens{"paris", "and", "Paris"};
  auto p = project_biose(tokens, {{EntityType::kLOC, "PARIS"}, {EntityType::kLOC, "Paris"}});
  EXPECT_EQ(p.labels, (std::vector<std::string>{"S-LOC", "O", "S-LOC"}));
  // Spacing differs from tokenization.
  std::vector<std::string> zh{"新", "北", "市", "的"};
  auto q = project_biose(zh, {{EntityType::kLOC, "新北市"}});
  EXPECT_EQ(q.labels, (std::vector<std::string>{"B-LOC", "I-LOC", "E-LOC", "O"}));
}

TEST(ProjectBiose, AlwaysWellFormed) {
  std::mt19937 rng(12);
  const std::vector<std::string> vocab{"a", "b", "c", "d"};
  for (int t = 0; t < 500; ++t) {
    std::vector<std::string> tokens(1 + rng() % 8);
    for (auto& tok : tokens) tok = vocab[rng() % vocab.size()];
    std::vector<NerEntity> ents;
    for (std::size_t k = rng() % 4; k > 0; --k) {
      std::string s = vocab[rng() % vocab.size()];
      if (rng() % 2) s += " " + vocab[rng() % vocab.size()];
      ents.push_back({static_cast<EntityType>(rng() % 3), s});
    }
    auto p = project_biose(tokens, ents);
    ASSERT_EQ(p.labels.size(), tokens.size());
    EXPECT_TRUE(is_well_formed_biose(p.labels));
    EXPECT_EQ(decode_biose(p.labels).size() + p.dropped, ents.size());
  }
}

TEST(NormalizeNli, Examples) {
  auto lex = Lexicons::load_default().nli;
  auto plain = normalize_nli("neutral", lex);
  EXPECT_EQ(plain.label, NliLabel::kNeutral);
  EXPECT_EQ(plain.error_class, EC::kNone);
  auto just = normalize_nli(
      "The second statement neutral because it does not provide any information that contradicts", lex);
  EXPECT_EQ(just.label, NliLabel::kNeutral);
  EXPECT_EQ(just.error_class, EC::kExtraneousInformation);
  auto es = normalize_nli("vinculación", lex);
  EXPECT_EQ(es.label, NliLabel::kEntailment);
  EXPECT_EQ(es.error_class, EC::kWrongLanguage);
  auto none = normalize_nli("I think so", lex);
  EXPECT_FALSE(none.label.has_value());
  EXPECT_EQ(none.error_class, EC::kFormatInconsistency);
  EXPECT_EQ(normalize_nli("Entailment.", lex).error_class, EC::kNone);
  // Word boundaries: "neutrality" is not the label word.
  EXPECT_FALSE(normalize_nli("neutrality", lex).label.has_value());
}

TEST(NormalizeSum, Examples) {
  auto pre = Lexicons::load_default().summary_prefixes;
  auto pt = classify_sum("Resumo: O ministro de Emergências da Rússia, Sergei Shoigu ...", pre);
  EXPECT_EQ(pt.summary, "O ministro de Emergências da Rússia, Sergei Shoigu ...");
  EXPECT_EQ(pt.error_class, EC::kExtraneousInformation);
  EXPECT_EQ(normalize_sum("plain summary", pre), "plain summary");
  EXPECT_EQ(normalize_sum("The Summary: X", pre), "X");
  EXPECT_EQ(normalize_sum("**Summary:** Y", pre), "Y");
  EXPECT_EQ(normalize_sum("Summary of events", pre), "Summary of events");
}

TEST(LanguageCheck, ScriptHeuristic) {
  auto reg = std::make_shared<LanguageRegistry>(LanguageRegistry::load(data_file("languages.jsonl").string()));
  ScriptDetector det(reg);
  EXPECT_EQ(check_output_language("Привет мир", "ru", det), LanguageCheck::kMatch);
  EXPECT_EQ(check_output_language("hello world", "zh", det), LanguageCheck::kMismatch);
  EXPECT_EQ(check_output_language("", "ru", det), LanguageCheck::kIndeterminate);
  EXPECT_EQ(check_output_language("12 34 !", "ru", det), LanguageCheck::kIndeterminate);
  // Majority rule with known counts: 3 Cyrillic vs 2 Latin letters, then a tie.
  EXPECT_EQ(check_output_language("абв ab", "ru", det), LanguageCheck::kMatch);
  EXPECT_EQ(check_output_language("аб ab", "ru", det), LanguageCheck::kMismatch);
  EXPECT_EQ(check_output_language("hello", "en", det), LanguageCheck::kMatch);
  EXPECT_EQ(check_output_language("こんにちは世界", "ja", det), LanguageCheck::kMatch);
}

TEST(ErrorClassNames, RoundTrip) {
  for (auto e : {EC::kNone, EC::kFormatInconsistency, EC::kExtraneousInformation,
                 EC::kUnwarrantedRefusal, EC::kWrongLanguage}) {
    EXPECT_EQ(parse_error_class(to_string(e)), e);
  }
  EXPECT_THROW(parse_error_class("bogus"), Error);
}

}  // namespace
}  // namespace selprompt
