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

#include "selprompt/paths.hpp"
#include "selprompt/prompting.hpp"

namespace selprompt {
namespace {

class CountingTranslator final : public TranslationProvider {
 public:
  std::string name() const override { return "mock"; }
  ProviderKind kind() const override { return ProviderKind::kMock; }
  std::string translate_text(const TranslationRequest& req) override {
    ++calls;
    return inner.translate_text(req);
  }
  MockTranslator inner;
  int calls = 0;
};

TaskInstance de_qa(std::string id = "q1") {
  return {std::move(id), "de", QaPayload{"Wo liegt Bonn?", "Bonn liegt am Rhein.", {"am Rhein"}}};
}

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string_view::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

struct Fixture : ::testing::Test {
  LanguageRegistry reg = LanguageRegistry::load(data_file("languages.jsonl").string());
  TemplateSet templates = TemplateSet::load_default();
  CountingTranslator mt;
  CompileContext ctx{mt, nullptr, &reg, &templates};
};

TEST(Templates, FilesMatchCanonicalInstructions) {
  auto files = TemplateSet::load_default();
  for (auto t : kAllTasks) {
    EXPECT_EQ(files.at(t).instruction, canonical_instructions(t)) << to_string(t);
    EXPECT_NO_THROW(files.at(t).validate());
  }
}

TEST(Templates, SlotRules) {
  auto t = default_template(TaskKind::kQA);
  t.instruction = "no slot";
  EXPECT_THROW(t.validate(), Error);
  auto n = default_template(TaskKind::kNLI);
  n.instruction += " {output_language}";
  EXPECT_THROW(n.validate(), Error);
  auto l = default_template(TaskKind::kSUM);
  l.layout = "{context}{examples}{instruction}";
  EXPECT_THROW(l.validate(), Error);
  EXPECT_EQ(detail::fill("{a}{b}{c}", {{"a", "{b}"}, {"b", "x"}}), "{b}x{c}");
}

TEST_F(Fixture, SourceInstructionEnglishOutput) {
  auto cfg = parse_config_code("SSZE", TaskKind::kQA);
  auto p = compile(cfg, de_qa(), {}, "de", ctx);
  EXPECT_EQ(p.expected_output_lang, "en");
  ASSERT_EQ(p.component_spans.size(), 2u);
  auto instr = p.span_text(p.component_spans[0]);
  EXPECT_EQ(instr.rfind(MockTranslator::tag("en", "de"), 0), 0u);
  EXPECT_NE(instr.find("Provide the answer in English."), std::string_view::npos);
  EXPECT_EQ(p.context_block(), "Context: Bonn liegt am Rhein.\nQuestion: Wo liegt Bonn?");
  EXPECT_EQ(p.example_count(), 0u);
}

TEST_F(Fixture, AllEnglishNeedsNoTranslation) {
  TaskInstance en{"e1", "en", QaPayload{"Where is Bonn?", "Bonn is on the Rhine.", {"Rhine"}}};
  TaskInstance demo{"d1", "en", QaPayload{"Q?", "C.", {"A"}}};
  compile(parse_config_code("EEEE", TaskKind::kQA), en, {demo}, "en", ctx);
  EXPECT_EQ(mt.calls, 0);
}

TEST_F(Fixture, FewShotSourceExamples) {
  auto cfg = parse_config_code("SESE", TaskKind::kQA);
  auto p = compile(cfg, de_qa(), {de_qa("d1")}, "de", ctx);
  EXPECT_EQ(p.example_count(), 1u);
  ASSERT_EQ(p.component_spans.size(), 3u);
  EXPECT_EQ(p.component_spans[1].component, "example");
  auto ex = p.span_text(p.component_spans[1]);
  EXPECT_EQ(count(ex, "⟦"), 0u);  // examples stay in the source language
  auto ctx_block = p.context_block();
  EXPECT_EQ(count(ctx_block, MockTranslator::tag("de", "en")), 2u);
  EXPECT_NE(ex.find("Answer: am Rhein"), std::string_view::npos);
}

TEST_F(Fixture, EnglishExamplesTranslateInputAndGold) {
  auto cfg = parse_config_code("SSEE", TaskKind::kQA);
  auto p = compile(cfg, de_qa(), {de_qa("d1"), de_qa("d2")}, "de", ctx);
  EXPECT_EQ(p.example_count(), 2u);
  for (const auto& s : p.component_spans) {
    if (s.component != "example") continue;
    EXPECT_EQ(count(p.span_text(s), MockTranslator::tag("de", "en")), 3u);
  }
  EXPECT_EQ(count(p.context_block(), "⟦"), 0u);
}

TEST_F(Fixture, SpansOrderedDisjointAndInside) {
  for (const auto& cfg : enumerate_configurations(TaskKind::kQA)) {
    std::vector<TaskInstance> demos;
    if (!cfg.zero_shot()) demos = {de_qa("d1"), de_qa("d2")};
    auto p = compile(cfg, de_qa(), demos, "de", ctx);
    std::size_t prev_end = 0;
    int rank = 0;
    for (const auto& s : p.component_spans) {
      int r = s.component == "instruction" ? 0 : s.component == "example" ? 1 : 2;
      EXPECT_GE(r, rank);
      rank = r;
      EXPECT_LE(prev_end, s.begin);
      EXPECT_LE(s.end, p.text.size());
      prev_end = s.end;
    }
    EXPECT_EQ(p.component_spans.back().component, "context");
    EXPECT_EQ(p.config, cfg);
  }
}

TEST_F(Fixture, ContractErrors) {
  auto zs = parse_config_code("SSZS", TaskKind::kQA);
  try {
    compile(zs, de_qa(), {de_qa("d")}, "de", ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kContract);
  }
  EXPECT_THROW(compile(parse_config_code("SSSS", TaskKind::kQA), de_qa(), {}, "de", ctx), Error);
  TaskInstance other{"x", "fr", QaPayload{"q", "c", {"a"}}};
  EXPECT_THROW(compile(parse_config_code("SSSS", TaskKind::kQA), de_qa(), {other}, "de", ctx), Error);
  TaskInstance nli{"n", "de", NliPayload{"p", "h", NliLabel::kNeutral}};
  EXPECT_THROW(compile(zs, nli, {}, "de", ctx), Error);
}

TEST_F(Fixture, NliAndNer) {
  TaskInstance nli{"n", "de", NliPayload{"Es regnet.", "Es ist nass.", NliLabel::kEntailment}};
  auto p = compile(parse_config_code("ESE", TaskKind::kNLI), nli, {nli}, "de", ctx);
  EXPECT_EQ(p.expected_output_lang, "en");
  EXPECT_NE(p.text.find("Answer: entailment"), std::string::npos);
  EXPECT_EQ(p.text.find("{output_language}"), std::string::npos);

  TaskInstance ner{"s", "de", NerPayload{{"Angela", "Merkel", "in", "Berlin"}, {"B-PER", "E-PER", "O", "S-LOC"}}};
  auto q = compile(parse_config_code("EESS", TaskKind::kNER), ner, {ner}, "de", ctx);
  EXPECT_EQ(q.expected_output_lang, "de");
  EXPECT_NE(q.text.find("Entities: [(PER, Angela Merkel), (LOC, Berlin)]"), std::string::npos);
  EXPECT_NE(q.text.find("in the German."), std::string::npos);
  EXPECT_EQ(render_entities({"a", "b"}, {"S-ORG", "O"}), "[(ORG, a)]");
}

TEST_F(Fixture, CacheAvoidsRepeatCalls) {
  TranslationCache cache;
  CompileContext c{mt, &cache, &reg, &templates};
  auto cfg = parse_config_code("EEZE", TaskKind::kQA);
  auto a = compile(cfg, de_qa(), {}, "de", c);
  int first = mt.calls;
  auto b = compile(cfg, de_qa(), {}, "de", c);
  EXPECT_EQ(mt.calls, first);
  EXPECT_EQ(a.text, b.text);
}

}  // namespace
}  // namespace selprompt
