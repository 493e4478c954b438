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

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "selprompt/biose.hpp"
#include "selprompt/config_space.hpp"
#include "selprompt/corpus.hpp"
#include "selprompt/error.hpp"
#include "selprompt/paths.hpp"
#include "selprompt/text.hpp"
#include "selprompt/translation.hpp"

namespace selprompt {

/// English task instructions. Source-language instructions are produced by
/// translating these.
inline std::string canonical_instructions(TaskKind task) {
  switch (task) {
    case TaskKind::kQA:
      return "Answer the following <Question> based only on the given <Context>. "
             "Follow these instructions:\n"
             "- Include only words from the given context in your answer.\n"
             "- Keep the answer as short as possible.\n"
             "- Provide the answer in {output_language}.";
    case TaskKind::kNER:
      return "You are an NLP assistant whose purpose is to perform Named Entity "
             "Recognition (NER).\n"
             "You need to assign each entity a tag from the following:\n"
             "1. PER means a person.\n"
             "2. ORG means an organization.\n"
             "3. LOC means a location entity.\n"
             "The output should be a list of tuples in the format:\n"
             "[(Tag, Entity), (Tag, Entity)]\n"
             "for each entity in the sentence. The entities should be in the "
             "{output_language}.";
    case TaskKind::kSUM:
      return "Write a summary of the given <Text>\n"
             "The output should be in {output_language}.\n"
             "The output must be up to 2 sentences maximum.";
    case TaskKind::kNLI:
      return "You are an NLP assistant whose purpose is to solve Natural Language "
             "Inference (NLI) problems.\n"
             "NLI is the task of determining the inference relation between two "
             "texts: entailment, contradiction, or neutral.\n"
             "Your answer should be one word from the following: entailment, "
             "contradiction, or neutral.";
  }
  return {};
}

inline constexpr std::string_view kDefaultLayout = "{instruction}\n\n{examples}\n\n{context}";

struct PromptTemplate {
  TaskKind task = TaskKind::kQA;
  std::string instruction;
  std::string context_block;
  std::string example_block;
  std::string example_separator = "\n\n";
  std::string layout = std::string(kDefaultLayout);

  void validate() const;
};

namespace detail {

inline std::size_t count_slot(std::string_view s, std::string_view slot) {
  std::size_t n = 0;
  for (auto pos = s.find(slot); pos != std::string_view::npos; pos = s.find(slot, pos + 1)) ++n;
  return n;
}

/// Replaces {name} slots in one pass; inserted values are not rescanned and
/// unknown slots stay literal.
inline std::string fill(std::string_view tpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{') {
      auto close = tpl.find('}', i);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tpl[i++]);
  }
  return out;
}

}  // namespace detail

inline void PromptTemplate::validate() const {
  auto slots = detail::count_slot(instruction, "{output_language}");
  if (task == TaskKind::kNLI ? slots != 0 : slots != 1) {
    throw Error(ErrorCode::kSchema, "prompting",
                std::string(to_string(task)) + " instruction must contain " +
                    (task == TaskKind::kNLI ? "no" : "exactly one") +
                    " {output_language} slot");
  }
  auto i = layout.find("{instruction}");
  auto e = layout.find("{examples}");
  auto c = layout.find("{context}");
  if (i == std::string::npos || e == std::string::npos || c == std::string::npos ||
      detail::count_slot(layout, "{instruction}") != 1 ||
      detail::count_slot(layout, "{examples}") != 1 ||
      detail::count_slot(layout, "{context}") != 1 || !(i < e && e < c)) {
    throw Error(ErrorCode::kSchema, "prompting",
                "layout must hold {instruction}, {examples}, {context} once each, in that order");
  }
}

inline PromptTemplate default_template(TaskKind task) {
  PromptTemplate t;
  t.task = task;
  t.instruction = canonical_instructions(task);
  switch (task) {
    case TaskKind::kQA:
      t.context_block = "Context: {context}\nQuestion: {question}";
      t.example_block = "Context: {context}\nQuestion: {question}\nAnswer: {answer}";
      break;
    case TaskKind::kNER:
      t.context_block = "Sentence: {sentence}";
      t.example_block = "Sentence: {sentence}\nEntities: {entities}";
      break;
    case TaskKind::kNLI:
      t.context_block = "Premise: {premise}\nHypothesis: {hypothesis}";
      t.example_block = "Premise: {premise}\nHypothesis: {hypothesis}\nAnswer: {label}";
      break;
    case TaskKind::kSUM:
      t.context_block = "Text: {text}";
      t.example_block = "Text: {text}\nSummary: {summary}";
      break;
  }
  return t;
}

/// Parses a template file: "[section]" headers followed by text. Sections:
/// instruction, context, example, and optionally layout, example_separator.
/// Trailing newlines of a section are dropped; "\n" escapes are honoured in
/// one-line sections.
inline PromptTemplate parse_template(std::string_view body, TaskKind task) {
  PromptTemplate t = default_template(task);
  std::map<std::string, std::string> sections;
  std::string current;
  std::istringstream in{std::string(body)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() > 2 && line.front() == '[' && line.back() == ']' &&
        line.find(' ') == std::string::npos) {
      current = line.substr(1, line.size() - 2);
      sections[current];
      continue;
    }
    if (current.empty()) continue;  // preamble / comments
    sections[current] += line + "\n";
  }
  auto take = [&](const char* name, std::string& dst) {
    auto it = sections.find(name);
    if (it == sections.end()) return;
    auto v = it->second;
    while (!v.empty() && (v.back() == '\n' || v.back() == '\r')) v.pop_back();
    std::string un;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == '\\' && i + 1 < v.size() && v[i + 1] == 'n') {
        un.push_back('\n');
        ++i;
      } else {
        un.push_back(v[i]);
      }
    }
    dst = un;
  };
  take("instruction", t.instruction);
  take("context", t.context_block);
  take("example", t.example_block);
  take("layout", t.layout);
  take("example_separator", t.example_separator);
  t.validate();
  return t;
}

inline PromptTemplate load_template(const std::filesystem::path& path, TaskKind task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "prompting", "cannot open template '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_template(ss.str(), task);
}

/// Templates from <dir>/<task>.tpl, falling back to the built-in defaults.
class TemplateSet {
 public:
  TemplateSet() {
    for (auto t : kAllTasks) by_task_[t] = default_template(t);
  }

  static TemplateSet load(const std::filesystem::path& dir) {
    TemplateSet s;
    for (auto t : kAllTasks) {
      auto p = dir / (std::string(to_string(t)) + ".tpl");
      if (std::filesystem::exists(p)) s.by_task_[t] = load_template(p, t);
    }
    return s;
  }

  static TemplateSet load_default() { return load(data_file("templates")); }

  const PromptTemplate& at(TaskKind t) const { return by_task_.at(t); }
  void set(PromptTemplate t) {
    t.validate();
    by_task_[t.task] = std::move(t);
  }

 private:
  std::map<TaskKind, PromptTemplate> by_task_;
};

struct ComponentSpan {
  std::string component;  // instruction | example | context
  std::size_t begin = 0;  // byte offsets into CompiledPrompt::text
  std::size_t end = 0;

  bool operator==(const ComponentSpan&) const = default;
};

struct CompiledPrompt {
  std::string text;
  Configuration config;
  std::string expected_output_lang;
  std::vector<ComponentSpan> component_spans;

  std::string_view span_text(const ComponentSpan& s) const {
    return std::string_view(text).substr(s.begin, s.end - s.begin);
  }
  /// The instance block; empty when absent.
  std::string_view context_block() const {
    for (const auto& s : component_spans) {
      if (s.component == "context") return span_text(s);
    }
    return {};
  }
  std::size_t example_count() const {
    std::size_t n = 0;
    for (const auto& s : component_spans) n += s.component == "example";
    return n;
  }
};

inline nlohmann::json to_json(const CompiledPrompt& p) {
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& s : p.component_spans) {
    spans.push_back({{"component", s.component}, {"begin", s.begin}, {"end", s.end}});
  }
  return {{"prompt_text", p.text},
          {"expected_output_lang", p.expected_output_lang},
          {"config_code", p.config.code()},
          {"component_spans", spans}};
}

/// "[(PER, John Smith), (LOC, Paris)]" for an annotated sentence.
inline std::string render_entities(const std::vector<std::string>& tokens,
                                   const std::vector<std::string>& tags) {
  std::string out = "[";
  bool first = true;
  for (const auto& s : decode_biose(tags)) {
    std::vector<std::string> words(tokens.begin() + static_cast<long>(s.start),
                                   tokens.begin() + static_cast<long>(s.end) + 1);
    if (!first) out += ", ";
    first = false;
    out += "(" + std::string(to_string(s.type)) + ", " + text::join(words, " ") + ")";
  }
  return out + "]";
}

struct CompileContext {
  TranslationProvider& translator;
  TranslationCache* cache = nullptr;
  const LanguageRegistry* registry = nullptr;  // for language names
  const TemplateSet* templates = nullptr;      // defaults when null
};

namespace detail {

inline std::string language_name(const CompileContext& ctx, const std::string& code) {
  if (text::ascii_lower(code) == "en") return "English";
  return ctx.registry ? ctx.registry->name_of(code) : code;
}

// Slot values for one instance, in `lang` (translated from `source`).
inline std::map<std::string, std::string> instance_fields(const TaskInstance& inst,
                                                          bool with_gold,
                                                          const std::string& source,
                                                          const std::string& lang,
                                                          const CompileContext& ctx) {
  auto tr = [&](const std::string& s) {
    return translate({s, source, lang}, ctx.translator, ctx.cache);
  };
  std::map<std::string, std::string> f;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, QaPayload>) {
          f["context"] = tr(p.context);
          f["question"] = tr(p.question);
          if (with_gold) f["answer"] = p.answers.empty() ? "" : tr(p.answers.front());
        } else if constexpr (std::is_same_v<T, NerPayload>) {
          f["sentence"] = tr(text::join(p.tokens, " "));
          if (with_gold) {
            // Entity surfaces are translated one by one so the list keeps
            // its shape.
            std::string out = "[";
            bool first = true;
            for (const auto& s : decode_biose(p.tags)) {
              std::vector<std::string> words(p.tokens.begin() + static_cast<long>(s.start),
                                             p.tokens.begin() + static_cast<long>(s.end) + 1);
              if (!first) out += ", ";
              first = false;
              out += "(" + std::string(to_string(s.type)) + ", " + tr(text::join(words, " ")) + ")";
            }
            f["entities"] = out + "]";
          }
        } else if constexpr (std::is_same_v<T, NliPayload>) {
          f["premise"] = tr(p.premise);
          f["hypothesis"] = tr(p.hypothesis);
          if (with_gold) f["label"] = std::string(to_string(p.label));  // fixed English words
        } else {
          f["text"] = tr(p.document);
          if (with_gold) f["summary"] = tr(p.reference_summary);
        }
      },
      inst.payload);
  return f;
}

}  // namespace detail

/// Renders `instance` (and demonstrations) under `config`. Instance data is
/// taken to be in `source_lang`; components marked English are translated
/// to English, instruction text is translated from English when marked
/// Source.
inline CompiledPrompt compile(const Configuration& config, const TaskInstance& instance,
                              const std::vector<TaskInstance>& demos,
                              const std::string& source_lang, const CompileContext& ctx) {
  if (instance.task() != config.task) {
    throw Error(ErrorCode::kContract, "prompting",
                "instance task " + std::string(to_string(instance.task())) +
                    " does not match configuration task " + std::string(to_string(config.task)));
  }
  if (config.zero_shot() && !demos.empty()) {
    throw Error(ErrorCode::kContract, "prompting",
                "configuration " + config.code() + " is zero-shot but " +
                    std::to_string(demos.size()) + " demonstrations were given");
  }
  if (!config.zero_shot() && demos.empty()) {
    throw Error(ErrorCode::kContract, "prompting",
                "configuration " + config.code() + " needs at least one demonstration");
  }
  for (const auto& d : demos) {
    if (d.task() != config.task || text::ascii_lower(d.language) != text::ascii_lower(instance.language)) {
      throw Error(ErrorCode::kContract, "prompting",
                  "demonstration '" + d.id + "' does not share the instance's task and language");
    }
  }
  static const TemplateSet kDefaults;
  const auto& tpl = (ctx.templates ? *ctx.templates : kDefaults).at(config.task);

  const std::string en = "en";
  auto lang_of = [&](ComponentLang l) { return l == ComponentLang::kEnglish ? en : source_lang; };

  CompiledPrompt out;
  out.config = config;
  out.expected_output_lang =
      lang_of(config.task == TaskKind::kNLI ? config.instruction : config.output);

  // Instruction: fill the slot in English, then translate as a whole.
  std::string instruction =
      detail::fill(tpl.instruction, {{"output_language",
                                      detail::language_name(ctx, out.expected_output_lang)}});
  instruction = translate({instruction, en, lang_of(config.instruction)}, ctx.translator, ctx.cache);

  std::vector<std::string> example_blocks;
  if (!config.zero_shot()) {
    auto ex_lang = config.examples == ExamplesMode::kEnglish ? en : source_lang;
    for (const auto& d : demos) {
      example_blocks.push_back(
          detail::fill(tpl.example_block, detail::instance_fields(d, true, source_lang, ex_lang, ctx)));
    }
  }
  std::string context = detail::fill(
      tpl.context_block,
      detail::instance_fields(instance, false, source_lang, lang_of(config.context), ctx));

  // Assemble along the layout, dropping the examples slot and the literal
  // that follows it for zero-shot prompts.
  const auto& layout = tpl.layout;
  auto i_pos = layout.find("{instruction}");
  auto e_pos = layout.find("{examples}");
  auto c_pos = layout.find("{context}");
  const std::size_t i_len = 13, e_len = 10, c_len = 9;

  auto& s = out.text;
  s += layout.substr(0, i_pos);
  out.component_spans.push_back({"instruction", s.size(), s.size() + instruction.size()});
  s += instruction;
  s += layout.substr(i_pos + i_len, e_pos - i_pos - i_len);
  if (!example_blocks.empty()) {
    for (std::size_t k = 0; k < example_blocks.size(); ++k) {
      if (k) s += tpl.example_separator;
      out.component_spans.push_back({"example", s.size(), s.size() + example_blocks[k].size()});
      s += example_blocks[k];
    }
    s += layout.substr(e_pos + e_len, c_pos - e_pos - e_len);
  }
  out.component_spans.push_back({"context", s.size(), s.size() + context.size()});
  s += context;
  s += layout.substr(c_pos + c_len);
  return out;
}

}  // namespace selprompt
