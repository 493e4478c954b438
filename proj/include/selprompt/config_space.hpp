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

// Languages, resource classes and the space of selective pre-translation
// configurations <instruction, context, examples, output>.

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "selprompt/error.hpp"
#include "selprompt/text.hpp"

namespace selprompt {

enum class TaskKind { kQA, kNER, kNLI, kSUM };

inline constexpr std::array<TaskKind, 4> kAllTasks = {
    TaskKind::kQA, TaskKind::kNER, TaskKind::kNLI, TaskKind::kSUM};

inline std::string_view to_string(TaskKind t) {
  switch (t) {
    case TaskKind::kQA: return "qa";
    case TaskKind::kNER: return "ner";
    case TaskKind::kNLI: return "nli";
    case TaskKind::kSUM: return "sum";
  }
  return "?";
}

inline TaskKind parse_task(std::string_view s) {
  auto l = text::ascii_lower(s);
  if (l == "qa") return TaskKind::kQA;
  if (l == "ner") return TaskKind::kNER;
  if (l == "nli") return TaskKind::kNLI;
  if (l == "sum" || l == "summarization") return TaskKind::kSUM;
  throw Error(ErrorCode::kParse, "config-space",
              "unknown task '" + std::string(s) + "' (expected qa, ner, nli, sum)");
}

// Declaration order is the canonical order: S < E < Z.
enum class ComponentLang { kSource, kEnglish };
enum class ExamplesMode { kSource, kEnglish, kNone };

inline char to_char(ComponentLang l) {
  return l == ComponentLang::kSource ? 'S' : 'E';
}

inline char to_char(ExamplesMode m) {
  switch (m) {
    case ExamplesMode::kSource: return 'S';
    case ExamplesMode::kEnglish: return 'E';
    case ExamplesMode::kNone: return 'Z';
  }
  return '?';
}

enum class Component { kInstruction, kContext, kExamples, kOutput };

inline constexpr std::array<Component, 4> kAllComponents = {
    Component::kInstruction, Component::kContext, Component::kExamples,
    Component::kOutput};

inline std::string_view to_string(Component c) {
  switch (c) {
    case Component::kInstruction: return "instruction";
    case Component::kContext: return "context";
    case Component::kExamples: return "examples";
    case Component::kOutput: return "output";
  }
  return "?";
}

inline Component parse_component(std::string_view s) {
  auto l = text::ascii_lower(s);
  for (auto c : kAllComponents) {
    if (to_string(c) == l) return c;
  }
  throw Error(ErrorCode::kParse, "config-space",
              "unknown component '" + std::string(s) + "'");
}

/// One selective pre-translation configuration. For NLI the output language
/// is bound to the instruction language; the factory functions enforce it.
struct Configuration {
  TaskKind task = TaskKind::kQA;
  ComponentLang instruction = ComponentLang::kSource;
  ComponentLang context = ComponentLang::kSource;
  ExamplesMode examples = ExamplesMode::kNone;
  ComponentLang output = ComponentLang::kSource;

  bool zero_shot() const { return examples == ExamplesMode::kNone; }

  /// Four-letter code over {S, E, Z} in instruction, context, examples,
  /// output order.
  std::string code() const {
    return {to_char(instruction), to_char(context), to_char(examples),
            to_char(output)};
  }

  auto operator<=>(const Configuration&) const = default;
  bool operator==(const Configuration&) const = default;
};

inline Configuration make_configuration(TaskKind task, ComponentLang instruction,
                                        ComponentLang context,
                                        ExamplesMode examples,
                                        ComponentLang output) {
  if (task == TaskKind::kNLI && output != instruction) {
    throw Error(ErrorCode::kContract, "config-space",
                "NLI output language must equal the instruction language");
  }
  return Configuration{task, instruction, context, examples, output};
}

enum class ShotFilter { kAll, kZeroShot, kFewShot };

/// All valid configurations of `task` in canonical order (lexicographic over
/// instruction, context, examples, output with S < E < Z).
inline std::vector<Configuration> enumerate_configurations(
    TaskKind task, ShotFilter filter = ShotFilter::kAll) {
  std::vector<Configuration> out;
  constexpr std::array<ComponentLang, 2> langs = {ComponentLang::kSource,
                                                  ComponentLang::kEnglish};
  constexpr std::array<ExamplesMode, 3> modes = {
      ExamplesMode::kSource, ExamplesMode::kEnglish, ExamplesMode::kNone};
  for (auto i : langs) {
    for (auto x : langs) {
      for (auto e : modes) {
        if (filter == ShotFilter::kZeroShot && e != ExamplesMode::kNone) continue;
        if (filter == ShotFilter::kFewShot && e == ExamplesMode::kNone) continue;
        if (task == TaskKind::kNLI) {
          out.push_back(Configuration{task, i, x, e, i});
          continue;
        }
        for (auto o : langs) out.push_back(Configuration{task, i, x, e, o});
      }
    }
  }
  return out;
}

/// Decodes a configuration code such as "SSZE". NLI also accepts the
/// three-letter form (output implied by the instruction).
inline Configuration parse_config_code(std::string_view code, TaskKind task) {
  static constexpr std::array<std::string_view, 4> kSlots = {
      "instruction", "context", "examples", "output"};
  const bool nli = task == TaskKind::kNLI;
  if (code.size() != 4 && !(nli && code.size() == 3)) {
    throw Error(ErrorCode::kParse, "config-space",
                "config code '" + std::string(code) + "' must have 4 letters" +
                    (nli ? " (or 3 for NLI)" : ""));
  }
  auto lang_at = [&](std::size_t i) {
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(code[i])));
    if (c == 'S') return ComponentLang::kSource;
    if (c == 'E') return ComponentLang::kEnglish;
    throw Error(ErrorCode::kParse, "config-space",
                "config code '" + std::string(code) + "': invalid letter '" +
                    std::string(1, code[i]) + "' in " + std::string(kSlots[i]) +
                    " slot (expected S or E)");
  };
  Configuration c;
  c.task = task;
  c.instruction = lang_at(0);
  c.context = lang_at(1);
  char e = static_cast<char>(std::toupper(static_cast<unsigned char>(code[2])));
  if (e == 'S') {
    c.examples = ExamplesMode::kSource;
  } else if (e == 'E') {
    c.examples = ExamplesMode::kEnglish;
  } else if (e == 'Z') {
    c.examples = ExamplesMode::kNone;
  } else {
    throw Error(ErrorCode::kParse, "config-space",
                "config code '" + std::string(code) + "': invalid letter '" +
                    std::string(1, code[2]) +
                    "' in examples slot (expected S, E or Z)");
  }
  if (code.size() == 3) {
    c.output = c.instruction;
  } else {
    c.output = lang_at(3);
    if (nli && c.output != c.instruction) {
      throw Error(ErrorCode::kParse, "config-space",
                  "config code '" + std::string(code) +
                      "': NLI output slot must equal the instruction slot");
    }
  }
  return c;
}

inline std::vector<Configuration> parse_config_list(std::string_view csv,
                                                    TaskKind task) {
  if (text::ascii_lower(csv) == "all") return enumerate_configurations(task);
  std::vector<Configuration> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    auto item = text::trim(csv.substr(start, end - start));
    if (!item.empty()) out.push_back(parse_config_code(item, task));
    start = end + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Languages

enum class ResourceClass { kA, kB, kC, kD };

inline char to_char(ResourceClass c) {
  return static_cast<char>('A' + static_cast<int>(c));
}

inline ResourceClass parse_resource_class(std::string_view s) {
  if (s.size() == 1) {
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    if (c >= 'A' && c <= 'D') return static_cast<ResourceClass>(c - 'A');
  }
  throw Error(ErrorCode::kParse, "config-space",
              "invalid resource class '" + std::string(s) + "' (expected A-D)");
}

/// Resource class from the percentage of pre-training tokens (percent units):
/// A for p >= 0.1, B for 0.01 < p < 0.1, C for 0 < p <= 0.01, D for p = 0.
inline ResourceClass classify_language(double token_share_percent) {
  if (!(token_share_percent >= 0.0)) {
    throw Error(ErrorCode::kDomain, "config-space",
                "token share must be a non-negative percentage");
  }
  if (token_share_percent >= 0.1) return ResourceClass::kA;
  if (token_share_percent > 0.01) return ResourceClass::kB;
  if (token_share_percent > 0.0) return ResourceClass::kC;
  return ResourceClass::kD;
}

struct LanguageInfo {
  std::string code;
  std::string name;
  std::string script;
  std::optional<double> token_share;  // percent; absent for user additions
  ResourceClass resource_class = ResourceClass::kD;
};

inline nlohmann::json to_json(const LanguageInfo& l) {
  nlohmann::json j{{"code", l.code},
                   {"name", l.name},
                   {"script", l.script},
                   {"class", std::string(1, to_char(l.resource_class))}};
  j["token_share_percent"] =
      l.token_share ? nlohmann::json(*l.token_share) : nlohmann::json(nullptr);
  return j;
}

/// Code-indexed language table, loaded from a line-delimited JSON file with
/// one {code, name, script, token_share_percent, class} record per line.
class LanguageRegistry {
 public:
  LanguageRegistry() = default;

  void add(LanguageInfo info) {
    if (info.token_share) {
      auto derived = classify_language(*info.token_share);
      if (derived != info.resource_class) {
        throw Error(ErrorCode::kSchema, "config-space",
                    "language '" + info.code + "': class " +
                        std::string(1, to_char(info.resource_class)) +
                        " contradicts token share (expected " +
                        std::string(1, to_char(derived)) + ")");
      }
    }
    auto key = text::ascii_lower(info.code);
    if (!by_code_.count(key)) order_.push_back(key);
    by_code_[key] = std::move(info);
  }

  const LanguageInfo* find(std::string_view code) const {
    auto it = by_code_.find(text::ascii_lower(code));
    return it == by_code_.end() ? nullptr : &it->second;
  }

  const LanguageInfo& at(std::string_view code) const {
    if (const auto* l = find(code)) return *l;
    throw Error(ErrorCode::kNotFound, "config-space",
                "unknown language '" + std::string(code) +
                    "'; add it to the registry with an explicit class");
  }

  std::vector<LanguageInfo> all() const {
    std::vector<LanguageInfo> out;
    for (const auto& k : order_) out.push_back(by_code_.at(k));
    return out;
  }

  std::size_t size() const { return by_code_.size(); }

  /// English name of a language, "English" for en, the code itself when the
  /// language is unknown.
  std::string name_of(std::string_view code) const {
    if (text::ascii_lower(code) == "en") return "English";
    const auto* l = find(code);
    return l ? l->name : std::string(code);
  }

  static LanguageInfo parse_record(const nlohmann::json& j) {
    LanguageInfo info;
    info.code = j.at("code").get<std::string>();
    info.name = j.value("name", info.code);
    info.script = j.value("script", "");
    if (j.contains("token_share_percent") && !j["token_share_percent"].is_null()) {
      info.token_share = j["token_share_percent"].get<double>();
    }
    if (j.contains("class") && !j["class"].is_null()) {
      info.resource_class = parse_resource_class(j["class"].get<std::string>());
    } else if (info.token_share) {
      info.resource_class = classify_language(*info.token_share);
    } else {
      throw Error(ErrorCode::kSchema, "config-space",
                  "language '" + info.code +
                      "' has neither a token share nor an explicit class");
    }
    return info;
  }

  static LanguageRegistry load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw Error(ErrorCode::kIo, "config-space",
                  "cannot open language registry '" + path + "'");
    }
    LanguageRegistry reg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (text::trim(line).empty()) continue;
      try {
        reg.add(parse_record(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kSchema, "config-space",
                    path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    return reg;
  }

 private:
  std::map<std::string, LanguageInfo> by_code_;
  std::vector<std::string> order_;
};

}  // namespace selprompt
