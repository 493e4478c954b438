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

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "selprompt/analysis.hpp"
#include "selprompt/config_space.hpp"
#include "selprompt/error.hpp"
#include "selprompt/paths.hpp"
#include "selprompt/text.hpp"

namespace selprompt {

enum class Choice { kSource, kEnglish, kNeutral, kZeroShot };

inline char to_char(Choice c) {
  switch (c) {
    case Choice::kSource: return 'S';
    case Choice::kEnglish: return 'E';
    case Choice::kNeutral: return 'N';
    case Choice::kZeroShot: return 'Z';
  }
  return '?';
}

inline Choice parse_choice(char c) {
  switch (c) {
    case 'S': return Choice::kSource;
    case 'E': return Choice::kEnglish;
    case 'N': return Choice::kNeutral;
    case 'Z': return Choice::kZeroShot;
  }
  throw Error(ErrorCode::kParse, "recommend", std::string("unknown choice letter '") + c + "'");
}

enum class ResourceBucket { kHigh, kLow };

inline std::string_view to_string(ResourceBucket b) {
  return b == ResourceBucket::kHigh ? "high" : "low";
}

inline ResourceBucket parse_bucket(std::string_view s) {
  auto l = text::ascii_lower(s);
  if (l == "high") return ResourceBucket::kHigh;
  if (l == "low") return ResourceBucket::kLow;
  throw Error(ErrorCode::kParse, "recommend", "unknown resource level '" + std::string(s) + "'");
}

/// Classes A and B are high resource; C and D low.
inline ResourceBucket bucket_of(ResourceClass c) {
  return c == ResourceClass::kA || c == ResourceClass::kB ? ResourceBucket::kHigh
                                                          : ResourceBucket::kLow;
}

struct RecommendationRow {
  TaskKind task = TaskKind::kQA;
  ResourceBucket bucket = ResourceBucket::kHigh;
  std::string model_family;
  std::array<Choice, 4> choices{};  // instruction, context, examples, output

  /// "NSSS"; three letters for NLI.
  std::string code() const {
    std::string s;
    for (std::size_t i = 0; i < (task == TaskKind::kNLI ? 3u : 4u); ++i) s += to_char(choices[i]);
    return s;
  }

  void validate() const {
    for (std::size_t i = 0; i < 4; ++i) {
      if (choices[i] == Choice::kZeroShot && i != 2) {
        throw Error(ErrorCode::kSchema, "recommend",
                    "Z is only valid in the examples slot (row " + describe() + ")");
      }
    }
  }

  std::string describe() const {
    return std::string(to_string(task)) + "/" + std::string(to_string(bucket)) + "/" + model_family;
  }
};

class RecommendationTable {
 public:
  void add(RecommendationRow row) {
    row.validate();
    for (const auto& r : rows_) {
      if (r.task == row.task && r.bucket == row.bucket && r.model_family == row.model_family) {
        throw Error(ErrorCode::kSchema, "recommend", "duplicate row " + row.describe());
      }
    }
    rows_.push_back(std::move(row));
  }

  const std::vector<RecommendationRow>& rows() const { return rows_; }

  const RecommendationRow* find(TaskKind task, ResourceBucket bucket,
                                const std::string& family) const {
    for (const auto& r : rows_) {
      if (r.task == task && r.bucket == bucket && r.model_family == family) return &r;
    }
    return nullptr;
  }

  std::vector<std::string> families() const {
    std::vector<std::string> f;
    for (const auto& r : rows_) {
      if (std::find(f.begin(), f.end(), r.model_family) == f.end()) f.push_back(r.model_family);
    }
    return f;
  }

  /// Tab-separated rows: task resource model instruction context examples
  /// output ("-" for NLI output). Lines starting with '#' are comments.
  static RecommendationTable parse(std::istream& in, const std::string& origin) {
    RecommendationTable t;
    std::string line;
    std::size_t lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
      ++lineno;
      if (text::trim(line).empty() || line[0] == '#') continue;
      auto f = text::split_whitespace(line);
      if (header) {
        header = false;
        if (!f.empty() && f[0] == "task") continue;
      }
      auto where = origin + ":" + std::to_string(lineno) + ": ";
      if (f.size() != 7) {
        throw Error(ErrorCode::kSchema, "recommend", where + "expected 7 columns");
      }
      RecommendationRow r;
      try {
        r.task = parse_task(f[0]);
        r.bucket = parse_bucket(f[1]);
        r.model_family = text::ascii_lower(f[2]);
        for (std::size_t i = 0; i < 3; ++i) {
          if (f[3 + i].size() != 1) throw Error(ErrorCode::kSchema, "recommend", "bad choice");
          r.choices[i] = parse_choice(f[3 + i][0]);
        }
        if (r.task == TaskKind::kNLI) {
          if (f[6] != "-") {
            throw Error(ErrorCode::kSchema, "recommend", "NLI rows take '-' for output");
          }
          r.choices[3] = r.choices[0];
        } else {
          if (f[6].size() != 1) throw Error(ErrorCode::kSchema, "recommend", "bad output choice");
          r.choices[3] = parse_choice(f[6][0]);
        }
        t.add(r);
      } catch (const Error& e) {
        throw Error(ErrorCode::kSchema, "recommend", where + e.detail());
      }
    }
    return t;
  }

  static RecommendationTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "recommend", "cannot open rule table '" + path + "'");
    return parse(in, path);
  }

  static RecommendationTable load_default() { return load(data_file("recommendations.tsv").string()); }

 private:
  std::vector<RecommendationRow> rows_;
};

enum class Provenance { kBundledPaperTable, kMinedFromResults };

inline std::string_view to_string(Provenance p) {
  return p == Provenance::kBundledPaperTable ? "bundled-paper-table" : "mined-from-results";
}

struct Recommendation {
  Configuration config;
  Provenance provenance = Provenance::kBundledPaperTable;
  std::vector<std::string> resolved_neutrals;
  RecommendationRow row;
  ResourceClass resource_class = ResourceClass::kA;
  std::string language;
};

/// N resolves to Source, Z to zero-shot.
inline Configuration resolve_row(const RecommendationRow& row,
                                 std::vector<std::string>* neutrals = nullptr) {
  auto lang = [&](std::size_t i) {
    if (row.choices[i] == Choice::kNeutral && neutrals) {
      neutrals->push_back(std::string(to_string(kAllComponents[i])));
    }
    return row.choices[i] == Choice::kEnglish ? ComponentLang::kEnglish : ComponentLang::kSource;
  };
  Configuration c;
  c.task = row.task;
  c.instruction = lang(0);
  c.context = lang(1);
  switch (row.choices[2]) {
    case Choice::kZeroShot: c.examples = ExamplesMode::kNone; break;
    case Choice::kEnglish: c.examples = ExamplesMode::kEnglish; break;
    case Choice::kNeutral:
      if (neutrals) neutrals->push_back("examples");
      c.examples = ExamplesMode::kSource;
      break;
    case Choice::kSource: c.examples = ExamplesMode::kSource; break;
  }
  if (row.task == TaskKind::kNLI) {
    c.output = c.instruction;
  } else {
    c.output = lang(3);
  }
  return c;
}

/// Model identifiers such as "gpt-3.5-turbo" map to the family whose name
/// they start with.
inline std::string model_family_of(const RecommendationTable& table, std::string_view model) {
  auto m = text::ascii_lower(model);
  std::string best;
  for (const auto& f : table.families()) {
    if (m.rfind(f, 0) == 0 && f.size() > best.size()) best = f;
  }
  return best.empty() ? m : best;
}

inline Recommendation recommend(TaskKind task, std::string_view language, std::string_view model,
                                const LanguageRegistry& registry, const RecommendationTable& table,
                                Provenance provenance = Provenance::kBundledPaperTable) {
  const auto& info = registry.at(language);
  auto bucket = bucket_of(info.resource_class);
  auto family = model_family_of(table, model);
  const auto* row = table.find(task, bucket, family);
  if (!row) {
    std::vector<std::string> avail;
    for (const auto& r : table.rows()) {
      if (r.task == task) avail.push_back(r.describe());
    }
    throw Error(ErrorCode::kNotFound, "recommend",
                "no row for " + std::string(to_string(task)) + "/" + std::string(to_string(bucket)) +
                    "/" + family + "; available: " + text::join(avail, ", "));
  }
  Recommendation rec;
  rec.row = *row;
  rec.provenance = provenance;
  rec.resource_class = info.resource_class;
  rec.language = info.code;
  rec.config = resolve_row(*row, &rec.resolved_neutrals);
  return rec;
}

inline nlohmann::json to_json(const Recommendation& r) {
  return {{"config_code", r.config.code()},
          {"resolved_neutrals", r.resolved_neutrals},
          {"provenance", to_string(r.provenance)},
          {"task", to_string(r.row.task)},
          {"language", r.language},
          {"resource_class", std::string(1, to_char(r.resource_class))},
          {"resource_level", to_string(r.row.bucket)},
          {"model_family", r.row.model_family},
          {"row", r.row.code()}};
}

/// Rows read off mined rules: for each bucket, the best rule concluding
/// {score_bin=high} (confidence, then antecedent size, then support) whose
/// class items, if any, fall in that bucket. Components the rule does not
/// mention become N.
inline std::vector<RecommendationRow> derive_rows_from_rules(const std::vector<Rule>& rules,
                                                             TaskKind task,
                                                             const std::string& model_family) {
  std::vector<RecommendationRow> out;
  for (auto bucket : {ResourceBucket::kHigh, ResourceBucket::kLow}) {
    const Rule* best = nullptr;
    for (const auto& r : rules) {
      if (r.consequent != Itemset{"score_bin=high"}) continue;
      bool fits = true;
      for (const auto& it : r.antecedent) {
        if (it.rfind("class=", 0) == 0 && it.size() == 7) {
          fits = fits && bucket_of(parse_resource_class(it.substr(6))) == bucket;
        }
      }
      if (!fits) continue;
      if (!best || std::make_tuple(r.confidence, r.antecedent.size(), r.support) >
                       std::make_tuple(best->confidence, best->antecedent.size(), best->support)) {
        best = &r;
      }
    }
    if (!best) continue;
    RecommendationRow row;
    row.task = task;
    row.bucket = bucket;
    row.model_family = model_family;
    row.choices.fill(Choice::kNeutral);
    for (const auto& it : best->antecedent) {
      auto eq = it.find('=');
      if (eq == std::string::npos || eq + 2 != it.size()) continue;
      auto name = it.substr(0, eq);
      if (name == "class") continue;
      if (name != "instruction" && name != "context" && name != "examples" && name != "output") continue;
      auto comp = parse_component(name);
      row.choices[static_cast<std::size_t>(comp)] = parse_choice(it[eq + 1]);
    }
    if (task == TaskKind::kNLI) row.choices[3] = row.choices[0];
    out.push_back(row);
  }
  return out;
}

}  // namespace selprompt
