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

// Readers for public dataset exports. Each yields TaskInstances in the
// unified line format; nothing is dropped except what the unified schema
// cannot carry (MISC/DATE entity tags become O).

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "selprompt/biose.hpp"
#include "selprompt/config_space.hpp"
#include "selprompt/corpus.hpp"
#include "selprompt/error.hpp"
#include "selprompt/text.hpp"

namespace selprompt {

enum class SourceFormat { kSquad, kConll, kXnliTsv, kXlsumJsonl };

inline std::string_view to_string(SourceFormat f) {
  switch (f) {
    case SourceFormat::kSquad: return "squad";
    case SourceFormat::kConll: return "conll";
    case SourceFormat::kXnliTsv: return "xnli";
    case SourceFormat::kXlsumJsonl: return "xlsum";
  }
  return "?";
}

/// Accepts dataset names as aliases: xquad/indicqa are SQuAD-shaped,
/// wikiann/masakhaner are CoNLL-shaped.
inline SourceFormat parse_source_format(std::string_view s) {
  auto l = text::ascii_lower(s);
  if (l == "squad" || l == "xquad" || l == "indicqa") return SourceFormat::kSquad;
  if (l == "conll" || l == "wikiann" || l == "masakhaner") return SourceFormat::kConll;
  if (l == "xnli" || l == "tsv") return SourceFormat::kXnliTsv;
  if (l == "xlsum" || l == "xl-sum") return SourceFormat::kXlsumJsonl;
  throw Error(ErrorCode::kParse, "convert",
              "unknown source format '" + std::string(s) +
                  "' (expected xquad, indicqa, wikiann, masakhaner, xnli or xlsum)");
}

inline TaskKind task_of(SourceFormat f) {
  switch (f) {
    case SourceFormat::kSquad: return TaskKind::kQA;
    case SourceFormat::kConll: return TaskKind::kNER;
    case SourceFormat::kXnliTsv: return TaskKind::kNLI;
    case SourceFormat::kXlsumJsonl: return TaskKind::kSUM;
  }
  return TaskKind::kQA;
}

/// {"data": [{"paragraphs": [{"context", "qas": [{"id", "question",
/// "answers": [{"text"}]}]}]}]}. Questions without answers are skipped.
inline std::vector<TaskInstance> convert_squad(std::istream& in, const std::string& language) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, "convert", std::string("squad: ") + e.what());
  }
  std::vector<TaskInstance> out;
  try {
    for (const auto& article : j.at("data")) {
      for (const auto& para : article.at("paragraphs")) {
        const auto context = para.at("context").get<std::string>();
        for (const auto& qa : para.at("qas")) {
          QaPayload p;
          p.context = context;
          p.question = qa.at("question").get<std::string>();
          for (const auto& a : qa.value("answers", nlohmann::json::array())) {
            auto t = a.at("text").get<std::string>();
            if (std::find(p.answers.begin(), p.answers.end(), t) == p.answers.end()) {
              p.answers.push_back(t);
            }
          }
          if (p.answers.empty()) continue;
          const auto& id = qa.at("id");
          out.push_back({id.is_string() ? id.get<std::string>() : id.dump(), language, std::move(p)});
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, "convert", std::string("squad: ") + e.what());
  }
  return out;
}

/// One token per line, tag in the last column, blank lines between
/// sentences. WikiANN's "xx:token" prefix is removed; "-DOCSTART-" lines are
/// ignored. Tags are read as BIO and rewritten as BIOSE.
inline std::vector<TaskInstance> convert_conll(std::istream& in, const std::string& language,
                                               const std::string& id_prefix = "") {
  std::vector<TaskInstance> out;
  NerPayload cur;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (cur.tokens.empty()) return;
    cur.tags = bio_to_biose(cur.tags);
    out.push_back({id_prefix + std::to_string(out.size()), language, std::move(cur)});
    cur = {};
  };
  const std::string lang_prefix = language + ":";
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) {
      flush();
      continue;
    }
    auto f = text::split_whitespace(line);
    if (f[0] == "-DOCSTART-") continue;
    if (f.size() < 2) {
      throw Error(ErrorCode::kParse, "convert",
                  "conll line " + std::to_string(lineno) + ": expected token and tag");
    }
    auto token = f.front();
    if (token.rfind(lang_prefix, 0) == 0 && token.size() > lang_prefix.size()) {
      token = token.substr(lang_prefix.size());
    }
    cur.tokens.push_back(token);
    cur.tags.push_back(f.back());
  }
  flush();
  return out;
}

/// XNLI's tab-separated export with a header row. Needs the columns
/// language, gold_label, sentence1, sentence2; pairID is used as id when
/// present. Rows for other languages are skipped.
inline std::vector<TaskInstance> convert_xnli(std::istream& in, const std::string& language) {
  std::string line;
  if (!std::getline(in, line)) return {};
  auto split_tabs = [](const std::string& s) {
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, '\t')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      f.push_back(cell);
    }
    return f;
  };
  auto header = split_tabs(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* need : {"language", "gold_label", "sentence1", "sentence2"}) {
    if (!col.count(need)) {
      throw Error(ErrorCode::kSchema, "convert", std::string("xnli: missing column '") + need + "'");
    }
  }
  std::vector<TaskInstance> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto f = split_tabs(line);
    if (f.size() < header.size()) {
      throw Error(ErrorCode::kSchema, "convert", "xnli line " + std::to_string(lineno) + ": short row");
    }
    if (f[col["language"]] != language) continue;
    auto label = parse_nli_label(f[col["gold_label"]]);
    if (!label) {
      throw Error(ErrorCode::kSchema, "convert",
                  "xnli line " + std::to_string(lineno) + ": unknown label '" + f[col["gold_label"]] + "'");
    }
    std::string id = col.count("pairID") ? f[col["pairID"]] : std::to_string(out.size());
    out.push_back({id, language, NliPayload{f[col["sentence1"]], f[col["sentence2"]], *label}});
  }
  return out;
}

/// XL-Sum JSON lines: {"id", "text", "summary", ...}.
inline std::vector<TaskInstance> convert_xlsum(std::istream& in, const std::string& language) {
  std::vector<TaskInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      const auto& id = j.at("id");
      out.push_back({id.is_string() ? id.get<std::string>() : id.dump(), language,
                     SumPayload{j.at("text").get<std::string>(), j.at("summary").get<std::string>()}});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchema, "convert", "xlsum line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<TaskInstance> convert(std::istream& in, SourceFormat format,
                                         const std::string& language) {
  switch (format) {
    case SourceFormat::kSquad: return convert_squad(in, language);
    case SourceFormat::kConll: return convert_conll(in, language);
    case SourceFormat::kXnliTsv: return convert_xnli(in, language);
    case SourceFormat::kXlsumJsonl: return convert_xlsum(in, language);
  }
  return {};
}

inline std::vector<TaskInstance> convert_file(const std::string& path, SourceFormat format,
                                              const std::string& language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "convert", "cannot open '" + path + "'");
  auto out = convert(in, format, language);
  // Round-trip through the schema validator so converted files always load.
  for (std::size_t i = 0; i < out.size(); ++i) parse_instance(to_json(out[i]), task_of(format), i);
  return out;
}

}  // namespace selprompt
