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

// Rule-based output normalization. Nothing here throws on model output:
// every input yields a value plus an error class.

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selprompt/biose.hpp"
#include "selprompt/config_space.hpp"
#include "selprompt/corpus.hpp"
#include "selprompt/error.hpp"
#include "selprompt/paths.hpp"
#include "selprompt/text.hpp"

namespace selprompt {

enum class ErrorClass {
  kNone,
  kFormatInconsistency,
  kExtraneousInformation,
  kUnwarrantedRefusal,
  kWrongLanguage,
};

inline std::string_view to_string(ErrorClass e) {
  switch (e) {
    case ErrorClass::kNone: return "none";
    case ErrorClass::kFormatInconsistency: return "format_inconsistency";
    case ErrorClass::kExtraneousInformation: return "extraneous_information";
    case ErrorClass::kUnwarrantedRefusal: return "unwarranted_refusal";
    case ErrorClass::kWrongLanguage: return "wrong_language";
  }
  return "?";
}

inline ErrorClass parse_error_class(std::string_view s) {
  for (auto e : {ErrorClass::kNone, ErrorClass::kFormatInconsistency,
                 ErrorClass::kExtraneousInformation, ErrorClass::kUnwarrantedRefusal,
                 ErrorClass::kWrongLanguage}) {
    if (to_string(e) == s) return e;
  }
  throw Error(ErrorCode::kParse, "postproc", "unknown error class '" + std::string(s) + "'");
}

namespace detail {

// Phrases that mark a declined or deflected answer.
inline constexpr std::array<std::string_view, 16> kRefusalCues = {
    "cannot be answered", "can't be answered", "not provided in the", "cannot answer",
    "unable to",          "i'm sorry",         "i am sorry",          "as an ai",
    "i cannot",           "i can't",           "not possible to",     "i will provide",
    "no answer",          "not mentioned in",  "does not mention",    "i'm not able",
};

inline bool has_refusal_cue(std::string_view raw) {
  auto folded = text::fold_case(raw);
  // Curly apostrophes are common in model output.
  std::string flat;
  for (auto cp : text::decode(folded)) text::append(flat, cp == 0x2019 ? U'\'' : cp);
  for (auto cue : kRefusalCues) {
    if (flat.find(cue) != std::string::npos) return true;
  }
  return false;
}

inline bool has_letters(std::string_view s) {
  for (auto cp : text::decode(s)) {
    if (text::is_letter(cp)) return true;
  }
  return false;
}

// Outer pairs stripped from whole answers: [..] (..) ".." '..' «..» “..” 「..」
inline std::string strip_wrappers(std::string s, bool* stripped = nullptr) {
  static const std::array<std::pair<char32_t, char32_t>, 8> kPairs = {{
      {U'[', U']'}, {U'(', U')'}, {U'"', U'"'}, {U'\'', U'\''},
      {U'«', U'»'}, {U'“', U'”'}, {U'「', U'」'}, {U'`', U'`'},
  }};
  for (;;) {
    auto cps = text::decode(text::trim(s));
    bool changed = false;
    if (cps.size() >= 2) {
      for (auto [open, close] : kPairs) {
        if (cps.front() == open && cps.back() == close) {
          s = text::encode(std::vector<char32_t>(cps.begin() + 1, cps.end() - 1));
          changed = true;
          if (stripped) *stripped = true;
          break;
        }
      }
    }
    if (!changed) return text::trim(s);
  }
}

}  // namespace detail

// ------------------------------------------------------------------ QA

/// Lowercase, drop punctuation, drop English articles (when asked), squeeze
/// whitespace. Idempotent.
inline std::string normalize_qa(std::string_view raw, bool strip_english_articles = true) {
  std::string s = detail::strip_wrappers(std::string(raw));
  std::string no_punct;
  for (auto cp : text::decode(s)) {
    if (text::is_punct(cp)) continue;
    text::append(no_punct, text::fold_case(cp));
  }
  auto words = text::split_whitespace(no_punct);
  if (strip_english_articles) {
    std::erase_if(words, [](const std::string& w) { return w == "a" || w == "an" || w == "the"; });
  }
  return text::join(words, " ");
}

struct QaOutput {
  std::string answer;
  ErrorClass error_class = ErrorClass::kNone;
};

/// normalize_qa plus Table-8-style classification of the raw answer.
inline QaOutput classify_qa(std::string_view raw, bool strip_english_articles = true) {
  QaOutput out;
  auto trimmed = text::trim(raw);
  if (detail::has_refusal_cue(trimmed)) {
    out.error_class = ErrorClass::kUnwarrantedRefusal;
    return out;
  }
  bool wrapped = false;
  detail::strip_wrappers(trimmed, &wrapped);
  if (wrapped && !trimmed.empty() && (trimmed[0] == '[' || trimmed[0] == '(')) {
    out.error_class = ErrorClass::kFormatInconsistency;
  }
  out.answer = normalize_qa(trimmed, strip_english_articles);
  return out;
}

// ----------------------------------------------------------------- NER

struct NerEntity {
  EntityType type = EntityType::kPER;
  std::string surface;

  bool operator==(const NerEntity&) const = default;
};

struct NerParse {
  std::vector<NerEntity> entities;
  ErrorClass error_class = ErrorClass::kNone;
  std::size_t unparsed_items = 0;
};

namespace detail {

inline bool is_quote(char32_t c) {
  return c == U'\'' || c == U'"' || c == U'‘' || c == U'’' || c == U'“' || c == U'”';
}

inline std::string unquote(std::string_view s) {
  auto cps = text::decode(text::trim(s));
  while (cps.size() >= 2 && is_quote(cps.front()) && is_quote(cps.back())) {
    cps = std::vector<char32_t>(cps.begin() + 1, cps.end() - 1);
  }
  return text::trim(text::encode(cps));
}

// Splits at top-level commas, keeping parentheses and quoted runs intact.
// A quote opens only at an item boundary so apostrophes inside words survive.
inline std::vector<std::string> split_items(const std::vector<char32_t>& cps) {
  std::vector<std::string> items;
  std::string cur;
  int depth = 0;
  char32_t quote = 0;
  char32_t last_sig = U',';  // last non-space code point outside quotes
  for (std::size_t i = 0; i < cps.size(); ++i) {
    char32_t c = cps[i];
    if (quote) {
      text::append(cur, c);
      bool closes = c == quote || (quote == U'‘' && c == U'’') || (quote == U'“' && c == U'”');
      if (closes) {
        std::size_t j = i + 1;
        while (j < cps.size() && text::is_space(cps[j])) ++j;
        if (j == cps.size() || cps[j] == U',' || cps[j] == U')' || cps[j] == U':') {
          quote = 0;
          last_sig = c;
        }
      }
      continue;
    }
    if (is_quote(c) && (last_sig == U',' || last_sig == U'(' || last_sig == U':')) {
      quote = c;
      text::append(cur, c);
      continue;
    }
    if (c == U'(') ++depth;
    if (c == U')' && depth > 0) --depth;
    if (c == U',' && depth == 0) {
      items.push_back(text::trim(cur));
      cur.clear();
      last_sig = c;
      continue;
    }
    text::append(cur, c);
    if (!text::is_space(c)) last_sig = c;
  }
  if (!text::trim(cur).empty()) items.push_back(text::trim(cur));
  return items;
}

struct ItemResult {
  std::optional<NerEntity> entity;
  bool canonical = false;
};

// "TAG: entity" or "TAG - entity"
inline std::optional<NerEntity> parse_tag_colon(std::string_view s) {
  for (std::string_view sep : {":", " - "}) {
    auto pos = s.find(sep);
    if (pos == std::string_view::npos) continue;
    auto type = parse_entity_type(unquote(s.substr(0, pos)));
    auto ent = unquote(s.substr(pos + sep.size()));
    if (type && !ent.empty()) return NerEntity{*type, ent};
    // "entity: TAG"
    auto rtype = parse_entity_type(unquote(s.substr(pos + sep.size())));
    auto rent = unquote(s.substr(0, pos));
    if (rtype && !rent.empty()) return NerEntity{*rtype, rent};
  }
  return std::nullopt;
}

inline ItemResult parse_item(const std::string& item) {
  auto cps = text::decode(item);
  if (cps.size() >= 2 && cps.front() == U'(' && cps.back() == U')') {
    auto inner = split_items(std::vector<char32_t>(cps.begin() + 1, cps.end() - 1));
    if (inner.size() == 2) {
      auto a = unquote(inner[0]);
      auto b = unquote(inner[1]);
      if (auto t = parse_entity_type(a); t && !b.empty()) return {NerEntity{*t, b}, true};
      if (auto t = parse_entity_type(b); t && !a.empty()) return {NerEntity{*t, a}, false};
    }
    if (inner.size() == 1) return {parse_tag_colon(unquote(inner[0])), false};
    return {};
  }
  return {parse_tag_colon(unquote(item)), false};
}

struct Segment {
  std::size_t begin = 0;  // index of '['
  std::size_t end = 0;    // index of matching ']'
};

inline std::vector<Segment> top_level_segments(const std::vector<char32_t>& cps) {
  std::vector<Segment> segs;
  int depth = 0;
  std::size_t open = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] == U'[') {
      if (depth == 0) open = i;
      ++depth;
    } else if (cps[i] == U']' && depth > 0) {
      if (--depth == 0) segs.push_back({open, i});
    }
  }
  return segs;
}

}  // namespace detail

/// Tolerant parser for (Tag, Entity) lists. Canonical output is a single
/// bracketed list of tuples; deviations are classified, not rejected.
inline NerParse parse_ner(std::string_view raw) {
  NerParse out;
  auto trimmed = text::trim(raw);
  if (trimmed.empty()) {
    out.error_class = ErrorClass::kFormatInconsistency;
    return out;
  }
  auto cps = text::decode(trimmed);
  auto segs = detail::top_level_segments(cps);

  bool non_canonical = false;
  auto take_items = [&](const std::vector<std::string>& items) {
    for (const auto& item : items) {
      if (item.empty()) continue;
      auto r = detail::parse_item(item);
      if (!r.entity) {
        ++out.unparsed_items;
        non_canonical = true;
        continue;
      }
      if (!r.canonical) non_canonical = true;
      out.entities.push_back(std::move(*r.entity));
    }
  };

  if (segs.empty()) {
    // No list at all: try one entity per line ("PER: X", "- (PER, X)").
    for (const auto& line_raw : [&] {
           std::vector<std::string> lines;
           std::string cur;
           for (char c : trimmed) {
             if (c == '\n') {
               lines.push_back(cur);
               cur.clear();
             } else {
               cur.push_back(c);
             }
           }
           lines.push_back(cur);
           return lines;
         }()) {
      auto line = text::trim(line_raw);
      while (!line.empty() && (line[0] == '-' || line[0] == '*')) line = text::trim(line.substr(1));
      if (line.empty()) continue;
      auto r = detail::parse_item(line);
      if (r.entity) out.entities.push_back(std::move(*r.entity));
    }
    if (out.entities.empty() && detail::has_refusal_cue(trimmed)) {
      out.error_class = ErrorClass::kUnwarrantedRefusal;
    } else {
      out.error_class = ErrorClass::kFormatInconsistency;
    }
    return out;
  }

  // Text outside the bracketed lists.
  std::string outside;
  std::size_t pos = 0;
  for (const auto& seg : segs) {
    for (std::size_t i = pos; i < seg.begin; ++i) text::append(outside, cps[i]);
    outside.push_back(' ');
    take_items(detail::split_items(
        std::vector<char32_t>(cps.begin() + static_cast<long>(seg.begin) + 1,
                              cps.begin() + static_cast<long>(seg.end))));
    pos = seg.end + 1;
  }
  for (std::size_t i = pos; i < cps.size(); ++i) text::append(outside, cps[i]);

  if (detail::has_letters(outside)) {
    out.error_class = ErrorClass::kExtraneousInformation;
  } else if (segs.size() > 1 || non_canonical) {
    out.error_class = ErrorClass::kFormatInconsistency;
  }
  return out;
}

struct Projection {
  std::vector<std::string> labels;
  std::size_t dropped = 0;
};

namespace detail {

inline bool latin_only(std::string_view s) {
  for (auto cp : text::decode(s)) {
    auto sc = text::script_of(cp);
    if (sc != text::Script::kLatin && sc != text::Script::kOther) return false;
  }
  return true;
}

inline bool token_equal(const std::string& a, const std::string& b) {
  if (a == b) return true;
  if (latin_only(a) && latin_only(b)) return text::fold_latin_case(a) == text::fold_latin_case(b);
  return false;
}

}  // namespace detail

/// Places each entity at its first unconsumed match, left to right.
/// Matching is whitespace-normalized, case-insensitive for Latin surfaces.
inline Projection project_biose(const std::vector<std::string>& tokens,
                                const std::vector<NerEntity>& entities) {
  std::vector<bool> used(tokens.size(), false);
  std::vector<EntitySpan> spans;
  std::size_t dropped = 0;
  for (const auto& e : entities) {
    auto parts = text::split_whitespace(e.surface);
    if (parts.empty()) {
      ++dropped;
      continue;
    }
    std::optional<EntitySpan> hit;
    // Token-aligned match.
    for (std::size_t i = 0; !hit && i + parts.size() <= tokens.size(); ++i) {
      bool ok = true;
      for (std::size_t j = 0; ok && j < parts.size(); ++j) {
        ok = !used[i + j] && detail::token_equal(tokens[i + j], parts[j]);
      }
      if (ok) hit = EntitySpan{e.type, i, i + parts.size() - 1};
    }
    // Spacing differs from the tokenization (e.g. "新北市" vs 新 北 市).
    if (!hit) {
      auto target = text::join(parts, "");
      for (std::size_t i = 0; !hit && i < tokens.size(); ++i) {
        std::string acc;
        for (std::size_t j = i; j < tokens.size() && !used[j]; ++j) {
          acc += tokens[j];
          if (acc.size() > target.size() * 4 + 4) break;
          if (detail::token_equal(acc, target)) {
            hit = EntitySpan{e.type, i, j};
            break;
          }
        }
      }
    }
    if (!hit) {
      ++dropped;
      continue;
    }
    for (std::size_t k = hit->start; k <= hit->end; ++k) used[k] = true;
    spans.push_back(*hit);
  }
  return {encode_biose(tokens.size(), spans), dropped};
}

// ----------------------------------------------------------------- NLI

/// Per-language label words mapped to the canonical English labels.
class NliLexicon {
 public:
  NliLexicon() {
    for (auto l : {NliLabel::kEntailment, NliLabel::kContradiction, NliLabel::kNeutral}) {
      add("en", std::string(to_string(l)), l);
    }
  }

  void add(const std::string& lang, const std::string& variant, NliLabel canonical) {
    entries_.push_back({text::ascii_lower(lang), text::fold_case(variant), canonical});
  }

  struct Entry {
    std::string lang;
    std::string folded;
    NliLabel label;
  };
  const std::vector<Entry>& entries() const { return entries_; }

  static NliLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "postproc", "cannot open NLI lexicon '" + path + "'");
    NliLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (text::trim(line).empty() || line[0] == '#') continue;
      auto a = line.find('\t');
      auto b = a == std::string::npos ? a : line.find('\t', a + 1);
      auto label = b == std::string::npos ? std::nullopt
                                          : parse_nli_label(text::trim(line.substr(b + 1)));
      if (!label) {
        throw Error(ErrorCode::kSchema, "postproc",
                    path + ":" + std::to_string(lineno) + ": expected language<TAB>variant<TAB>label");
      }
      lex.add(line.substr(0, a), text::trim(line.substr(a + 1, b - a - 1)), *label);
    }
    return lex;
  }

 private:
  std::vector<Entry> entries_;
};

struct NliOutput {
  std::optional<NliLabel> label;
  ErrorClass error_class = ErrorClass::kNone;
};

/// First recognized label word wins. Non-English label words are mapped but
/// flagged; surrounding prose is flagged as extraneous.
inline NliOutput normalize_nli(std::string_view raw, const NliLexicon& lexicon) {
  NliOutput out;
  auto folded = text::fold_case(text::trim(raw));
  std::size_t best_pos = std::string::npos;
  const NliLexicon::Entry* best = nullptr;
  for (const auto& e : lexicon.entries()) {
    std::size_t from = 0;
    while (true) {
      auto pos = folded.find(e.folded, from);
      if (pos == std::string::npos) break;
      auto first = text::decode(e.folded);
      bool check_bounds = !first.empty() && !text::is_unsegmented(text::script_of(first.front()));
      bool ok = true;
      if (check_bounds) {
        auto before = text::decode(std::string_view(folded).substr(0, pos));
        auto after = text::decode(std::string_view(folded).substr(pos + e.folded.size()));
        if (!before.empty() && text::is_word_char(before.back())) ok = false;
        if (!after.empty() && text::is_word_char(after.front())) ok = false;
      }
      if (ok) {
        bool better = pos < best_pos ||
                      (pos == best_pos && best && e.folded.size() > best->folded.size());
        if (better) {
          best_pos = pos;
          best = &e;
        }
        break;
      }
      from = pos + 1;
    }
  }
  if (!best) {
    out.error_class = ErrorClass::kFormatInconsistency;
    return out;
  }
  out.label = best->label;
  std::string rest;
  for (auto cp : text::decode(folded)) {
    if (!text::is_punct(cp) && !text::is_space(cp)) text::append(rest, cp);
  }
  std::string word;
  for (auto cp : text::decode(best->folded)) {
    if (!text::is_punct(cp) && !text::is_space(cp)) text::append(word, cp);
  }
  bool english = best->lang == "en";
  if (!english) {
    out.error_class = ErrorClass::kWrongLanguage;
  } else if (rest != word) {
    out.error_class = ErrorClass::kExtraneousInformation;
  }
  return out;
}

// ----------------------------------------------------------------- SUM

/// Leading "<prefix>:" labels to strip, longest first.
class SummaryPrefixes {
 public:
  void add(const std::string& prefix) {
    prefixes_.push_back(text::trim(prefix));
    std::stable_sort(prefixes_.begin(), prefixes_.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
  }
  const std::vector<std::string>& all() const { return prefixes_; }

  static SummaryPrefixes load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "postproc", "cannot open prefix lexicon '" + path + "'");
    SummaryPrefixes p;
    std::string line;
    while (std::getline(in, line)) {
      if (text::trim(line).empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      p.add(tab == std::string::npos ? line : line.substr(tab + 1));
    }
    return p;
  }

 private:
  std::vector<std::string> prefixes_;
};

struct SumOutput {
  std::string summary;
  ErrorClass error_class = ErrorClass::kNone;
};

inline SumOutput classify_sum(std::string_view raw, const SummaryPrefixes& prefixes) {
  SumOutput out;
  auto s = text::trim(raw);
  // Markdown emphasis around a label: "**Summary:**".
  std::string_view view = s;
  std::size_t stars = 0;
  while (stars < view.size() && view[stars] == '*') ++stars;
  for (const auto& p : prefixes.all()) {
    auto body = view.substr(stars);
    if (!text::starts_with_folded(body, p)) continue;
    std::size_t p_len = 0;
    for (std::size_t n = text::length(p); n > 0 && p_len < body.size(); --n) {
      ++p_len;
      while (p_len < body.size() && (static_cast<unsigned char>(body[p_len]) & 0xC0) == 0x80) ++p_len;
    }
    auto rest = body.substr(p_len);
    std::size_t i = 0;
    while (i < rest.size() && rest[i] == '*') ++i;
    while (i < rest.size() && rest[i] == ' ') ++i;
    bool colon = false;
    if (rest.compare(i, 1, ":") == 0) {
      colon = true;
      i += 1;
    } else if (rest.compare(i, 3, "：") == 0) {
      colon = true;
      i += 3;
    }
    if (!colon) continue;
    while (i < rest.size() && rest[i] == '*') ++i;
    out.summary = text::trim(rest.substr(i));
    out.error_class = ErrorClass::kExtraneousInformation;
    return out;
  }
  out.summary = s;
  return out;
}

inline std::string normalize_sum(std::string_view raw, const SummaryPrefixes& prefixes) {
  return classify_sum(raw, prefixes).summary;
}

// ------------------------------------------------------ output language

enum class LanguageCheck { kMatch, kMismatch, kIndeterminate };

inline std::string_view to_string(LanguageCheck c) {
  switch (c) {
    case LanguageCheck::kMatch: return "match";
    case LanguageCheck::kMismatch: return "mismatch";
    case LanguageCheck::kIndeterminate: return "indeterminate";
  }
  return "?";
}

class LanguageDetector {
 public:
  virtual ~LanguageDetector() = default;
  virtual LanguageCheck check(std::string_view text, std::string_view expected_lang) const = 0;
};

/// Script names as written in the language registry, mapped to the scripts
/// they may use.
inline std::vector<text::Script> scripts_for(std::string_view script_name) {
  using S = text::Script;
  static const std::map<std::string, std::vector<S>, std::less<>> kMap = {
      {"Latin", {S::kLatin}},         {"Greek", {S::kGreek}},
      {"Cyrillic", {S::kCyrillic}},   {"Armenian", {S::kArmenian}},
      {"Hebrew", {S::kHebrew}},       {"Arabic", {S::kArabic}},
      {"Devanagari", {S::kDevanagari}}, {"Bengali", {S::kBengali}},
      {"Gurmukhi", {S::kGurmukhi}},   {"Gujarati", {S::kGujarati}},
      {"Tamil", {S::kTamil}},         {"Telugu", {S::kTelugu}},
      {"Kannada", {S::kKannada}},     {"Malayalam", {S::kMalayalam}},
      {"Thai", {S::kThai}},           {"Georgian", {S::kGeorgian}},
      {"Ethiopic", {S::kEthiopic}},   {"Hangul", {S::kHangul}},
      {"Han", {S::kHan}},             {"Japanese", {S::kHan, S::kHiragana, S::kKatakana}},
  };
  auto it = kMap.find(script_name);
  if (it == kMap.end()) return {};
  return it->second;
}

/// Default detector: counts letters per script. The expected language's
/// script group must strictly outnumber every other script.
class ScriptDetector final : public LanguageDetector {
 public:
  explicit ScriptDetector(std::shared_ptr<const LanguageRegistry> registry)
      : registry_(std::move(registry)) {}

  LanguageCheck check(std::string_view s, std::string_view expected_lang) const override {
    std::map<text::Script, std::size_t> counts;
    for (auto cp : text::decode(s)) {
      auto sc = text::script_of(cp);
      if (sc != text::Script::kOther) ++counts[sc];
    }
    if (counts.empty()) return LanguageCheck::kIndeterminate;
    auto expected = expected_scripts(expected_lang);
    if (expected.empty()) return LanguageCheck::kIndeterminate;
    std::size_t mine = 0, other = 0;
    for (const auto& [sc, n] : counts) {
      if (std::find(expected.begin(), expected.end(), sc) != expected.end()) {
        mine += n;
      } else {
        other = std::max(other, n);
      }
    }
    return mine > other ? LanguageCheck::kMatch : LanguageCheck::kMismatch;
  }

  std::vector<text::Script> expected_scripts(std::string_view lang) const {
    if (text::ascii_lower(lang) == "en") return {text::Script::kLatin};
    if (registry_) {
      if (const auto* info = registry_->find(lang)) return scripts_for(info->script);
    }
    return {};
  }

 private:
  std::shared_ptr<const LanguageRegistry> registry_;
};

inline LanguageCheck check_output_language(std::string_view s, std::string_view expected_lang,
                                           const LanguageDetector& detector) {
  if (text::trim(s).empty()) return LanguageCheck::kIndeterminate;
  return detector.check(s, expected_lang);
}

// ------------------------------------------------------------ lexicons

struct Lexicons {
  NliLexicon nli;
  SummaryPrefixes summary_prefixes;

  static Lexicons load_default() {
    return {NliLexicon::load(data_file("nli_labels.tsv").string()),
            SummaryPrefixes::load(data_file("summary_prefixes.tsv").string())};
  }
};

}  // namespace selprompt
