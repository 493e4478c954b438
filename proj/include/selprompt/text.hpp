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

// Minimal UTF-8 handling: decoding, case folding for the alphabetic scripts
// that have case, punctuation tests and script classification. Only what the
// normalizers and tokenizers need; this is not a general Unicode library.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace selprompt::text {

using CodePoint = char32_t;

inline std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    CodePoint cp = 0xFFFD;
    std::size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
      cp = ((c & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
      len = 2;
    } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
      cp = ((c & 0x0F) << 12) |
           ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
           (static_cast<unsigned char>(s[i + 2]) & 0x3F);
      len = 3;
    } else if ((c >> 3) == 0x1E && i + 3 < s.size()) {
      cp = ((c & 0x07) << 18) |
           ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
           ((static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
           (static_cast<unsigned char>(s[i + 3]) & 0x3F);
      len = 4;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append(std::string& out, CodePoint cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode(const std::vector<CodePoint>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (CodePoint cp : cps) append(out, cp);
  return out;
}

inline std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

inline bool is_space(CodePoint cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0x00A0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

inline bool is_punct(CodePoint cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  return (cp >= 0x00A1 && cp <= 0x00BF && cp != 0x00AA && cp != 0x00B2 &&
          cp != 0x00B3 && cp != 0x00B5 && cp != 0x00B9 && cp != 0x00BA &&
          cp != 0x00BC && cp != 0x00BD && cp != 0x00BE) ||
         cp == 0x00D7 || cp == 0x00F7 || cp == 0x037E || cp == 0x0387 ||
         (cp >= 0x055A && cp <= 0x055F) || cp == 0x0589 ||
         cp == 0x060C || cp == 0x061B || cp == 0x061F || cp == 0x06D4 ||
         cp == 0x0964 || cp == 0x0965 || cp == 0x0E2F || cp == 0x0E5A ||
         cp == 0x0E5B || (cp >= 0x2010 && cp <= 0x2027) ||
         (cp >= 0x2030 && cp <= 0x205E) || (cp >= 0x3001 && cp <= 0x3003) ||
         (cp >= 0x3008 && cp <= 0x3011) || (cp >= 0x3014 && cp <= 0x301F) ||
         cp == 0x30FB || (cp >= 0xFE10 && cp <= 0xFE19) ||
         (cp >= 0xFE30 && cp <= 0xFE4F) || (cp >= 0xFF01 && cp <= 0xFF0F) ||
         (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
         (cp >= 0xFF5B && cp <= 0xFF65);
}

enum class Script {
  kOther,
  kLatin,
  kGreek,
  kCyrillic,
  kArmenian,
  kHebrew,
  kArabic,
  kDevanagari,
  kBengali,
  kGurmukhi,
  kGujarati,
  kTamil,
  kTelugu,
  kKannada,
  kMalayalam,
  kThai,
  kGeorgian,
  kEthiopic,
  kHangul,
  kHiragana,
  kKatakana,
  kHan,
};

inline Script script_of(CodePoint cp) {
  if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z') ||
      (cp >= 0x00C0 && cp <= 0x024F && cp != 0x00D7 && cp != 0x00F7) ||
      (cp >= 0x1E00 && cp <= 0x1EFF) || cp == 0x0254 || cp == 0x025B ||
      cp == 0x0186 || cp == 0x0190 || cp == 0x0263 || cp == 0x0194 ||
      cp == 0x014B || cp == 0x014A) {
    return Script::kLatin;
  }
  if (cp >= 0x0370 && cp <= 0x03FF && cp != 0x037E && cp != 0x0387)
    return Script::kGreek;
  if (cp >= 0x1F00 && cp <= 0x1FFF) return Script::kGreek;
  if (cp >= 0x0400 && cp <= 0x052F) return Script::kCyrillic;
  if (cp >= 0x0531 && cp <= 0x0587) return Script::kArmenian;
  if (cp >= 0x05D0 && cp <= 0x05EA) return Script::kHebrew;
  if ((cp >= 0x0620 && cp <= 0x064A) || (cp >= 0x066E && cp <= 0x06D3) ||
      (cp >= 0x06FA && cp <= 0x06FF) || (cp >= 0xFB50 && cp <= 0xFDFF) ||
      (cp >= 0xFE70 && cp <= 0xFEFF))
    return Script::kArabic;
  if (cp >= 0x0900 && cp <= 0x097F && cp != 0x0964 && cp != 0x0965)
    return Script::kDevanagari;
  if (cp >= 0x0980 && cp <= 0x09FF) return Script::kBengali;
  if (cp >= 0x0A00 && cp <= 0x0A7F) return Script::kGurmukhi;
  if (cp >= 0x0A80 && cp <= 0x0AFF) return Script::kGujarati;
  if (cp >= 0x0B80 && cp <= 0x0BFF) return Script::kTamil;
  if (cp >= 0x0C00 && cp <= 0x0C7F) return Script::kTelugu;
  if (cp >= 0x0C80 && cp <= 0x0CFF) return Script::kKannada;
  if (cp >= 0x0D00 && cp <= 0x0D7F) return Script::kMalayalam;
  if (cp >= 0x0E01 && cp <= 0x0E5B && cp != 0x0E2F && cp != 0x0E5A &&
      cp != 0x0E5B)
    return Script::kThai;
  if (cp >= 0x10A0 && cp <= 0x10FF) return Script::kGeorgian;
  if (cp >= 0x1200 && cp <= 0x137F) return Script::kEthiopic;
  if ((cp >= 0x1100 && cp <= 0x11FF) || (cp >= 0x3130 && cp <= 0x318F) ||
      (cp >= 0xAC00 && cp <= 0xD7AF))
    return Script::kHangul;
  if (cp >= 0x3041 && cp <= 0x309F) return Script::kHiragana;
  if ((cp >= 0x30A0 && cp <= 0x30FF && cp != 0x30FB) ||
      (cp >= 0x31F0 && cp <= 0x31FF))
    return Script::kKatakana;
  if ((cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
      (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2FFFF))
    return Script::kHan;
  return Script::kOther;
}

/// Scripts written without spaces between words.
inline bool is_unsegmented(Script s) {
  return s == Script::kHan || s == Script::kHiragana ||
         s == Script::kKatakana || s == Script::kThai;
}

inline bool is_letter(CodePoint cp) { return script_of(cp) != Script::kOther; }

inline bool is_word_char(CodePoint cp) {
  return (cp >= '0' && cp <= '9') || is_letter(cp) ||
         (cp >= 0x0660 && cp <= 0x0669);
}

inline CodePoint fold_case(CodePoint cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
  if (cp >= 0x0100 && cp <= 0x017F && cp != 0x0130 && cp != 0x0131 &&
      cp != 0x0138 && cp != 0x0149 && cp != 0x017F) {
    // Latin Extended-A alternates upper/lower pairs; the parity flips at
    // U+0139..U+0148 and U+0179..U+017E.
    bool odd_upper = (cp >= 0x0139 && cp <= 0x0148) ||
                     (cp >= 0x0179 && cp <= 0x017E);
    bool is_upper = odd_upper ? (cp % 2 == 1) : (cp % 2 == 0);
    if (cp == 0x0178) return 0x00FF;
    return is_upper ? cp + 1 : cp;
  }
  if (cp == 0x0130) return 'i';
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 32;
  if (cp >= 0x0388 && cp <= 0x038A) return cp + 37;
  if (cp == 0x0386) return 0x03AC;
  if (cp == 0x038C) return 0x03CC;
  if (cp == 0x038E || cp == 0x038F) return cp + 63;
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 32;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 80;
  return cp;
}

inline std::string fold_case(std::string_view s) {
  auto cps = decode(s);
  for (auto& cp : cps) cp = fold_case(cp);
  return encode(cps);
}

/// Case-folds only Latin letters; other scripts are left untouched.
inline std::string fold_latin_case(std::string_view s) {
  auto cps = decode(s);
  for (auto& cp : cps) {
    if (script_of(cp) == Script::kLatin) cp = fold_case(cp);
  }
  return encode(cps);
}

inline std::string trim(std::string_view s) {
  auto cps = decode(s);
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && is_space(cps[b])) ++b;
  while (e > b && is_space(cps[e - 1])) --e;
  return encode(std::vector<CodePoint>(cps.begin() + b, cps.begin() + e));
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (CodePoint cp : decode(s)) {
    if (is_space(cp)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      append(cur, cp);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::string join(const std::vector<std::string>& parts,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string collapse_whitespace(std::string_view s) {
  return join(split_whitespace(s), " ");
}

inline bool starts_with_folded(std::string_view text, std::string_view prefix) {
  auto t = fold_case(text);
  auto p = fold_case(prefix);
  return t.size() >= p.size() && t.compare(0, p.size(), p) == 0;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c);
  });
  return out;
}

inline std::string ascii_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'a' && c <= 'z' ? c - 32 : c);
  });
  return out;
}

}  // namespace selprompt::text
