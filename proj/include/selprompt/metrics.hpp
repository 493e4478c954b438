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

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "selprompt/biose.hpp"
#include "selprompt/error.hpp"
#include "selprompt/text.hpp"

namespace selprompt {

enum class Metric { kTokenF1, kEntityF1, kAccuracy, kRouge1, kRouge2, kRougeL, kBleu, kChrF };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kTokenF1: return "token_f1";
    case Metric::kEntityF1: return "entity_f1";
    case Metric::kAccuracy: return "accuracy";
    case Metric::kRouge1: return "rouge1";
    case Metric::kRouge2: return "rouge2";
    case Metric::kRougeL: return "rougeL";
    case Metric::kBleu: return "bleu";
    case Metric::kChrF: return "chrf";
  }
  return "?";
}

struct Score {
  double value = 0.0;  // in [0, 1]
  Metric metric = Metric::kTokenF1;
};

// ---------------------------------------------------------------- tokens

enum class TokenizerPolicy {
  kMixed,       // whitespace words; Han/Kana/Thai runs split per character
  kWhitespace,  // whitespace only
  kCharacter,   // every non-space code point is a token
};

inline TokenizerPolicy parse_tokenizer_policy(std::string_view s) {
  if (s == "mixed" || s == "default") return TokenizerPolicy::kMixed;
  if (s == "whitespace") return TokenizerPolicy::kWhitespace;
  if (s == "char" || s == "character") return TokenizerPolicy::kCharacter;
  throw Error(ErrorCode::kParse, "metrics", "unknown tokenizer policy '" + std::string(s) + "'");
}

struct Tokenizer {
  TokenizerPolicy policy = TokenizerPolicy::kMixed;
  bool fold_case = false;
  bool drop_punct = false;

  std::vector<std::string> operator()(std::string_view s) const {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    };
    for (auto cp : text::decode(s)) {
      if (text::is_space(cp)) {
        flush();
        continue;
      }
      if (drop_punct && text::is_punct(cp)) {
        flush();
        continue;
      }
      if (fold_case) cp = text::fold_case(cp);
      bool single = policy == TokenizerPolicy::kCharacter ||
                    (policy == TokenizerPolicy::kMixed &&
                     text::is_unsegmented(text::script_of(cp)));
      if (single) {
        flush();
        text::append(cur, cp);
        flush();
      } else {
        text::append(cur, cp);
      }
    }
    flush();
    return out;
  }
};

/// Per-language tokenizer overrides, read from "<lang> <policy>" lines.
class TokenizerTable {
 public:
  void set(const std::string& lang, TokenizerPolicy p) { by_lang_[text::ascii_lower(lang)] = p; }

  Tokenizer for_language(std::string_view lang, bool fold_case = false,
                         bool drop_punct = false) const {
    Tokenizer t;
    auto it = by_lang_.find(text::ascii_lower(lang));
    if (it != by_lang_.end()) t.policy = it->second;
    t.fold_case = fold_case;
    t.drop_punct = drop_punct;
    return t;
  }

  static TokenizerTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "metrics", "cannot open tokenizer table '" + path + "'");
    TokenizerTable t;
    std::string line;
    while (std::getline(in, line)) {
      auto parts = text::split_whitespace(line);
      if (parts.empty() || parts[0][0] == '#') continue;
      if (parts.size() != 2) {
        throw Error(ErrorCode::kSchema, "metrics", "bad tokenizer line: " + line);
      }
      t.set(parts[0], parse_tokenizer_policy(parts[1]));
    }
    return t;
  }

 private:
  std::map<std::string, TokenizerPolicy> by_lang_;
};

namespace detail {

using Counts = std::map<std::string, std::size_t>;

inline Counts ngram_counts(const std::vector<std::string>& toks, std::size_t n) {
  Counts c;
  if (n == 0 || toks.size() < n) return c;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j) {
      if (j) key.push_back('\x1f');
      key += toks[i + j];
    }
    ++c[key];
  }
  return c;
}

inline std::size_t overlap(const Counts& a, const Counts& b) {
  std::size_t m = 0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it != b.end()) m += std::min(v, it->second);
  }
  return m;
}

inline std::size_t total(const Counts& c) {
  std::size_t t = 0;
  for (const auto& [k, v] : c) t += v;
  return t;
}

inline double f1_from_counts(std::size_t match, std::size_t pred, std::size_t gold) {
  if (pred == 0 && gold == 0) return 1.0;
  if (match == 0) return 0.0;
  double p = static_cast<double>(match) / static_cast<double>(pred);
  double r = static_cast<double>(match) / static_cast<double>(gold);
  return 2.0 * p * r / (p + r);
}

}  // namespace detail

// ------------------------------------------------------------------ QA

/// Bag-of-tokens F1 against the best-matching gold answer.
inline Score token_f1(std::string_view pred, const std::vector<std::string>& golds,
                      const Tokenizer& tok = {TokenizerPolicy::kWhitespace}) {
  auto p = detail::ngram_counts(tok(pred), 1);
  double best = 0.0;
  if (golds.empty()) best = detail::total(p) == 0 ? 1.0 : 0.0;
  for (const auto& g : golds) {
    auto gc = detail::ngram_counts(tok(g), 1);
    best = std::max(best, detail::f1_from_counts(detail::overlap(p, gc), detail::total(p),
                                                 detail::total(gc)));
  }
  return {best, Metric::kTokenF1};
}

// ----------------------------------------------------------------- NER

inline Score entity_f1(const std::vector<std::string>& pred_labels,
                       const std::vector<std::string>& gold_labels) {
  if (pred_labels.size() != gold_labels.size()) {
    throw Error(ErrorCode::kContract, "metrics",
                "label sequences differ in length (" + std::to_string(pred_labels.size()) +
                    " vs " + std::to_string(gold_labels.size()) + ")");
  }
  auto p = decode_biose(pred_labels);
  auto g = decode_biose(gold_labels);
  std::set<EntitySpan> gs(g.begin(), g.end());
  std::size_t match = 0;
  for (const auto& s : std::set<EntitySpan>(p.begin(), p.end())) match += gs.count(s);
  return {detail::f1_from_counts(match, p.size(), g.size()), Metric::kEntityF1};
}

/// Micro-averaged entity F1 over a corpus: counts pooled before dividing.
inline Score corpus_entity_f1(const std::vector<std::vector<std::string>>& preds,
                              const std::vector<std::vector<std::string>>& golds) {
  if (preds.size() != golds.size()) {
    throw Error(ErrorCode::kContract, "metrics", "corpus sizes differ");
  }
  std::size_t match = 0, np = 0, ng = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].size() != golds[i].size()) {
      throw Error(ErrorCode::kContract, "metrics",
                  "label sequences differ in length at sentence " + std::to_string(i));
    }
    auto p = decode_biose(preds[i]);
    auto g = decode_biose(golds[i]);
    std::set<EntitySpan> gs(g.begin(), g.end());
    for (const auto& s : p) match += gs.count(s);
    np += p.size();
    ng += g.size();
  }
  return {detail::f1_from_counts(match, np, ng), Metric::kEntityF1};
}

// ----------------------------------------------------------------- NLI

inline Score accuracy(const std::vector<bool>& correct) {
  if (correct.empty()) throw Error(ErrorCode::kEmptyInput, "metrics", "accuracy of nothing");
  auto hits = std::count(correct.begin(), correct.end(), true);
  return {static_cast<double>(hits) / static_cast<double>(correct.size()), Metric::kAccuracy};
}

// --------------------------------------------------------------- ROUGE

enum class RougeVariant { k1, k2, kL };

inline RougeVariant parse_rouge_variant(std::string_view s) {
  if (s == "1" || s == "rouge1") return RougeVariant::k1;
  if (s == "2" || s == "rouge2") return RougeVariant::k2;
  if (s == "L" || s == "l" || s == "rougeL") return RougeVariant::kL;
  throw Error(ErrorCode::kParse, "metrics", "unknown ROUGE variant '" + std::string(s) + "'");
}

inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// ROUGE F-measure (balanced) of `pred` against `ref`.
inline Score rouge(std::string_view pred, std::string_view ref, RougeVariant variant,
                   const Tokenizer& tok = {TokenizerPolicy::kMixed, true, true}) {
  auto p = tok(pred);
  auto r = tok(ref);
  switch (variant) {
    case RougeVariant::k1:
    case RougeVariant::k2: {
      std::size_t n = variant == RougeVariant::k1 ? 1 : 2;
      auto pc = detail::ngram_counts(p, n);
      auto rc = detail::ngram_counts(r, n);
      return {detail::f1_from_counts(detail::overlap(pc, rc), detail::total(pc),
                                     detail::total(rc)),
              variant == RougeVariant::k1 ? Metric::kRouge1 : Metric::kRouge2};
    }
    case RougeVariant::kL:
      return {detail::f1_from_counts(lcs_length(p, r), p.size(), r.size()), Metric::kRougeL};
  }
  return {};
}

// ---------------------------------------------------------------- BLEU

struct BleuStats {
  std::vector<std::size_t> matches;  // per order
  std::vector<std::size_t> totals;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

inline BleuStats bleu_stats(const std::vector<std::string>& candidates,
                            const std::vector<std::string>& references, std::size_t max_n,
                            const Tokenizer& tok) {
  if (candidates.size() != references.size()) {
    throw Error(ErrorCode::kContract, "metrics", "candidate and reference counts differ");
  }
  if (candidates.empty()) throw Error(ErrorCode::kEmptyInput, "metrics", "empty BLEU corpus");
  if (max_n == 0) throw Error(ErrorCode::kDomain, "metrics", "BLEU order must be positive");
  BleuStats s;
  s.matches.assign(max_n, 0);
  s.totals.assign(max_n, 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto c = tok(candidates[i]);
    auto r = tok(references[i]);
    s.hyp_len += c.size();
    s.ref_len += r.size();
    for (std::size_t n = 1; n <= max_n; ++n) {
      auto cc = detail::ngram_counts(c, n);
      s.matches[n - 1] += detail::overlap(cc, detail::ngram_counts(r, n));
      s.totals[n - 1] += detail::total(cc);
    }
  }
  return s;
}

inline double brevity_penalty(std::size_t hyp_len, std::size_t ref_len) {
  if (hyp_len == 0) return 0.0;
  if (hyp_len > ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

/// Corpus BLEU, unsmoothed: any zero n-gram precision gives 0.
inline Score bleu(const std::vector<std::string>& candidates,
                  const std::vector<std::string>& references, std::size_t max_n = 4,
                  const Tokenizer& tok = {TokenizerPolicy::kMixed}) {
  auto s = bleu_stats(candidates, references, max_n, tok);
  double log_sum = 0.0;
  for (std::size_t n = 0; n < max_n; ++n) {
    if (s.matches[n] == 0) return {0.0, Metric::kBleu};
    log_sum += std::log(static_cast<double>(s.matches[n]) / static_cast<double>(s.totals[n]));
  }
  return {brevity_penalty(s.hyp_len, s.ref_len) * std::exp(log_sum / static_cast<double>(max_n)),
          Metric::kBleu};
}

/// Sentence BLEU with add-one smoothing on orders above one.
inline Score sentence_bleu(const std::string& candidate, const std::string& reference,
                           std::size_t max_n = 4, const Tokenizer& tok = {TokenizerPolicy::kMixed}) {
  auto s = bleu_stats({candidate}, {reference}, max_n, tok);
  if (s.matches[0] == 0) return {0.0, Metric::kBleu};
  double log_sum = 0.0;
  for (std::size_t n = 0; n < max_n; ++n) {
    double m = static_cast<double>(s.matches[n]);
    double t = static_cast<double>(s.totals[n]);
    if (n > 0) {
      m += 1.0;
      t += 1.0;
    }
    log_sum += std::log(m / t);
  }
  return {brevity_penalty(s.hyp_len, s.ref_len) * std::exp(log_sum / static_cast<double>(max_n)),
          Metric::kBleu};
}

// ---------------------------------------------------------------- chrF

/// Character n-gram F-score (orders 1..6, beta 2, whitespace ignored),
/// with statistics pooled over the corpus.
inline Score chrf(const std::vector<std::string>& candidates,
                  const std::vector<std::string>& references, std::size_t max_n = 6,
                  double beta = 2.0) {
  if (candidates.size() != references.size()) {
    throw Error(ErrorCode::kContract, "metrics", "candidate and reference counts differ");
  }
  if (candidates.empty()) throw Error(ErrorCode::kEmptyInput, "metrics", "empty chrF corpus");
  Tokenizer chars{TokenizerPolicy::kCharacter};
  std::vector<std::size_t> match(max_n, 0), hyp(max_n, 0), ref(max_n, 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto c = chars(candidates[i]);
    auto r = chars(references[i]);
    for (std::size_t n = 1; n <= max_n; ++n) {
      auto cc = detail::ngram_counts(c, n);
      auto rc = detail::ngram_counts(r, n);
      match[n - 1] += detail::overlap(cc, rc);
      hyp[n - 1] += detail::total(cc);
      ref[n - 1] += detail::total(rc);
    }
  }
  double p_sum = 0.0, r_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 0; n < max_n; ++n) {
    if (hyp[n] == 0 || ref[n] == 0) continue;
    p_sum += static_cast<double>(match[n]) / static_cast<double>(hyp[n]);
    r_sum += static_cast<double>(match[n]) / static_cast<double>(ref[n]);
    ++orders;
  }
  if (orders == 0) return {0.0, Metric::kChrF};
  double p = p_sum / static_cast<double>(orders);
  double r = r_sum / static_cast<double>(orders);
  if (p == 0.0 && r == 0.0) return {0.0, Metric::kChrF};
  double b2 = beta * beta;
  return {(1.0 + b2) * p * r / (b2 * p + r), Metric::kChrF};
}

// --------------------------------------------------------- correlation

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Two-sided p-value of a correlation coefficient under Student's t with
/// n - 2 degrees of freedom.
inline double correlation_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  double df = static_cast<double>(n - 2);
  double r2 = std::min(1.0, r * r);
  if (r2 >= 1.0) return 0.0;
  double t2 = df * r2 / (1.0 - r2);
  // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
  return boost::math::ibeta(df / 2.0, 0.5, df / (df + t2));
}

namespace detail {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double pearson_coefficient(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kUndefinedCorrelation, "metrics", "zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detail

inline CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kContract, "metrics", "pearson: vectors differ in length");
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::kUndefinedCorrelation, "metrics",
                "pearson needs at least 3 pairs, got " + std::to_string(x.size()));
  }
  double r = detail::pearson_coefficient(x, y);
  return {r, correlation_p_value(r, x.size()), x.size()};
}

/// Point-biserial coefficient from group means:
///   r = (M1 - M0) / s * sqrt(n1 n0 / n^2), s the population deviation.
inline CorrelationResult point_biserial(const std::vector<int>& binary,
                                        const std::vector<double>& scores) {
  if (binary.size() != scores.size()) {
    throw Error(ErrorCode::kContract, "metrics", "point_biserial: vectors differ in length");
  }
  std::size_t n1 = 0, n0 = 0;
  double s1 = 0.0, s0 = 0.0;
  for (std::size_t i = 0; i < binary.size(); ++i) {
    if (binary[i] != 0 && binary[i] != 1) {
      throw Error(ErrorCode::kDomain, "metrics", "point_biserial: indicator must be 0 or 1");
    }
    if (binary[i]) {
      ++n1;
      s1 += scores[i];
    } else {
      ++n0;
      s0 += scores[i];
    }
  }
  if (n1 == 0 || n0 == 0) {
    throw Error(ErrorCode::kUndefinedCorrelation, "metrics",
                "point_biserial: indicator takes a single value");
  }
  const double n = static_cast<double>(binary.size());
  double m = detail::mean(scores);
  double ss = 0.0;
  for (double v : scores) ss += (v - m) * (v - m);
  if (ss == 0.0) {
    throw Error(ErrorCode::kUndefinedCorrelation, "metrics", "point_biserial: scores are constant");
  }
  double sd = std::sqrt(ss / n);
  double m1 = s1 / static_cast<double>(n1), m0 = s0 / static_cast<double>(n0);
  double r = (m1 - m0) / sd * std::sqrt(static_cast<double>(n1) * static_cast<double>(n0) / (n * n));
  r = std::clamp(r, -1.0, 1.0);
  return {r, correlation_p_value(r, binary.size()), binary.size()};
}

/// Significance stars: *** p < 0.001, ** p < 0.01, * p < 0.05.
inline std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

/// Pre-computed per-pair scores from an outside scorer, "<id>\t<score>"
/// lines. Used for metrics that are not implemented here.
inline std::map<std::string, double> load_external_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "metrics", "cannot open external scores '" + path + "'");
  std::map<std::string, double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kSchema, "metrics",
                  path + ":" + std::to_string(lineno) + ": expected <id>\\t<score>");
    }
    try {
      out[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kSchema, "metrics",
                  path + ":" + std::to_string(lineno) + ": score is not a number");
    }
  }
  return out;
}

}  // namespace selprompt
