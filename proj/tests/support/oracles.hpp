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

// Independent reference implementations used by the unit and acceptance
// suites. They share no code with the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

/// Multiset overlap by crossing out matched gold tokens one at a time.
inline double token_f1_one(const std::string& pred, const std::string& gold) {
  auto p = words(pred);
  auto g = words(gold);
  if (p.empty() && g.empty()) return 1.0;
  std::size_t common = 0;
  std::vector<bool> used(g.size(), false);
  for (const auto& w : p) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!used[j] && g[j] == w) {
        used[j] = true;
        ++common;
        break;
      }
    }
  }
  if (common == 0) return 0.0;
  double prec = double(common) / double(p.size());
  double rec = double(common) / double(g.size());
  return 2 * prec * rec / (prec + rec);
}

inline double token_f1(const std::string& pred, const std::vector<std::string>& golds) {
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, token_f1_one(pred, g));
  return best;
}

/// (type, first, last) spans.
using Span = std::tuple<std::string, std::size_t, std::size_t>;

/// Random non-overlapping spans over `n` tokens.
inline std::set<Span> random_spans(std::mt19937_64& rng, std::size_t n) {
  static const char* kTypes[] = {"PER", "ORG", "LOC"};
  std::set<Span> out;
  std::size_t i = 0;
  while (i < n) {
    if (rng() % 3 == 0) {
      std::size_t len = 1 + rng() % 3;
      if (i + len > n) len = n - i;
      out.insert({kTypes[rng() % 3], i, i + len - 1});
      i += len;
    } else {
      ++i;
    }
  }
  return out;
}

inline std::vector<std::string> labels_for(const std::set<Span>& spans, std::size_t n) {
  std::vector<std::string> l(n, "O");
  for (const auto& [t, a, b] : spans) {
    if (a == b) {
      l[a] = "S-" + t;
      continue;
    }
    l[a] = "B-" + t;
    for (std::size_t k = a + 1; k < b; ++k) l[k] = "I-" + t;
    l[b] = "E-" + t;
  }
  return l;
}

inline double span_f1(const std::set<Span>& pred, const std::set<Span>& gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& s : pred) common += gold.count(s);
  if (common == 0) return 0.0;
  double p = double(common) / double(pred.size());
  double r = double(common) / double(gold.size());
  return 2 * p * r / (p + r);
}

/// Itemsets and rules by enumerating every subset of the item universe.
struct BruteRule {
  std::vector<std::string> antecedent, consequent;
  double support, confidence;
  bool operator<(const BruteRule& o) const {
    return std::tie(antecedent, consequent) < std::tie(o.antecedent, o.consequent);
  }
};

struct BruteResult {
  std::map<std::vector<std::string>, std::size_t> itemsets;
  std::vector<BruteRule> rules;
};

inline BruteResult brute_force_rules(const std::vector<std::vector<std::string>>& tx, double min_s,
                                     double min_c, bool strict) {
  std::set<std::string> universe;
  for (const auto& t : tx) universe.insert(t.begin(), t.end());
  std::vector<std::string> items(universe.begin(), universe.end());
  const std::size_t n = tx.size();
  auto count = [&](const std::vector<std::string>& s) {
    std::size_t c = 0;
    for (const auto& t : tx) {
      bool all = true;
      for (const auto& i : s) all = all && std::find(t.begin(), t.end(), i) != t.end();
      c += all;
    }
    return c;
  };
  auto pass = [&](double v, double th) { return strict ? v > th : v >= th; };
  BruteResult out;
  for (std::uint32_t mask = 1; mask < (1u << items.size()); ++mask) {
    std::vector<std::string> s;
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (mask >> j & 1u) s.push_back(items[j]);
    }
    auto c = count(s);
    if (pass(double(c) / double(n), min_s)) out.itemsets[s] = c;
  }
  for (const auto& [s, c] : out.itemsets) {
    if (s.size() < 2) continue;
    for (std::uint32_t mask = 1; mask + 1 < (1u << s.size()); ++mask) {
      std::vector<std::string> a, b;
      for (std::size_t j = 0; j < s.size(); ++j) (mask >> j & 1u ? a : b).push_back(s[j]);
      double conf = double(c) / double(count(a));
      if (pass(conf, min_c)) out.rules.push_back({a, b, double(c) / double(n), conf});
    }
  }
  std::sort(out.rules.begin(), out.rules.end());
  return out;
}

/// Textbook Pearson coefficient.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n, cxy = 0, cxx = 0, cyy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cxy += (x[i] - mx) * (y[i] - my);
    cxx += (x[i] - mx) * (x[i] - mx);
    cyy += (y[i] - my) * (y[i] - my);
  }
  return cxy / std::sqrt(cxx * cyy);
}

}  // namespace oracle
