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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "selprompt/config_space.hpp"
#include "selprompt/error.hpp"
#include "selprompt/metrics.hpp"
#include "selprompt/text.hpp"

namespace selprompt {

// ---------------------------------------------------------- result table

struct ResultRow {
  TaskKind task = TaskKind::kQA;
  std::string model;
  std::string language;
  Configuration config;
  std::optional<double> score;  // absent when the source table has no value
};

struct ResultKey {
  TaskKind task;
  std::string model;
  std::string language;

  auto operator<=>(const ResultKey&) const = default;
};

class ResultTable {
 public:
  void add(ResultRow row) {
    if (row.score && !std::isfinite(*row.score)) {
      throw Error(ErrorCode::kSchema, "analysis", "non-finite score for " + describe(row));
    }
    auto k = std::make_tuple(row.task, row.model, row.language, row.config.code());
    if (!keys_.insert(k).second) {
      throw Error(ErrorCode::kSchema, "analysis", "duplicate row " + describe(row));
    }
    rows_.push_back(std::move(row));
  }

  const std::vector<ResultRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  std::size_t size() const { return rows_.size(); }

  std::vector<ResultRow> select(const ResultKey& key) const {
    std::vector<ResultRow> out;
    for (const auto& r : rows_) {
      if (r.task == key.task && r.model == key.model &&
          text::ascii_lower(r.language) == text::ascii_lower(key.language)) {
        out.push_back(r);
      }
    }
    return out;
  }

  std::vector<ResultKey> keys() const {
    std::set<ResultKey> ks;
    for (const auto& r : rows_) ks.insert({r.task, r.model, r.language});
    return {ks.begin(), ks.end()};
  }

  std::set<TaskKind> tasks() const {
    std::set<TaskKind> t;
    for (const auto& r : rows_) t.insert(r.task);
    return t;
  }

  /// Every config code that appears anywhere in the table for `task`.
  std::set<Configuration> configs_for(TaskKind task) const {
    std::set<Configuration> s;
    for (const auto& r : rows_) {
      if (r.task == task) s.insert(r.config);
    }
    return s;
  }

  static std::string describe(const ResultRow& r) {
    return "(" + std::string(to_string(r.task)) + ", " + r.model + ", " + r.language + ", " +
           r.config.code() + ")";
  }

  // Interchange: header task,model,language,config_code,score; "NA" or an
  // empty cell for a missing score.
  static ResultTable parse_csv(std::istream& in, const std::string& origin = "<csv>") {
    ResultTable t;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (text::trim(line).empty() || line[0] == '#') continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(text::trim(cell));
      if (!line.empty() && line.back() == ',') cells.emplace_back();
      if (header.empty()) {
        header = cells;
        for (const char* need : {"task", "model", "language", "config_code", "score"}) {
          if (std::find(header.begin(), header.end(), need) == header.end()) {
            throw Error(ErrorCode::kSchema, "analysis",
                        origin + ": header lacks column '" + need + "'");
          }
        }
        continue;
      }
      if (cells.size() != header.size()) {
        throw Error(ErrorCode::kSchema, "analysis",
                    origin + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " cells");
      }
      std::map<std::string, std::string> f;
      for (std::size_t i = 0; i < header.size(); ++i) f[header[i]] = cells[i];
      try {
        t.add(row_from_fields(f));
      } catch (const Error& e) {
        throw Error(e.code(), "analysis",
                    origin + ":" + std::to_string(lineno) + ": " + e.detail());
      }
    }
    return t;
  }

  static ResultTable parse_jsonl(std::istream& in, const std::string& origin = "<jsonl>") {
    ResultTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (text::trim(line).empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        std::map<std::string, std::string> f;
        for (const char* k : {"task", "model", "language", "config_code"}) {
          f[k] = j.at(k).get<std::string>();
        }
        f["score"] = j.contains("score") && !j["score"].is_null()
                         ? nlohmann::json(j["score"]).dump()
                         : "NA";
        t.add(row_from_fields(f));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kSchema, "analysis",
                    origin + ":" + std::to_string(lineno) + ": " + e.what());
      } catch (const Error& e) {
        throw Error(e.code(), "analysis",
                    origin + ":" + std::to_string(lineno) + ": " + e.detail());
      }
    }
    return t;
  }

  static ResultTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "analysis", "cannot open results '" + path + "'");
    auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".jsonl" || ext == ".json") return parse_jsonl(in, path);
    return parse_csv(in, path);
  }

  void write_csv(std::ostream& out) const {
    out << "task,model,language,config_code,score\n";
    for (const auto& r : rows_) {
      out << to_string(r.task) << ',' << r.model << ',' << r.language << ',' << r.config.code()
          << ',' << (r.score ? format_score(*r.score) : "NA") << '\n';
    }
  }

  void write_jsonl(std::ostream& out) const {
    for (const auto& r : rows_) {
      nlohmann::json j{{"task", to_string(r.task)},
                       {"model", r.model},
                       {"language", r.language},
                       {"config_code", r.config.code()}};
      j["score"] = r.score ? nlohmann::json(*r.score) : nlohmann::json(nullptr);
      out << j.dump() << '\n';
    }
  }

  static std::string format_score(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }

 private:
  static ResultRow row_from_fields(const std::map<std::string, std::string>& f) {
    ResultRow r;
    r.task = parse_task(f.at("task"));
    r.model = f.at("model");
    r.language = f.at("language");
    r.config = parse_config_code(f.at("config_code"), r.task);
    const auto& s = f.at("score");
    if (!s.empty() && s != "NA" && s != "null") {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size()) {
        throw Error(ErrorCode::kSchema, "analysis", "score '" + s + "' is not a number");
      }
      r.score = v;
    }
    return r;
  }

  std::vector<ResultRow> rows_;
  std::set<std::tuple<TaskKind, std::string, std::string, std::string>> keys_;
};

// -------------------------------------------------------------- binning

enum class ScoreBin { kLow, kMedium, kHigh };

inline std::string_view to_string(ScoreBin b) {
  switch (b) {
    case ScoreBin::kLow: return "low";
    case ScoreBin::kMedium: return "medium";
    case ScoreBin::kHigh: return "high";
  }
  return "?";
}

/// Nearest-rank percentile: the ceil(p n / 100)-th smallest value.
inline double nearest_rank_percentile(std::vector<double> values, int pct) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "analysis", "percentile of nothing");
  if (pct < 0 || pct > 100) throw Error(ErrorCode::kDomain, "analysis", "percentile out of range");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  std::size_t rank = (static_cast<std::size_t>(pct) * n + 99) / 100;
  if (rank == 0) rank = 1;
  return values[rank - 1];
}

struct BinBoundaries {
  double low = 0;   // P_low
  double high = 0;  // P_high
};

inline ScoreBin assign_bin(double score, const BinBoundaries& b) {
  if (score < b.low) return ScoreBin::kLow;
  if (score < b.high) return ScoreBin::kMedium;
  return ScoreBin::kHigh;
}

inline std::vector<ScoreBin> bin_values(const std::vector<double>& values, int low_pct = 30,
                                        int high_pct = 60, BinBoundaries* used = nullptr) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "analysis", "nothing to bin");
  if (!(low_pct <= high_pct)) throw Error(ErrorCode::kDomain, "analysis", "low percentile above high");
  BinBoundaries b{nearest_rank_percentile(values, low_pct), nearest_rank_percentile(values, high_pct)};
  if (used) *used = b;
  std::vector<ScoreBin> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(assign_bin(v, b));
  return out;
}

struct BinnedRow {
  ResultRow row;
  ScoreBin bin = ScoreBin::kLow;
};

/// Bins scored rows; boundaries are computed per (task, model, language)
/// group. Rows without a score are left out.
inline std::vector<BinnedRow> bin_scores(const ResultTable& table, int low_pct = 30,
                                         int high_pct = 60) {
  if (table.empty()) throw Error(ErrorCode::kEmptyInput, "analysis", "empty result table");
  std::vector<BinnedRow> out;
  for (const auto& key : table.keys()) {
    std::vector<ResultRow> scored;
    for (auto& r : table.select(key)) {
      if (r.score) scored.push_back(std::move(r));
    }
    if (scored.empty()) continue;
    if (scored.size() < 3) {
      throw Error(ErrorCode::kContract, "analysis",
                  "binning needs at least 3 scored rows per group; (" +
                      std::string(to_string(key.task)) + ", " + key.model + ", " + key.language +
                      ") has " + std::to_string(scored.size()));
    }
    std::vector<double> v;
    for (const auto& r : scored) v.push_back(*r.score);
    auto bins = bin_values(v, low_pct, high_pct);
    for (std::size_t i = 0; i < scored.size(); ++i) out.push_back({scored[i], bins[i]});
  }
  return out;
}

// --------------------------------------------------------- transactions

using Item = std::string;
using Itemset = std::vector<Item>;  // sorted, unique

struct Transaction {
  Itemset items;
};

inline Transaction make_transaction(std::vector<Item> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return {std::move(items)};
}

inline std::vector<Item> component_items(const Configuration& c) {
  std::vector<Item> items{"instruction=" + std::string(1, to_char(c.instruction)),
                          "context=" + std::string(1, to_char(c.context)),
                          "examples=" + std::string(1, to_char(c.examples))};
  if (c.task != TaskKind::kNLI) items.push_back("output=" + std::string(1, to_char(c.output)));
  return items;
}

/// One transaction per binned row: component items, class=<A-D>,
/// score_bin=<low|medium|high>.
inline std::vector<Transaction> make_transactions(const std::vector<BinnedRow>& rows,
                                                  const LanguageRegistry& registry) {
  std::vector<Transaction> out;
  for (const auto& b : rows) {
    auto items = component_items(b.row.config);
    items.push_back("class=" + std::string(1, to_char(registry.at(b.row.language).resource_class)));
    items.push_back("score_bin=" + std::string(to_string(b.bin)));
    out.push_back(make_transaction(std::move(items)));
  }
  return out;
}

// -------------------------------------------------------------- apriori

struct Rule {
  Itemset antecedent;
  Itemset consequent;
  double support = 0;     // s(X ∪ Y)
  double confidence = 0;  // s(X ∪ Y) / s(X)

  bool operator==(const Rule&) const = default;
};

struct FrequentItemset {
  Itemset items;
  std::size_t count = 0;
  double support = 0;

  bool operator==(const FrequentItemset&) const = default;
};

struct MiningProfile {
  std::string name;
  double min_support = 0.05;
  double min_confidence = 0.75;
  bool strict = false;  // true: thresholds are exclusive (>)

  bool support_ok(double s) const { return strict ? s > min_support : s >= min_support; }
  bool confidence_ok(double c) const {
    return strict ? c > min_confidence : c >= min_confidence;
  }
};

/// Weak-rule filter of the published mining pipeline.
inline MiningProfile profile_appendix_b() { return {"appendixB", 0.05, 0.75, true}; }
/// Stricter thresholds quoted with the recommendation table.
inline MiningProfile profile_table4() { return {"table4", 0.15, 0.8, true}; }

inline MiningProfile parse_profile(std::string_view name) {
  if (name == "appendixB" || name == "appendixb" || name == "default") return profile_appendix_b();
  if (name == "table4") return profile_table4();
  throw Error(ErrorCode::kParse, "analysis",
              "unknown mining profile '" + std::string(name) + "' (appendixB, table4)");
}

struct AprioriResult {
  std::vector<FrequentItemset> itemsets;  // sorted by (size, items)
  std::vector<Rule> rules;                // sorted by (antecedent, consequent)
};

/// Level-wise frequent-itemset growth with downward-closure pruning, then
/// every rule X -> Y with X, Y non-empty and X ∪ Y frequent.
inline AprioriResult apriori(const std::vector<Transaction>& transactions,
                             const MiningProfile& profile) {
  if (transactions.empty()) {
    throw Error(ErrorCode::kEmptyInput, "analysis", "apriori over an empty transaction list");
  }
  if (!(profile.min_support >= 0 && profile.min_support <= 1) ||
      !(profile.min_confidence >= 0 && profile.min_confidence <= 1) ||
      (!profile.strict && (profile.min_support == 0 || profile.min_confidence == 0))) {
    throw Error(ErrorCode::kDomain, "analysis", "thresholds must lie in (0, 1]");
  }
  const std::size_t n = transactions.size();
  const std::size_t words = (n + 63) / 64;

  // Vertical layout: one transaction bitset per item.
  std::map<Item, std::vector<std::uint64_t>> tid;
  for (std::size_t t = 0; t < n; ++t) {
    for (const auto& it : transactions[t].items) {
      auto& bits = tid[it];
      if (bits.empty()) bits.assign(words, 0);
      bits[t / 64] |= std::uint64_t{1} << (t % 64);
    }
  }
  std::vector<Item> items;
  std::vector<std::vector<std::uint64_t>> item_bits;
  for (auto& [k, v] : tid) {
    items.push_back(k);
    item_bits.push_back(std::move(v));
  }

  using Ids = std::vector<std::size_t>;
  auto support_of = [&](std::size_t count) { return static_cast<double>(count) / static_cast<double>(n); };

  std::map<Ids, std::size_t> frequent;  // all levels
  std::vector<std::pair<Ids, std::vector<std::uint64_t>>> level;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::size_t c = 0;
    for (auto w : item_bits[i]) c += static_cast<std::size_t>(std::popcount(w));
    if (profile.support_ok(support_of(c))) {
      frequent[{i}] = c;
      level.push_back({{i}, item_bits[i]});
    }
  }
  while (!level.empty()) {
    std::vector<std::pair<Ids, std::vector<std::uint64_t>>> next;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const auto& x = level[a].first;
        const auto& y = level[b].first;
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) continue;  // shared prefix
        Ids cand = x;
        cand.push_back(y.back());
        if (cand[cand.size() - 2] > cand.back()) std::swap(cand[cand.size() - 2], cand.back());
        // Prune: every (k-1)-subset must be frequent.
        bool closed = true;
        for (std::size_t drop = 0; closed && drop < cand.size(); ++drop) {
          Ids sub;
          for (std::size_t j = 0; j < cand.size(); ++j) {
            if (j != drop) sub.push_back(cand[j]);
          }
          closed = frequent.count(sub) > 0;
        }
        if (!closed) continue;
        std::vector<std::uint64_t> bits(words);
        std::size_t c = 0;
        for (std::size_t w = 0; w < words; ++w) {
          bits[w] = level[a].second[w] & level[b].second[w];
          c += static_cast<std::size_t>(std::popcount(bits[w]));
        }
        if (!profile.support_ok(support_of(c))) continue;
        frequent[cand] = c;
        next.push_back({std::move(cand), std::move(bits)});
      }
    }
    std::sort(next.begin(), next.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
    level = std::move(next);
  }

  auto names = [&](const Ids& ids) {
    Itemset s;
    for (auto i : ids) s.push_back(items[i]);
    std::sort(s.begin(), s.end());
    return s;
  };

  AprioriResult out;
  for (const auto& [ids, c] : frequent) out.itemsets.push_back({names(ids), c, support_of(c)});
  std::sort(out.itemsets.begin(), out.itemsets.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.items.size(), a.items) < std::make_pair(b.items.size(), b.items);
  });

  for (const auto& [ids, c] : frequent) {
    if (ids.size() < 2) continue;
    const std::size_t k = ids.size();
    for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
      Ids ante, cons;
      for (std::size_t j = 0; j < k; ++j) ((mask >> j) & 1u ? ante : cons).push_back(ids[j]);
      double conf = static_cast<double>(c) / static_cast<double>(frequent.at(ante));
      if (!profile.confidence_ok(conf)) continue;
      out.rules.push_back({names(ante), names(cons), support_of(c), conf});
    }
  }
  std::sort(out.rules.begin(), out.rules.end(), [](const Rule& a, const Rule& b) {
    return std::tie(a.antecedent, a.consequent) < std::tie(b.antecedent, b.consequent);
  });
  return out;
}

inline AprioriResult apriori(const std::vector<Transaction>& transactions, double min_support,
                             double min_confidence) {
  return apriori(transactions, MiningProfile{"custom", min_support, min_confidence, false});
}

inline nlohmann::json to_json(const Rule& r) {
  return {{"antecedent", r.antecedent},
          {"consequent", r.consequent},
          {"support", r.support},
          {"confidence", r.confidence}};
}

// ------------------------------------------------------ top / improvement

struct TopConfiguration {
  Configuration config;
  double score = 0;
};

namespace detail {

inline std::vector<ResultRow> complete_rows(const ResultTable& table, const ResultKey& key) {
  auto rows = table.select(key);
  if (rows.empty()) {
    throw Error(ErrorCode::kNotFound, "analysis",
                "no rows for (" + std::string(to_string(key.task)) + ", " + key.model + ", " +
                    key.language + ")");
  }
  std::set<Configuration> have;
  for (const auto& r : rows) have.insert(r.config);
  std::vector<std::string> missing;
  for (const auto& c : table.configs_for(key.task)) {
    if (!have.count(c)) missing.push_back(c.code());
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kContract, "analysis",
                "(" + std::string(to_string(key.task)) + ", " + key.model + ", " + key.language +
                    ") lacks configurations: " + text::join(missing, ", "));
  }
  return rows;
}

}  // namespace detail

/// Argmax over scored rows; ties go to the earliest configuration in
/// canonical order.
inline TopConfiguration top_configuration(const ResultTable& table, const ResultKey& key) {
  auto rows = detail::complete_rows(table, key);
  std::optional<TopConfiguration> best;
  for (const auto& r : rows) {
    if (!r.score) continue;
    if (!best || *r.score > best->score || (*r.score == best->score && r.config < best->config)) {
      best = TopConfiguration{r.config, *r.score};
    }
  }
  if (!best) {
    throw Error(ErrorCode::kContract, "analysis",
                "(" + key.model + ", " + key.language + ") has no scored configuration");
  }
  return *best;
}

struct Improvement {
  TopConfiguration top;
  double direct_score = 0;
  double pretranslate_score = 0;
  double vs_direct = 0;        // percent
  double vs_pretranslate = 0;  // percent
};

inline double relative_improvement(double top, double base) {
  if (base == 0.0) {
    throw Error(ErrorCode::kUndefinedImprovement, "analysis", "baseline score is 0");
  }
  return 100.0 * (top - base) / base;
}

inline Improvement improvement_over_baselines(const ResultTable& table, const ResultKey& key,
                                              const Configuration& direct,
                                              const Configuration& pretranslate) {
  Improvement out;
  out.top = top_configuration(table, key);
  auto score_of = [&](const Configuration& c) {
    for (const auto& r : table.select(key)) {
      if (r.config == c) {
        if (!r.score) {
          throw Error(ErrorCode::kContract, "analysis", "baseline " + c.code() + " has no score");
        }
        return *r.score;
      }
    }
    throw Error(ErrorCode::kNotFound, "analysis", "baseline " + c.code() + " not in table");
  };
  out.direct_score = score_of(direct);
  out.pretranslate_score = score_of(pretranslate);
  out.vs_direct = relative_improvement(out.top.score, out.direct_score);
  out.vs_pretranslate = relative_improvement(out.top.score, out.pretranslate_score);
  return out;
}

// ------------------------------------------------------ performance gap

struct GapReport {
  Component component = Component::kInstruction;
  double mean_gap = 0;  // mean of Eval(English) - Eval(Source)
  std::size_t k = 0;
};

namespace detail {

// Language of `comp` in `c`: 1 English, 0 Source, -1 absent (zero-shot
// examples, or the bound NLI output).
inline int component_language(const Configuration& c, Component comp) {
  switch (comp) {
    case Component::kInstruction: return c.instruction == ComponentLang::kEnglish;
    case Component::kContext: return c.context == ComponentLang::kEnglish;
    case Component::kExamples:
      if (c.examples == ExamplesMode::kNone) return -1;
      return c.examples == ExamplesMode::kEnglish;
    case Component::kOutput:
      if (c.task == TaskKind::kNLI) return -1;
      return c.output == ComponentLang::kEnglish;
  }
  return -1;
}

inline Configuration with_source(Configuration c, Component comp) {
  switch (comp) {
    case Component::kInstruction:
      c.instruction = ComponentLang::kSource;
      if (c.task == TaskKind::kNLI) c.output = ComponentLang::kSource;
      break;
    case Component::kContext: c.context = ComponentLang::kSource; break;
    case Component::kExamples: c.examples = ExamplesMode::kSource; break;
    case Component::kOutput: c.output = ComponentLang::kSource; break;
  }
  return c;
}

}  // namespace detail

/// Mean score difference over configuration pairs that differ only in the
/// language of `component`, English minus Source. Pairs are formed within
/// each (task, model, language) key; `scope` restricts to zero- or
/// few-shot configurations.
inline GapReport performance_gap(const ResultTable& table, Component component,
                                 ShotFilter scope = ShotFilter::kAll) {
  auto in_scope = [&](const Configuration& c) {
    return scope == ShotFilter::kAll || (scope == ShotFilter::kZeroShot) == c.zero_shot();
  };
  GapReport g{component, 0.0, 0};
  double sum = 0.0;
  for (const auto& key : table.keys()) {
    std::map<Configuration, double> score;
    for (const auto& r : table.select(key)) {
      if (r.score) score[r.config] = *r.score;
    }
    for (const auto& [c, s] : score) {
      if (!in_scope(c) || detail::component_language(c, component) != 1) continue;
      auto twin = detail::with_source(c, component);
      auto it = score.find(twin);
      if (it == score.end()) continue;
      sum += s - it->second;
      ++g.k;
    }
  }
  if (g.k == 0) {
    throw Error(ErrorCode::kContract, "analysis",
                "no configuration pairs differ only in " + std::string(to_string(component)));
  }
  g.mean_gap = sum / static_cast<double>(g.k);
  return g;
}

// ---------------------------------------------------------- correlation

struct ScoredSample {
  Configuration config;
  double score = 0;
};

/// Point-biserial correlation of "component is Source" with score. Samples
/// where the component is absent are skipped.
inline CorrelationResult component_correlation(const std::vector<ScoredSample>& samples,
                                               Component component) {
  std::vector<int> source;
  std::vector<double> scores;
  for (const auto& s : samples) {
    int lang = detail::component_language(s.config, component);
    if (lang < 0) continue;
    source.push_back(lang == 0 ? 1 : 0);
    scores.push_back(s.score);
  }
  if (source.empty()) {
    throw Error(ErrorCode::kUndefinedCorrelation, "analysis",
                "no samples carry component " + std::string(to_string(component)));
  }
  return point_biserial(source, scores);
}

inline std::vector<ScoredSample> samples_of(const ResultTable& table, TaskKind task) {
  std::vector<ScoredSample> out;
  for (const auto& r : table.rows()) {
    if (r.task == task && r.score) out.push_back({r.config, *r.score});
  }
  return out;
}

// ------------------------------------------------------- MT quality study

struct TranslationPair {
  std::string hypothesis;
  std::string reference;
  std::string language;
};

struct LanguageQuality {
  std::string language;
  std::size_t n = 0;
  double rouge1 = 0;  // mean sentence ROUGE-1
  double bleu = 0;    // corpus BLEU
  double chrf = 0;    // corpus chrF
  double similarity = 0;
};

struct MtQualityReport {
  std::vector<LanguageQuality> per_language;  // sorted by language
  CorrelationResult similarity_correlation;
};

inline std::map<std::string, double> load_similarity(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "analysis", "cannot open similarity file '" + path + "'");
  std::map<std::string, double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto parts = text::split_whitespace(line);
    if (parts.empty() || parts[0][0] == '#') continue;
    if (parts.size() != 2) {
      throw Error(ErrorCode::kSchema, "analysis",
                  path + ":" + std::to_string(lineno) + ": expected <language> <similarity>");
    }
    double v = std::stod(parts[1]);
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kDomain, "analysis",
                  path + ":" + std::to_string(lineno) + ": similarity outside [0, 1]");
    }
    out[text::ascii_lower(parts[0])] = v;
  }
  return out;
}

/// Per-language translation quality and its Pearson correlation with
/// similarity to English. Two languages give the two-point coefficient
/// with p = 1 (no degrees of freedom).
inline MtQualityReport mt_quality_study(const std::vector<TranslationPair>& pairs,
                                        const std::map<std::string, double>& similarity,
                                        const TokenizerTable& tokenizers = {}) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "analysis", "no translation pairs");
  std::map<std::string, std::vector<const TranslationPair*>> by_lang;
  for (const auto& p : pairs) by_lang[text::ascii_lower(p.language)].push_back(&p);
  MtQualityReport rep;
  std::vector<double> xs, ys;
  for (const auto& [lang, ps] : by_lang) {
    auto sim = similarity.find(lang);
    if (sim == similarity.end()) {
      throw Error(ErrorCode::kNotFound, "analysis", "no similarity value for language '" + lang + "'");
    }
    auto tok = tokenizers.for_language(lang, true, true);
    LanguageQuality q;
    q.language = lang;
    q.n = ps.size();
    q.similarity = sim->second;
    std::vector<std::string> hyps, refs;
    for (const auto* p : ps) {
      q.rouge1 += rouge(p->hypothesis, p->reference, RougeVariant::k1, tok).value;
      hyps.push_back(p->hypothesis);
      refs.push_back(p->reference);
    }
    q.rouge1 /= static_cast<double>(ps.size());
    q.bleu = bleu(hyps, refs, 4, tokenizers.for_language(lang)).value;
    q.chrf = chrf(hyps, refs).value;
    rep.per_language.push_back(q);
    xs.push_back(q.similarity);
    ys.push_back(q.rouge1);
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::kUndefinedCorrelation, "analysis",
                "correlation needs at least two languages");
  }
  if (xs.size() == 2) {
    double r = detail::pearson_coefficient(xs, ys);
    rep.similarity_correlation = {r, 1.0, 2};
  } else {
    rep.similarity_correlation = pearson(xs, ys);
  }
  return rep;
}

}  // namespace selprompt
