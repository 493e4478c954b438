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

// Unified task instances, the line-delimited dataset format and the sampling
// policy. Every dataset is one JSON record per line:
//
//   qa:  {"id", "language", "question", "context", "answers": [..]}
//   ner: {"id", "language", "tokens": [..], "tags": [..BIOSE..]}
//   nli: {"id", "language", "premise", "hypothesis", "label"}
//   sum: {"id", "language", "document", "reference_summary"}

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "selprompt/biose.hpp"
#include "selprompt/config_space.hpp"
#include "selprompt/error.hpp"
#include "selprompt/hash.hpp"
#include "selprompt/text.hpp"

namespace selprompt {

enum class NliLabel { kEntailment, kContradiction, kNeutral };

inline std::string_view to_string(NliLabel l) {
  switch (l) {
    case NliLabel::kEntailment: return "entailment";
    case NliLabel::kContradiction: return "contradiction";
    case NliLabel::kNeutral: return "neutral";
  }
  return "?";
}

inline std::optional<NliLabel> parse_nli_label(std::string_view s) {
  auto l = text::ascii_lower(text::trim(s));
  if (l == "entailment" || l == "0") return NliLabel::kEntailment;
  if (l == "neutral" || l == "1") return NliLabel::kNeutral;
  if (l == "contradiction" || l == "2") return NliLabel::kContradiction;
  return std::nullopt;
}

struct QaPayload {
  std::string question;
  std::string context;
  std::vector<std::string> answers;
};

struct NerPayload {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
};

struct NliPayload {
  std::string premise;
  std::string hypothesis;
  NliLabel label = NliLabel::kNeutral;
};

struct SumPayload {
  std::string document;
  std::string reference_summary;
};

using Payload = std::variant<QaPayload, NerPayload, NliPayload, SumPayload>;

struct TaskInstance {
  std::string id;
  std::string language;
  Payload payload;

  TaskKind task() const { return static_cast<TaskKind>(payload.index()); }
};

/// Text whose length is checked against the context budget.
inline std::string rendered_context(const TaskInstance& inst) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, QaPayload>) {
          return p.context + "\n" + p.question;
        } else if constexpr (std::is_same_v<T, NerPayload>) {
          return text::join(p.tokens, " ");
        } else if constexpr (std::is_same_v<T, NliPayload>) {
          return p.premise + "\n" + p.hypothesis;
        } else {
          return p.document;
        }
      },
      inst.payload);
}

namespace detail {

inline Error record_error(std::size_t index, std::string_view field,
                          std::string_view what) {
  return Error(ErrorCode::kSchema, "corpus",
               "record " + std::to_string(index) + ", field '" +
                   std::string(field) + "': " + std::string(what));
}

inline std::string require_string(const nlohmann::json& j, std::size_t index,
                                  std::string_view field) {
  auto it = j.find(field);
  if (it == j.end()) throw record_error(index, field, "missing");
  if (!it->is_string()) throw record_error(index, field, "must be a string");
  return it->get<std::string>();
}

inline std::vector<std::string> require_strings(const nlohmann::json& j,
                                                std::size_t index,
                                                std::string_view field) {
  auto it = j.find(field);
  if (it == j.end()) throw record_error(index, field, "missing");
  if (!it->is_array()) throw record_error(index, field, "must be an array");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw record_error(index, field, "elements must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

/// Validates one record against the schema of `task`. `index` is only used
/// in error messages.
inline TaskInstance parse_instance(const nlohmann::json& j, TaskKind task,
                                   std::size_t index) {
  if (!j.is_object()) throw detail::record_error(index, "<record>", "not an object");
  TaskInstance inst;
  inst.id = j.contains("id") && j["id"].is_number()
                ? std::to_string(j["id"].get<long long>())
                : detail::require_string(j, index, "id");
  inst.language = detail::require_string(j, index, "language");
  switch (task) {
    case TaskKind::kQA: {
      QaPayload p;
      p.question = detail::require_string(j, index, "question");
      p.context = detail::require_string(j, index, "context");
      p.answers = detail::require_strings(j, index, "answers");
      if (p.answers.empty()) {
        throw detail::record_error(index, "answers", "must not be empty");
      }
      inst.payload = std::move(p);
      break;
    }
    case TaskKind::kNER: {
      NerPayload p;
      p.tokens = detail::require_strings(j, index, "tokens");
      p.tags = detail::require_strings(j, index, "tags");
      if (p.tokens.size() != p.tags.size()) {
        throw Error(ErrorCode::kNerLengthMismatch, "corpus",
                    "record " + std::to_string(index) + ": " +
                        std::to_string(p.tokens.size()) + " tokens but " +
                        std::to_string(p.tags.size()) + " tags");
      }
      for (const auto& t : p.tags) {
        if (!is_valid_biose_label(t)) {
          throw detail::record_error(index, "tags", "invalid BIOSE label '" + t + "'");
        }
      }
      if (!is_well_formed_biose(p.tags)) {
        throw detail::record_error(index, "tags", "ill-formed BIOSE sequence");
      }
      inst.payload = std::move(p);
      break;
    }
    case TaskKind::kNLI: {
      NliPayload p;
      p.premise = detail::require_string(j, index, "premise");
      p.hypothesis = detail::require_string(j, index, "hypothesis");
      auto label = detail::require_string(j, index, "label");
      auto parsed = parse_nli_label(label);
      if (!parsed) {
        throw detail::record_error(index, "label", "unknown label '" + label + "'");
      }
      p.label = *parsed;
      inst.payload = std::move(p);
      break;
    }
    case TaskKind::kSUM: {
      SumPayload p;
      p.document = detail::require_string(j, index, "document");
      p.reference_summary = detail::require_string(j, index, "reference_summary");
      inst.payload = std::move(p);
      break;
    }
  }
  return inst;
}

inline nlohmann::json to_json(const TaskInstance& inst) {
  nlohmann::json j{{"id", inst.id}, {"language", inst.language}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, QaPayload>) {
          j["question"] = p.question;
          j["context"] = p.context;
          j["answers"] = p.answers;
        } else if constexpr (std::is_same_v<T, NerPayload>) {
          j["tokens"] = p.tokens;
          j["tags"] = p.tags;
        } else if constexpr (std::is_same_v<T, NliPayload>) {
          j["premise"] = p.premise;
          j["hypothesis"] = p.hypothesis;
          j["label"] = std::string(to_string(p.label));
        } else {
          j["document"] = p.document;
          j["reference_summary"] = p.reference_summary;
        }
      },
      inst.payload);
  return j;
}

inline std::vector<TaskInstance> parse_dataset(std::istream& in, TaskKind task) {
  std::vector<TaskInstance> out;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw detail::record_error(index, "<record>", e.what());
    }
    out.push_back(parse_instance(j, task, index));
    ++index;
  }
  return out;
}

inline std::vector<TaskInstance> load_dataset(const std::string& path,
                                              TaskKind task) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "corpus", "cannot open dataset '" + path + "'");
  return parse_dataset(in, task);
}

inline void write_dataset(std::ostream& out, const std::vector<TaskInstance>& data) {
  for (const auto& inst : data) out << to_json(inst).dump() << '\n';
}

/// Hex digest binding results to the exact dataset content.
inline std::string dataset_digest(const std::vector<TaskInstance>& data) {
  std::ostringstream os;
  write_dataset(os, data);
  return sha256_hex(os.str());
}

// ---------------------------------------------------------------------------
// Sampling

struct SamplePolicy {
  std::size_t max_instances = 250;
  std::size_t max_context_units = 16000;  // code points of rendered context

  void validate() const {
    if (max_instances == 0 || max_context_units == 0) {
      throw Error(ErrorCode::kDomain, "corpus",
                  "sample policy limits must be strictly positive");
    }
  }
};

namespace detail {

// Platform-independent draws: std::mt19937_64 output is fully specified, the
// standard distributions are not.
inline std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

inline std::vector<std::size_t> seeded_permutation(std::size_t n,
                                                   std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[bounded(rng, i)]);
  }
  return idx;
}

}  // namespace detail

/// Drops instances whose rendered context exceeds the budget, then takes a
/// seeded uniform sample of up to `max_instances`. Selected instances keep
/// their input order.
inline std::vector<TaskInstance> sample(const std::vector<TaskInstance>& instances,
                                        const SamplePolicy& policy,
                                        std::uint64_t seed) {
  policy.validate();
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (text::length(rendered_context(instances[i])) <= policy.max_context_units) {
      eligible.push_back(i);
    }
  }
  if (eligible.size() > policy.max_instances) {
    auto perm = detail::seeded_permutation(eligible.size(), seed);
    perm.resize(policy.max_instances);
    std::sort(perm.begin(), perm.end());
    std::vector<std::size_t> chosen;
    for (auto p : perm) chosen.push_back(eligible[p]);
    eligible = std::move(chosen);
  }
  std::vector<TaskInstance> out;
  out.reserve(eligible.size());
  for (auto i : eligible) out.push_back(instances[i]);
  return out;
}

struct ExampleSplit {
  std::vector<TaskInstance> pool;
  std::vector<TaskInstance> eval;
};

/// Holds out `k` seeded-random instances as the demonstration pool; the rest
/// (input order preserved) are evaluated.
inline ExampleSplit split_examples_pool(const std::vector<TaskInstance>& instances,
                                        std::size_t k, std::uint64_t seed) {
  if (k >= instances.size()) {
    throw Error(ErrorCode::kContract, "corpus",
                "examples pool size " + std::to_string(k) +
                    " must be smaller than the " +
                    std::to_string(instances.size()) + " available instances");
  }
  auto perm = detail::seeded_permutation(instances.size(), seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<bool> in_pool(instances.size(), false);
  for (std::size_t i = 0; i < k; ++i) in_pool[perm[i]] = true;
  ExampleSplit split;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    (in_pool[i] ? split.pool : split.eval).push_back(instances[i]);
  }
  return split;
}

}  // namespace selprompt

