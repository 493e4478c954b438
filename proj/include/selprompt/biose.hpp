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

// BIOSE entity labels (Begin/Inside/End/Single/Outside) and their span form.

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selprompt/error.hpp"
#include "selprompt/text.hpp"

namespace selprompt {

enum class EntityType { kPER, kORG, kLOC };

inline std::string_view to_string(EntityType t) {
  switch (t) {
    case EntityType::kPER: return "PER";
    case EntityType::kORG: return "ORG";
    case EntityType::kLOC: return "LOC";
  }
  return "?";
}

inline std::optional<EntityType> parse_entity_type(std::string_view s) {
  auto u = text::ascii_upper(text::trim(s));
  if (u == "PER" || u == "PERSON") return EntityType::kPER;
  if (u == "ORG" || u == "ORGANIZATION" || u == "ORGANISATION")
    return EntityType::kORG;
  if (u == "LOC" || u == "LOCATION") return EntityType::kLOC;
  return std::nullopt;
}

/// Inclusive token range [start, end] tagged with an entity type.
struct EntitySpan {
  EntityType type = EntityType::kPER;
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const EntitySpan&) const = default;
  bool operator==(const EntitySpan&) const = default;
};

struct BioseLabel {
  char prefix = 'O';  // one of B, I, E, S, O
  EntityType type = EntityType::kPER;
};

inline std::optional<BioseLabel> parse_biose_label(std::string_view s) {
  if (s == "O") return BioseLabel{};
  if (s.size() < 3 || s[1] != '-') return std::nullopt;
  char p = s[0];
  if (p != 'B' && p != 'I' && p != 'E' && p != 'S') return std::nullopt;
  auto t = s.substr(2);
  if (t != "PER" && t != "ORG" && t != "LOC") return std::nullopt;
  return BioseLabel{p, *parse_entity_type(t)};
}

inline bool is_valid_biose_label(std::string_view s) {
  return parse_biose_label(s).has_value();
}

/// Decodes a BIOSE sequence into spans. Returns nullopt when the sequence is
/// not well formed (an I or E without an open B of the same type, a B that
/// is never closed, or an unknown label).
inline std::optional<std::vector<EntitySpan>> try_decode_biose(
    const std::vector<std::string>& labels) {
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> open;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto l = parse_biose_label(labels[i]);
    if (!l) return std::nullopt;
    switch (l->prefix) {
      case 'O':
      case 'S':
        if (open) return std::nullopt;
        if (l->prefix == 'S') spans.push_back({l->type, i, i});
        break;
      case 'B':
        if (open) return std::nullopt;
        open = EntitySpan{l->type, i, i};
        break;
      case 'I':
        if (!open || open->type != l->type) return std::nullopt;
        break;
      case 'E':
        if (!open || open->type != l->type) return std::nullopt;
        open->end = i;
        spans.push_back(*open);
        open.reset();
        break;
    }
  }
  if (open) return std::nullopt;
  return spans;
}

inline bool is_well_formed_biose(const std::vector<std::string>& labels) {
  return try_decode_biose(labels).has_value();
}

inline std::vector<EntitySpan> decode_biose(const std::vector<std::string>& labels) {
  auto spans = try_decode_biose(labels);
  if (!spans) {
    throw Error(ErrorCode::kContract, "biose",
                "label sequence is not well-formed BIOSE");
  }
  return *spans;
}

/// Labels for `length` tokens carrying the given non-overlapping spans.
inline std::vector<std::string> encode_biose(std::size_t length,
                                             const std::vector<EntitySpan>& spans) {
  std::vector<std::string> labels(length, "O");
  for (const auto& s : spans) {
    if (s.start > s.end || s.end >= length) {
      throw Error(ErrorCode::kContract, "biose", "span outside the sentence");
    }
    for (std::size_t i = s.start; i <= s.end; ++i) {
      if (labels[i] != "O") {
        throw Error(ErrorCode::kContract, "biose", "overlapping spans");
      }
    }
    std::string t(to_string(s.type));
    if (s.start == s.end) {
      labels[s.start] = "S-" + t;
      continue;
    }
    labels[s.start] = "B-" + t;
    for (std::size_t i = s.start + 1; i < s.end; ++i) labels[i] = "I-" + t;
    labels[s.end] = "E-" + t;
  }
  return labels;
}

/// Converts IOB2 / IOB1 tags ("B-PER", "I-PER", "O") into BIOSE. Entity
/// types outside PER/ORG/LOC become O.
inline std::vector<std::string> bio_to_biose(const std::vector<std::string>& tags) {
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> open;
  auto close = [&] {
    if (open) spans.push_back(*open);
    open.reset();
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto& tag = tags[i];
    if (tag == "O" || tag.size() < 3 || tag[1] != '-') {
      close();
      continue;
    }
    auto type = parse_entity_type(tag.substr(2));
    if (!type) {
      close();
      continue;
    }
    char p = tag[0];
    bool continues = (p == 'I' || p == 'E') && open && open->type == *type;
    if (continues) {
      open->end = i;
    } else {
      close();
      open = EntitySpan{*type, i, i};
    }
    if (p == 'E' || p == 'S') close();
  }
  close();
  return encode_biose(tags.size(), spans);
}

}  // namespace selprompt
