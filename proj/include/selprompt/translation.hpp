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

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"
#include "selprompt/error.hpp"
#include "selprompt/hash.hpp"
#include "selprompt/store.hpp"
#include "selprompt/text.hpp"
#include "selprompt/transport.hpp"

namespace selprompt {

struct TranslationRequest {
  std::string text;
  std::string source_lang;
  std::string target_lang;

  bool identity() const {
    return text::ascii_lower(source_lang) == text::ascii_lower(target_lang);
  }
};

enum class ProviderKind { kRemoteHttp, kMock, kReplay, kScripted };

inline std::string_view to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::kRemoteHttp: return "remote-http";
    case ProviderKind::kMock: return "mock";
    case ProviderKind::kReplay: return "replay";
    case ProviderKind::kScripted: return "scripted";
  }
  return "?";
}

class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  virtual std::string name() const = 0;
  virtual ProviderKind kind() const = 0;
  /// Raw provider call; caching and the identity short-circuit live in
  /// translate().
  virtual std::string translate_text(const TranslationRequest& req) = 0;
};

/// Offline translator: tags text as "⟦src→tgt⟧text". A request whose text
/// already carries the inverse tag is untagged instead, so a round trip
/// through the mock is the identity.
class MockTranslator final : public TranslationProvider {
 public:
  static std::string tag(std::string_view src, std::string_view tgt) {
    return "⟦" + std::string(src) + "→" + std::string(tgt) + "⟧";
  }

  std::string name() const override { return "mock"; }
  ProviderKind kind() const override { return ProviderKind::kMock; }

  std::string translate_text(const TranslationRequest& req) override {
    auto inverse = tag(req.target_lang, req.source_lang);
    if (req.text.rfind(inverse, 0) == 0) return req.text.substr(inverse.size());
    return tag(req.source_lang, req.target_lang) + req.text;
  }
};

/// Cache key: provider name, both languages and the text's hash.
inline std::string translation_key(std::string_view provider, const TranslationRequest& req) {
  return content_key({provider, text::ascii_lower(req.source_lang),
                      text::ascii_lower(req.target_lang), sha256_hex(req.text)});
}

class TranslationCache {
 public:
  TranslationCache() = default;  // in-memory
  TranslationCache(const std::filesystem::path& path, StoreLayout layout)
      : store_(path, layout) {}

  std::optional<std::string> lookup(std::string_view provider,
                                    const TranslationRequest& req) const {
    auto rec = store_.get(translation_key(provider, req));
    if (!rec) return std::nullopt;
    return rec->at("translation").get<std::string>();
  }

  std::string insert(std::string_view provider, const TranslationRequest& req,
                     const std::string& translation) {
    nlohmann::json rec{{"provider", provider},
                       {"source", req.source_lang},
                       {"target", req.target_lang},
                       {"text_sha256", sha256_hex(req.text)},
                       {"translation", translation},
                       {"timestamp", utc_timestamp()}};
    auto stored = store_.put_if_absent(translation_key(provider, req), std::move(rec));
    return stored.at("translation").get<std::string>();
  }

  std::size_t size() const { return store_.size(); }
  KeyedStore& store() { return store_; }

 private:
  KeyedStore store_;
};

/// Serves translations recorded earlier under `recorded_name`. Never
/// contacts a network; a miss is an error.
class ReplayTranslator final : public TranslationProvider {
 public:
  ReplayTranslator(std::string recorded_name, std::shared_ptr<TranslationCache> recorded)
      : name_(std::move(recorded_name)), recorded_(std::move(recorded)) {}

  std::string name() const override { return name_; }
  ProviderKind kind() const override { return ProviderKind::kReplay; }

  std::string translate_text(const TranslationRequest& req) override {
    if (auto hit = recorded_->lookup(name_, req)) return *hit;
    throw Error(ErrorCode::kReplayMiss, "translation",
                "no recorded translation for " + req.source_lang + "->" + req.target_lang +
                    " text sha256 " + sha256_hex(req.text).substr(0, 16));
  }

 private:
  std::string name_;
  std::shared_ptr<TranslationCache> recorded_;
};

struct HttpTranslatorConfig {
  std::string name = "http-mt";
  std::string base_url;
  std::string path = "/translate";
  std::string credential_env;                    // e.g. SELPROMPT_GOOGLE_KEY
  std::string response_pointer = "/translation";  // JSON pointer into reply
};

/// Generic vendor adapter: POST {text, source, target}; the translated text
/// is read from `response_pointer`.
class HttpTranslator final : public TranslationProvider {
 public:
  HttpTranslator(HttpTranslatorConfig cfg, std::shared_ptr<HttpTransport> transport,
                 RetryPolicy retry = {})
      : cfg_(std::move(cfg)), transport_(std::move(transport)), retry_(std::move(retry)) {}

  std::string name() const override { return cfg_.name; }
  ProviderKind kind() const override { return ProviderKind::kRemoteHttp; }

  std::string translate_text(const TranslationRequest& req) override {
    Headers headers;
    if (!cfg_.credential_env.empty()) {
      auto key = credential_from_env(cfg_.credential_env);
      if (!key.empty()) headers["Authorization"] = "Bearer " + key;
    }
    nlohmann::json body{{"text", req.text}, {"source", req.source_lang}, {"target", req.target_lang}};
    auto res = post_with_retries(*transport_, retry_, "translation", cfg_.base_url, cfg_.path,
                                 headers, body.dump());
    try {
      auto j = nlohmann::json::parse(res.response.body);
      return j.at(nlohmann::json::json_pointer(cfg_.response_pointer)).get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kTransport, "translation",
                  "unexpected response from " + cfg_.name + ": " + e.what());
    }
  }

 private:
  HttpTranslatorConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy retry_;
};

/// Identity requests return verbatim; otherwise cache, then provider.
inline std::string translate(const TranslationRequest& req, TranslationProvider& provider,
                             TranslationCache* cache) {
  if (req.identity()) return req.text;
  auto name = provider.name();
  if (cache) {
    if (auto hit = cache->lookup(name, req)) return *hit;
  }
  auto out = provider.translate_text(req);
  if (cache) return cache->insert(name, req, out);
  return out;
}

inline std::string back_translate(const std::string& output, const std::string& from_lang,
                                  const std::string& to_lang, TranslationProvider& provider,
                                  TranslationCache* cache) {
  return translate({output, from_lang, to_lang}, provider, cache);
}

}  // namespace selprompt
