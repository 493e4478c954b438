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
#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "json.hpp"
#include "selprompt/error.hpp"
#include "selprompt/hash.hpp"
#include "selprompt/prompting.hpp"
#include "selprompt/store.hpp"
#include "selprompt/translation.hpp"
#include "selprompt/transport.hpp"

namespace selprompt {

struct ModelParams {
  double temperature = 0.0;
  int max_output_units = 512;

  nlohmann::json to_json() const {
    return {{"temperature", temperature}, {"max_output_units", max_output_units}};
  }
};

struct CompletionRecord {
  std::string key;
  std::string response_text;
  double latency_ms = 0.0;
  int attempt_count = 0;
};

/// Stable across processes: provider name, params and prompt text.
inline std::string completion_key(std::string_view provider, const ModelParams& params,
                                  std::string_view prompt_text) {
  return content_key({provider, params.to_json().dump(), prompt_text});
}

struct ProviderReply {
  std::string text;
  int attempts = 1;
};

class ModelProvider {
 public:
  virtual ~ModelProvider() = default;
  virtual std::string name() const = 0;
  virtual ProviderKind kind() const = 0;
  virtual const ModelParams& params() const = 0;
  virtual ProviderReply call(const CompiledPrompt& prompt) = 0;
  /// False when the provider cannot serve anything (an empty replay store).
  virtual bool ready() const { return true; }
};

/// Test provider whose reply is a fixed function of the prompt.
class ScriptedProvider : public ModelProvider {
 public:
  using Script = std::function<std::string(const CompiledPrompt&)>;

  ScriptedProvider(std::string name, Script script, ModelParams params = {})
      : name_(std::move(name)), script_(std::move(script)), params_(params) {}

  std::string name() const override { return name_; }
  ProviderKind kind() const override { return ProviderKind::kScripted; }
  const ModelParams& params() const override { return params_; }
  ProviderReply call(const CompiledPrompt& prompt) override { return {script_(prompt), 1}; }

 private:
  std::string name_;
  Script script_;
  ModelParams params_;
};

/// Replies with the prompt's context block verbatim.
class ScriptedEchoProvider final : public ScriptedProvider {
 public:
  explicit ScriptedEchoProvider(ModelParams params = {})
      : ScriptedProvider(
            "scripted-echo",
            [](const CompiledPrompt& p) { return std::string(p.context_block()); }, params) {}
};

class RecordStore {
 public:
  RecordStore() = default;  // in-memory
  RecordStore(const std::filesystem::path& path, StoreLayout layout) : store_(path, layout) {}

  std::optional<CompletionRecord> find(const std::string& key) const {
    auto rec = store_.get(key);
    if (!rec) return std::nullopt;
    return CompletionRecord{key, rec->at("response_text").get<std::string>(),
                            rec->value("latency_ms", 0.0), rec->value("attempt_count", 0)};
  }

  CompletionRecord record(const std::string& provider, const ModelParams& params,
                          const std::string& prompt_text, const CompletionRecord& r) {
    nlohmann::json j{{"provider", provider},
                     {"params", params.to_json()},
                     {"prompt_sha256", sha256_hex(prompt_text)},
                     {"response_text", r.response_text},
                     {"latency_ms", r.latency_ms},
                     {"attempt_count", r.attempt_count},
                     {"timestamp", utc_timestamp()}};
    auto stored = store_.put_if_absent(r.key, std::move(j));
    return CompletionRecord{r.key, stored.at("response_text").get<std::string>(),
                            stored.value("latency_ms", 0.0), stored.value("attempt_count", 0)};
  }

  std::size_t size() const { return store_.size(); }

 private:
  KeyedStore store_;
};

/// Serves responses recorded earlier for `recorded_name`; never touches the
/// network.
class ReplayProvider final : public ModelProvider {
 public:
  ReplayProvider(std::string recorded_name, std::shared_ptr<const RecordStore> records,
                 ModelParams params = {})
      : name_(std::move(recorded_name)), records_(std::move(records)), params_(params) {}

  std::string name() const override { return name_; }
  ProviderKind kind() const override { return ProviderKind::kReplay; }
  const ModelParams& params() const override { return params_; }
  bool ready() const override { return records_ && records_->size() > 0; }

  ProviderReply call(const CompiledPrompt& prompt) override {
    auto key = completion_key(name_, params_, prompt.text);
    if (auto r = records_->find(key)) return {r->response_text, 0};
    throw Error(ErrorCode::kReplayMiss, "gateway",
                "no recorded completion for key " + key.substr(0, 16) + " (" + name_ + ")");
  }

 private:
  std::string name_;
  std::shared_ptr<const RecordStore> records_;
  ModelParams params_;
};

struct EndpointConfig {
  std::string model;            // model identifier sent to the vendor
  std::string base_url;
  std::string credential_env;   // e.g. SELPROMPT_OPENAI_KEY
};

/// Chat-completions shape shared by OpenAI and compatible servers.
class OpenAiChatProvider final : public ModelProvider {
 public:
  OpenAiChatProvider(EndpointConfig cfg, std::shared_ptr<HttpTransport> transport,
                     ModelParams params = {}, RetryPolicy retry = {})
      : cfg_(std::move(cfg)), transport_(std::move(transport)), params_(params),
        retry_(std::move(retry)) {}

  std::string name() const override { return cfg_.model; }
  ProviderKind kind() const override { return ProviderKind::kRemoteHttp; }
  const ModelParams& params() const override { return params_; }

  ProviderReply call(const CompiledPrompt& prompt) override {
    Headers h;
    if (auto key = credential_from_env(cfg_.credential_env); !key.empty()) {
      h["Authorization"] = "Bearer " + key;
    }
    nlohmann::json body{{"model", cfg_.model},
                        {"messages", {{{"role", "user"}, {"content", prompt.text}}}},
                        {"temperature", params_.temperature},
                        {"max_tokens", params_.max_output_units}};
    auto res = post_with_retries(*transport_, retry_, "gateway", cfg_.base_url,
                                 "/v1/chat/completions", h, body.dump());
    try {
      auto j = nlohmann::json::parse(res.response.body);
      return {j.at("choices").at(0).at("message").at("content").get<std::string>(), res.attempts};
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kTransport, "gateway", "unexpected chat response: " + std::string(e.what()));
    }
  }

 private:
  EndpointConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  ModelParams params_;
  RetryPolicy retry_;
};

/// generateContent shape.
class GeminiProvider final : public ModelProvider {
 public:
  GeminiProvider(EndpointConfig cfg, std::shared_ptr<HttpTransport> transport,
                 ModelParams params = {}, RetryPolicy retry = {})
      : cfg_(std::move(cfg)), transport_(std::move(transport)), params_(params),
        retry_(std::move(retry)) {}

  std::string name() const override { return cfg_.model; }
  ProviderKind kind() const override { return ProviderKind::kRemoteHttp; }
  const ModelParams& params() const override { return params_; }

  ProviderReply call(const CompiledPrompt& prompt) override {
    Headers h;
    if (auto key = credential_from_env(cfg_.credential_env); !key.empty()) {
      h["x-goog-api-key"] = key;
    }
    nlohmann::json body{
        {"contents", {{{"parts", {{{"text", prompt.text}}}}}}},
        {"generationConfig",
         {{"temperature", params_.temperature}, {"maxOutputTokens", params_.max_output_units}}}};
    auto res = post_with_retries(*transport_, retry_, "gateway", cfg_.base_url,
                                 "/v1beta/models/" + cfg_.model + ":generateContent", h, body.dump());
    try {
      auto j = nlohmann::json::parse(res.response.body);
      return {j.at("candidates").at(0).at("content").at("parts").at(0).at("text").get<std::string>(),
              res.attempts};
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kTransport, "gateway",
                  "unexpected generateContent response: " + std::string(e.what()));
    }
  }

 private:
  EndpointConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  ModelParams params_;
  RetryPolicy retry_;
};

/// Bounds in-flight requests and spaces request starts.
class RateLimiter {
 public:
  RateLimiter(std::size_t max_in_flight, std::chrono::milliseconds min_spacing)
      : max_in_flight_(std::max<std::size_t>(1, max_in_flight)), min_spacing_(min_spacing) {}

  class Permit {
   public:
    explicit Permit(RateLimiter* l) : l_(l) {}
    Permit(Permit&& o) noexcept : l_(std::exchange(o.l_, nullptr)) {}
    Permit(const Permit&) = delete;
    ~Permit() {
      if (l_) l_->release();
    }

   private:
    RateLimiter* l_;
  };

  Permit acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
    peak_ = std::max(peak_, in_flight_);
    auto now = std::chrono::steady_clock::now();
    auto start = std::max(now, next_start_);
    next_start_ = start + min_spacing_;
    lock.unlock();
    if (start > now) std::this_thread::sleep_until(start);
    return Permit(this);
  }

  std::size_t peak_in_flight() const {
    std::lock_guard lock(mu_);
    return peak_;
  }

 private:
  void release() {
    {
      std::lock_guard lock(mu_);
      --in_flight_;
    }
    cv_.notify_one();
  }

  std::size_t max_in_flight_;
  std::chrono::milliseconds min_spacing_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::size_t peak_ = 0;
  std::chrono::steady_clock::time_point next_start_{};
};

/// Stored response when the key is known; otherwise calls the provider
/// (through the limiter for remote providers) and records the reply.
inline CompletionRecord complete(const CompiledPrompt& prompt, ModelProvider& provider,
                                 RecordStore* store, RateLimiter* limiter = nullptr) {
  auto key = completion_key(provider.name(), provider.params(), prompt.text);
  if (store) {
    if (auto hit = store->find(key)) return *hit;
  }
  auto t0 = std::chrono::steady_clock::now();
  ProviderReply reply;
  if (limiter && provider.kind() == ProviderKind::kRemoteHttp) {
    auto permit = limiter->acquire();
    reply = provider.call(prompt);
  } else {
    reply = provider.call(prompt);
  }
  CompletionRecord rec{key, reply.text,
                       std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                           .count(),
                       reply.attempts};
  if (store && provider.kind() != ProviderKind::kReplay) {
    return store->record(provider.name(), provider.params(), prompt.text, rec);
  }
  return rec;
}

}  // namespace selprompt
