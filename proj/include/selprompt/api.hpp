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

// Request handlers shared by the HTTP service and the command line. Both
// print Service results with body(), so identical requests give identical
// bytes.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "selprompt/config_space.hpp"
#include "selprompt/corpus.hpp"
#include "selprompt/error.hpp"
#include "selprompt/paths.hpp"
#include "selprompt/prompting.hpp"
#include "selprompt/recommend.hpp"
#include "selprompt/translation.hpp"

namespace selprompt {

/// Serialized response body, newline terminated.
inline std::string body(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline nlohmann::json error_body(const Error& e) {
  return {{"code", to_string(e.code())}, {"message", e.detail()}, {"module", e.module()}};
}

/// Validation problems are the caller's (4xx); provider and storage failures
/// are ours (5xx).
inline int http_status_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kTransport:
    case ErrorCode::kReplayMiss: return 502;
    case ErrorCode::kIo: return 500;
    case ErrorCode::kContract:
    case ErrorCode::kUndefinedCorrelation:
    case ErrorCode::kUndefinedImprovement: return 422;
    default: return 400;
  }
}

namespace detail {

inline std::string require_field(const nlohmann::json& j, const char* name) {
  if (!j.is_object() || !j.contains(name) || !j[name].is_string()) {
    throw Error(ErrorCode::kSchema, "api", std::string("field '") + name + "' must be a string");
  }
  return j[name].get<std::string>();
}

inline std::string optional_field(const nlohmann::json& j, const char* name,
                                  const std::string& fallback = "") {
  if (!j.contains(name) || j[name].is_null()) return fallback;
  if (!j[name].is_string()) {
    throw Error(ErrorCode::kSchema, "api", std::string("field '") + name + "' must be a string");
  }
  return j[name].get<std::string>();
}

}  // namespace detail

/// Builds an instance from a request payload. Gold fields are optional
/// here since prompts never show the instance's own answer.
inline TaskInstance instance_from_input(const nlohmann::json& in, TaskKind task,
                                        const std::string& language) {
  if (!in.is_object()) throw Error(ErrorCode::kSchema, "api", "field 'input' must be an object");
  TaskInstance inst;
  inst.id = detail::optional_field(in, "id", "input");
  inst.language = language;
  switch (task) {
    case TaskKind::kQA: {
      QaPayload p;
      p.question = detail::require_field(in, "question");
      p.context = detail::require_field(in, "context");
      if (text::trim(p.context).empty()) throw Error(ErrorCode::kSchema, "api", "field 'context' is empty");
      inst.payload = p;
      break;
    }
    case TaskKind::kNER: {
      NerPayload p;
      if (in.contains("tokens")) {
        p.tokens = in["tokens"].get<std::vector<std::string>>();
      } else {
        p.tokens = text::split_whitespace(detail::require_field(in, "sentence"));
      }
      if (p.tokens.empty()) throw Error(ErrorCode::kSchema, "api", "sentence has no tokens");
      p.tags.assign(p.tokens.size(), "O");
      inst.payload = p;
      break;
    }
    case TaskKind::kNLI: {
      NliPayload p;
      p.premise = detail::require_field(in, "premise");
      p.hypothesis = detail::require_field(in, "hypothesis");
      inst.payload = p;
      break;
    }
    case TaskKind::kSUM: {
      SumPayload p;
      p.document = in.contains("document") ? detail::require_field(in, "document")
                                           : detail::require_field(in, "text");
      inst.payload = p;
      break;
    }
  }
  return inst;
}

/// Copy of `inst` with every text field moved into `to_lang`.
inline TaskInstance translate_instance(const TaskInstance& inst, const std::string& to_lang,
                                       TranslationProvider& translator, TranslationCache* cache) {
  auto tr = [&](const std::string& s) { return translate({s, inst.language, to_lang}, translator, cache); };
  TaskInstance out = inst;
  out.language = to_lang;
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, QaPayload>) {
          p.question = tr(p.question);
          p.context = tr(p.context);
          for (auto& a : p.answers) a = tr(a);
        } else if constexpr (std::is_same_v<T, NerPayload>) {
          // Token-wise keeps the tag alignment.
          for (auto& t : p.tokens) t = tr(t);
        } else if constexpr (std::is_same_v<T, NliPayload>) {
          p.premise = tr(p.premise);
          p.hypothesis = tr(p.hypothesis);
        } else {
          p.document = tr(p.document);
          p.reference_summary = tr(p.reference_summary);
        }
      },
      out.payload);
  return out;
}

class Service {
 public:
  struct Resources {
    LanguageRegistry registry;
    RecommendationTable recommendations;
    TemplateSet templates;
    std::map<TaskKind, std::vector<TaskInstance>> demo_pools;  // English

    static Resources load_default() {
      Resources r;
      r.registry = LanguageRegistry::load(data_file("languages.jsonl").string());
      r.recommendations = RecommendationTable::load_default();
      r.templates = TemplateSet::load_default();
      for (auto t : kAllTasks) {
        auto path = data_file("demos/" + text::ascii_lower(to_string(t)) + ".jsonl");
        if (std::filesystem::exists(path)) r.demo_pools[t] = load_dataset(path.string(), t);
      }
      return r;
    }
  };

  Service(Resources res, std::shared_ptr<TranslationProvider> translator,
          std::shared_ptr<TranslationCache> cache = std::make_shared<TranslationCache>())
      : res_(std::move(res)), translator_(std::move(translator)), cache_(std::move(cache)) {}

  const Resources& resources() const { return res_; }

  nlohmann::json configs(const std::string& task_name) const {
    auto task = parse_task(task_name);
    nlohmann::json codes = nlohmann::json::array();
    for (const auto& c : enumerate_configurations(task)) codes.push_back(c.code());
    return {{"task", to_string(task)}, {"count", codes.size()}, {"configs", codes}};
  }

  nlohmann::json languages() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& l : res_.registry.all()) out.push_back(to_json(l));
    return {{"languages", out}};
  }

  nlohmann::json recommend(const nlohmann::json& req) const {
    auto task = parse_task(detail::require_field(req, "task"));
    auto lang = detail::require_field(req, "language");
    auto model = detail::require_field(req, "model");
    return to_json(selprompt::recommend(task, lang, model, res_.registry, res_.recommendations));
  }

  /// {task, config_code, language, input, k?, demos?}. Few-shot codes take
  /// `demos` when given, else the first k bundled demonstrations moved into
  /// the request language.
  nlohmann::json prompt(const nlohmann::json& req) {
    if (!req.is_object()) throw Error(ErrorCode::kSchema, "api", "request body must be an object");
    auto task = parse_task(detail::require_field(req, "task"));
    auto config = parse_config_code(detail::require_field(req, "config_code"), task);
    auto lang = detail::require_field(req, "language");
    res_.registry.at(lang);
    if (!req.contains("input")) throw Error(ErrorCode::kSchema, "api", "field 'input' is required");
    auto inst = instance_from_input(req["input"], task, lang);

    std::vector<TaskInstance> demos;
    if (req.contains("demos") && !req["demos"].is_null()) {
      if (!req["demos"].is_array()) throw Error(ErrorCode::kSchema, "api", "field 'demos' must be an array");
      std::size_t i = 0;
      for (auto d : req["demos"]) {
        if (d.is_object() && !d.contains("language")) d["language"] = lang;
        if (d.is_object() && !d.contains("id")) d["id"] = "demo-" + std::to_string(i);
        demos.push_back(parse_instance(d, task, i++));
      }
    } else if (!config.zero_shot()) {
      long k = req.value("k", 1L);
      if (k < 1) throw Error(ErrorCode::kSchema, "api", "k must be at least 1 for a few-shot configuration");
      auto it = res_.demo_pools.find(task);
      std::size_t have = it == res_.demo_pools.end() ? 0 : it->second.size();
      if (static_cast<std::size_t>(k) > have) {
        throw Error(ErrorCode::kContract, "api",
                    "k=" + std::to_string(k) + " but only " + std::to_string(have) +
                        " bundled demonstrations exist for " + std::string(to_string(task)));
      }
      std::lock_guard lock(mu_);
      for (long i = 0; i < k; ++i) {
        demos.push_back(translate_instance(it->second[static_cast<std::size_t>(i)], lang, *translator_,
                                           cache_.get()));
      }
    }
    std::lock_guard lock(mu_);
    CompileContext ctx{*translator_, cache_.get(), &res_.registry, &res_.templates};
    return to_json(compile(config, inst, demos, lang, ctx));
  }

 private:
  Resources res_;
  std::shared_ptr<TranslationProvider> translator_;
  std::shared_ptr<TranslationCache> cache_;
  std::mutex mu_;  // the translator may not be thread-safe
};

/// Runs `fn` and turns failures into the structured error body.
template <typename Fn>
void respond(httplib::Response& res, Fn&& fn) {
  try {
    res.set_content(body(fn()), "application/json; charset=utf-8");
    res.status = 200;
  } catch (const Error& e) {
    res.status = http_status_for(e.code());
    res.set_content(body(error_body(e)), "application/json; charset=utf-8");
  } catch (const nlohmann::json::exception& e) {
    res.status = 400;
    res.set_content(body(error_body(Error(ErrorCode::kParse, "api", e.what()))),
                    "application/json; charset=utf-8");
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(body(error_body(Error(ErrorCode::kIo, "api", e.what()))),
                    "application/json; charset=utf-8");
  }
}

inline void install_routes(httplib::Server& server, Service& svc) {
  auto parse_body = [](const httplib::Request& req) {
    try {
      return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse, "api", std::string("request body: ") + e.what());
    }
  };
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    respond(res, [] { return nlohmann::json{{"status", "ok"}}; });
  });
  server.Get("/v1/configs", [&svc](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] {
      if (!req.has_param("task")) throw Error(ErrorCode::kSchema, "api", "query parameter 'task' is required");
      return svc.configs(req.get_param_value("task"));
    });
  });
  server.Get("/v1/languages", [&svc](const httplib::Request&, httplib::Response& res) {
    respond(res, [&] { return svc.languages(); });
  });
  server.Post("/v1/recommend", [&svc, parse_body](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return svc.recommend(parse_body(req)); });
  });
  server.Post("/v1/prompt", [&svc, parse_body](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return svc.prompt(parse_body(req)); });
  });
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

}  // namespace selprompt
