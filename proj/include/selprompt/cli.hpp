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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "selprompt/analysis.hpp"
#include "selprompt/api.hpp"
#include "selprompt/convert.hpp"
#include "selprompt/gateway.hpp"
#include "selprompt/metrics.hpp"
#include "selprompt/paths.hpp"
#include "selprompt/postproc.hpp"
#include "selprompt/recommend.hpp"
#include "selprompt/runner.hpp"

namespace selprompt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStore = 3;

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kIo: return kExitStore;
    case ErrorCode::kParse:
    case ErrorCode::kSchema:
    case ErrorCode::kDomain:
    case ErrorCode::kNotFound:
    case ErrorCode::kContract:
    case ErrorCode::kNerLengthMismatch: return kExitConfig;
    default: return kExitFailure;
  }
}

enum class OutputFormat { kText, kStructured };

namespace cli {

inline std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

inline std::filesystem::path cache_dir_or(const std::filesystem::path& fallback) {
  auto c = env_or("SELPROMPT_CACHE_DIR", "");
  return c.empty() ? fallback : std::filesystem::path(c);
}

inline std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

inline std::string signed_pct(double v) {
  std::ostringstream s;
  s << (v >= 0 ? "+" : "") << std::fixed << std::setprecision(1) << v << "%";
  return s.str();
}

inline std::string render_itemset(const Itemset& s) { return "{" + text::join(s, ", ") + "}"; }

struct TranslatorOptions {
  std::string kind = "mock";  // mock | replay | http
  std::string name = "http-mt";
  std::string replay_dir;
};

struct Translators {
  std::shared_ptr<TranslationProvider> provider;
  std::shared_ptr<TranslationCache> cache;
};

inline Translators make_translator(const TranslatorOptions& o, const std::filesystem::path& work_dir) {
  Translators t;
  if (o.kind == "mock") {
    t.provider = std::make_shared<MockTranslator>();
    t.cache = std::make_shared<TranslationCache>();
  } else if (o.kind == "replay") {
    if (o.replay_dir.empty()) throw Error(ErrorCode::kParse, "cli", "--translator replay needs --replay-dir");
    auto path = std::filesystem::path(o.replay_dir) / "translations.jsonl";
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kContract, "cli", "no recorded translations at " + path.string());
    }
    t.cache = std::make_shared<TranslationCache>(path, StoreLayout::kLineFile);
    t.provider = std::make_shared<ReplayTranslator>(o.name, t.cache);
  } else if (o.kind == "http") {
    HttpTranslatorConfig cfg;
    cfg.name = o.name;
    cfg.base_url = env_or("SELPROMPT_MT_URL", "");
    cfg.credential_env = "SELPROMPT_MT_KEY";
    if (cfg.base_url.empty()) throw Error(ErrorCode::kParse, "cli", "SELPROMPT_MT_URL is not set");
    t.provider = std::make_shared<HttpTranslator>(cfg, std::make_shared<HttplibTransport>());
    auto dir = cache_dir_or(work_dir);
    std::filesystem::create_directories(dir);
    t.cache = std::make_shared<TranslationCache>(dir / "translations.jsonl", StoreLayout::kLineFile);
  } else {
    throw Error(ErrorCode::kParse, "cli", "unknown translator '" + o.kind + "' (mock, replay, http)");
  }
  return t;
}

struct ModelOptions {
  std::string provider = "scripted-echo";  // scripted-echo | openai | gemini | replay
  std::string model;
  std::string base_url;
  std::string replay_dir;
  double temperature = 0.0;
  int max_output = 512;
};

struct Models {
  std::shared_ptr<ModelProvider> provider;
  std::shared_ptr<RecordStore> records;
};

inline Models make_model(const ModelOptions& o, const std::filesystem::path& work_dir) {
  Models m;
  ModelParams params{o.temperature, o.max_output};
  if (o.provider == "scripted-echo") {
    m.provider = std::make_shared<ScriptedEchoProvider>(params);
    m.records = std::make_shared<RecordStore>();
  } else if (o.provider == "replay") {
    if (o.replay_dir.empty()) throw Error(ErrorCode::kParse, "cli", "--provider replay needs --replay-dir");
    if (o.model.empty()) throw Error(ErrorCode::kParse, "cli", "--provider replay needs --model");
    auto path = std::filesystem::path(o.replay_dir) / "completions.jsonl";
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kContract, "cli", "replay store " + path.string() + " is not seeded");
    }
    auto store = std::make_shared<RecordStore>(path, StoreLayout::kLineFile);
    m.provider = std::make_shared<ReplayProvider>(o.model, store, params);
  } else if (o.provider == "openai" || o.provider == "gemini") {
    if (o.model.empty()) throw Error(ErrorCode::kParse, "cli", "--provider " + o.provider + " needs --model");
    const bool openai = o.provider == "openai";
    EndpointConfig cfg;
    cfg.model = o.model;
    cfg.credential_env = openai ? "SELPROMPT_OPENAI_KEY" : "SELPROMPT_GEMINI_KEY";
    cfg.base_url = !o.base_url.empty()
                       ? o.base_url
                       : env_or(openai ? "SELPROMPT_OPENAI_BASE_URL" : "SELPROMPT_GEMINI_BASE_URL",
                                openai ? "https://api.openai.com"
                                       : "https://generativelanguage.googleapis.com");
    auto transport = std::make_shared<HttplibTransport>();
    if (openai) {
      m.provider = std::make_shared<OpenAiChatProvider>(cfg, transport, params);
    } else {
      m.provider = std::make_shared<GeminiProvider>(cfg, transport, params);
    }
    auto dir = cache_dir_or(work_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cli", "cannot create cache dir " + dir.string());
    m.records = std::make_shared<RecordStore>(dir / "completions.jsonl", StoreLayout::kLineFile);
  } else {
    throw Error(ErrorCode::kParse, "cli",
                "unknown provider '" + o.provider + "' (scripted-echo, openai, gemini, replay)");
  }
  return m;
}

inline ResultTable load_results(const std::string& path, std::ostream& err) {
  if (std::filesystem::is_directory(path)) {
    auto agg = aggregate_run(path);
    for (const auto& w : agg.warnings) err << "warning: " << w << "\n";
    return agg.table;
  }
  return ResultTable::load(path);
}

inline ResultTable filter_table(const ResultTable& t, const std::string& task, const std::string& model,
                                const std::string& lang) {
  ResultTable out;
  for (const auto& r : t.rows()) {
    if (!task.empty() && r.task != parse_task(task)) continue;
    if (!model.empty() && text::ascii_lower(r.model) != text::ascii_lower(model)) continue;
    if (!lang.empty() && text::ascii_lower(r.language) != text::ascii_lower(lang)) continue;
    out.add(r);
  }
  return out;
}

inline TokenizerTable default_tokenizers() {
  auto p = data_file("tokenizers.tsv");
  return std::filesystem::exists(p) ? TokenizerTable::load(p.string()) : TokenizerTable{};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cli", "cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace cli

/// Entry point for the `selprompt` binary; returns the process exit code.
inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Selective pre-translation toolkit for multilingual prompt evaluation", "selprompt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string format_name = "text";
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format_name, "text or structured")
        ->check(CLI::IsMember({"text", "structured"}));
  };
  auto structured = [&] { return format_name == "structured"; };

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run every configuration over a sampled dataset");
  std::string task, lang, model, dataset, config_list = "all", out_dir = "run", results, profile = "appendixB";
  std::uint64_t seed = 0;
  std::size_t shots = 1, workers = 4, max_instances = 250, max_context = 16000;
  std::optional<std::size_t> stop_after;
  cli::ModelOptions mopt;
  cli::TranslatorOptions topt;
  auto add_translator = [&](CLI::App* sub) {
    sub->add_option("--translator", topt.kind, "mock, replay or http");
    sub->add_option("--translator-name", topt.name, "recorded translator name for replay/http");
  };
  sweep_cmd->add_option("--task", task, "qa, ner, nli or sum")->required();
  sweep_cmd->add_option("--lang", lang, "source language code")->required();
  sweep_cmd->add_option("--dataset", dataset, "unified line-delimited dataset")->required();
  sweep_cmd->add_option("--model", mopt.model, "model identifier");
  sweep_cmd->add_option("--provider", mopt.provider, "scripted-echo, openai, gemini or replay");
  sweep_cmd->add_option("--base-url", mopt.base_url, "override the provider endpoint");
  sweep_cmd->add_option("--replay-dir", mopt.replay_dir, "directory holding completions.jsonl / translations.jsonl");
  sweep_cmd->add_option("--config", config_list, "comma-separated codes, all, zero-shot or few-shot");
  sweep_cmd->add_option("--seed", seed, "sampling seed");
  sweep_cmd->add_option("--shots", shots, "demonstrations per few-shot prompt");
  sweep_cmd->add_option("--workers", workers, "concurrent cells");
  sweep_cmd->add_option("--max-instances", max_instances, "sample size cap");
  sweep_cmd->add_option("--max-context", max_context, "context length budget in characters");
  sweep_cmd->add_option("--temperature", mopt.temperature);
  sweep_cmd->add_option("--max-output", mopt.max_output, "output length cap");
  sweep_cmd->add_option("--out", out_dir, "run directory");
  sweep_cmd->add_option("--stop-after", stop_after, "write at most N new records, then stop")
      ->group("");
  add_translator(sweep_cmd);
  add_format(sweep_cmd);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Top configurations, improvements and correlations");
  std::string direct_code = "SSZS", pretranslate_code = "EEEE";
  analyze_cmd->add_option("--results", results, "result table (csv/jsonl) or run directory")->required();
  analyze_cmd->add_option("--task", task);
  analyze_cmd->add_option("--model", model);
  analyze_cmd->add_option("--lang", lang);
  analyze_cmd->add_option("--direct", direct_code, "direct-inference baseline code");
  analyze_cmd->add_option("--pretranslate", pretranslate_code, "pre-translation baseline code");
  add_format(analyze_cmd);

  // mine
  auto* mine_cmd = app.add_subcommand("mine", "Bin scores and mine association rules");
  std::string consequent, derive_family;
  mine_cmd->add_option("--results", results)->required();
  mine_cmd->add_option("--profile", profile)->check(CLI::IsMember({"appendixB", "table4"}));
  mine_cmd->add_option("--task", task);
  mine_cmd->add_option("--model", model);
  mine_cmd->add_option("--consequent", consequent, "keep rules whose consequent is exactly this item");
  mine_cmd->add_option("--derive-family", derive_family, "also print recommendation rows for this family");
  add_format(mine_cmd);

  // gap
  auto* gap_cmd = app.add_subcommand("gap", "Mean English-minus-Source gap per component");
  std::string component_name, scope_name = "all";
  gap_cmd->add_option("--results", results)->required();
  gap_cmd->add_option("--component", component_name, "instruction, context, examples or output");
  gap_cmd->add_option("--scope", scope_name)->check(CLI::IsMember({"all", "zero-shot", "few-shot"}));
  gap_cmd->add_option("--task", task);
  gap_cmd->add_option("--model", model);
  add_format(gap_cmd);

  // recommend
  auto* rec_cmd = app.add_subcommand("recommend", "Recommended configuration for a task and language");
  rec_cmd->add_option("--task", task)->required();
  rec_cmd->add_option("--lang", lang)->required();
  rec_cmd->add_option("--model", model)->required();
  add_format(rec_cmd);

  // gen-prompt
  auto* gen_cmd = app.add_subcommand("gen-prompt", "Compile one prompt");
  std::string input_path, config_code;
  long k = 1;
  gen_cmd->add_option("--task", task)->required();
  gen_cmd->add_option("--config", config_code)->required();
  gen_cmd->add_option("--lang", lang)->required();
  gen_cmd->add_option("--input", input_path, "JSON object with the instance fields")->required();
  gen_cmd->add_option("--k", k, "bundled demonstrations for few-shot codes");
  add_translator(gen_cmd);
  gen_cmd->add_option("--replay-dir", topt.replay_dir);
  add_format(gen_cmd);

  // mt-quality
  auto* mt_cmd = app.add_subcommand("mt-quality", "Translation quality against similarity to English");
  std::string pairs_path, similarity_path, tokenizers_path;
  mt_cmd->add_option("--pairs", pairs_path, "lines of {hypothesis, reference, language}")->required();
  mt_cmd->add_option("--similarity", similarity_path, "<language> <similarity> lines")->required();
  mt_cmd->add_option("--tokenizers", tokenizers_path, "<language> <policy> lines");
  add_format(mt_cmd);

  // convert
  auto* conv_cmd = app.add_subcommand("convert", "Convert a public dataset export to the unified format");
  std::string from, output_path;
  conv_cmd->add_option("--from", from, "xquad, indicqa, wikiann, masakhaner, xnli or xlsum")->required();
  conv_cmd->add_option("--lang", lang)->required();
  conv_cmd->add_option("--input", input_path)->required();
  conv_cmd->add_option("--output", output_path, "defaults to standard output");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "HTTP API under /v1");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);
  add_translator(serve_cmd);
  serve_cmd->add_option("--replay-dir", topt.replay_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "selprompt: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << "see: selprompt " << sub->get_name() << " --help\n";
    }
    return kExitConfig;
  }

  try {
    if (*sweep_cmd) {
      SweepOptions o;
      o.task = parse_task(task);
      o.language = lang;
      o.seed = seed;
      o.shots = shots;
      o.workers = workers;
      o.policy = {max_instances, max_context};
      o.out_dir = out_dir;
      o.stop_after = stop_after;
      if (config_list == "all") {
        o.configs = enumerate_configurations(o.task);
      } else if (config_list == "zero-shot") {
        o.configs = enumerate_configurations(o.task, ShotFilter::kZeroShot);
      } else if (config_list == "few-shot") {
        o.configs = enumerate_configurations(o.task, ShotFilter::kFewShot);
      } else {
        o.configs = parse_config_list(config_list, o.task);
      }
      o.dataset = load_dataset(dataset, o.task);
      if (topt.replay_dir.empty()) topt.replay_dir = mopt.replay_dir;
      auto registry = std::make_shared<LanguageRegistry>(LanguageRegistry::load(data_file("languages.jsonl").string()));
      registry->at(lang);
      auto models = cli::make_model(mopt, out_dir);
      auto translators = cli::make_translator(topt, out_dir);
      auto lexicons = Lexicons::load_default();
      auto templates = TemplateSet::load_default();
      ScriptDetector detector(registry);
      auto tokenizers = cli::default_tokenizers();
      RateLimiter limiter(workers, std::chrono::milliseconds(0));
      SweepServices svc{*models.provider, *translators.provider, translators.cache.get(), models.records.get(),
                        &limiter, registry.get(), &lexicons, &templates, &detector, &tokenizers};
      auto summary = sweep(o, svc);
      auto agg = aggregate_run(out_dir);
      {
        std::ofstream t(std::filesystem::path(out_dir) / "table.csv", std::ios::binary | std::ios::trunc);
        agg.table.write_csv(t);
      }
      for (const auto& w : agg.warnings) err << "warning: " << w << "\n";
      if (structured()) {
        out << body(to_json(summary));
      } else {
        out << "run " << summary.run_id << ": " << summary.records << " records ("
            << summary.written_this_run << " new, " << summary.skipped_existing << " resumed)"
            << (summary.complete ? "" : " [incomplete]") << "\n";
        for (const auto& c : summary.per_config) {
          out << c.config_code << "  mean=" << cli::fmt(c.mean_score) << "  scored=" << c.scored
              << "/" << c.attempted << "  lang_ok=" << cli::fmt(c.language_success_rate(), 2);
          for (const auto& [cls, n] : c.error_classes) {
            if (cls != "none") out << "  " << cls << "=" << n;
          }
          out << "\n";
        }
      }
      return kExitOk;
    }

    if (*analyze_cmd) {
      auto table = cli::filter_table(cli::load_results(results, err), task, model, lang);
      nlohmann::json report = nlohmann::json::array();
      for (const auto& key : table.keys()) {
        nlohmann::json entry{{"task", to_string(key.task)}, {"model", key.model}, {"language", key.language}};
        try {
          auto top = top_configuration(table, key);
          entry["top"] = {{"config_code", top.config.code()}, {"score", top.score}};
          try {
            auto imp = improvement_over_baselines(table, key, parse_config_code(direct_code, key.task),
                                                  parse_config_code(pretranslate_code, key.task));
            entry["improvement"] = {{"direct", direct_code},
                                    {"direct_score", imp.direct_score},
                                    {"vs_direct_percent", imp.vs_direct},
                                    {"pretranslate", pretranslate_code},
                                    {"pretranslate_score", imp.pretranslate_score},
                                    {"vs_pretranslate_percent", imp.vs_pretranslate}};
          } catch (const Error& e) {
            entry["improvement_error"] = error_body(e);
          }
        } catch (const Error& e) {
          entry["error"] = error_body(e);
        }
        report.push_back(entry);
      }
      // Correlations are per (task, model, language), over that key's configurations.
      nlohmann::json corr = nlohmann::json::array();
      for (const auto& key : table.keys()) {
        std::vector<ScoredSample> samples;
        for (const auto& r : table.select(key)) {
          if (r.score) samples.push_back({r.config, *r.score});
        }
        for (auto comp : kAllComponents) {
          nlohmann::json c{{"task", to_string(key.task)}, {"model", key.model}, {"language", key.language},
                           {"component", to_string(comp)}};
          try {
            auto r = component_correlation(samples, comp);
            c["coefficient"] = r.coefficient;
            c["p_value"] = r.p_value;
            c["n"] = r.n;
            c["stars"] = significance_stars(r.p_value);
          } catch (const Error& e) {
            c["error"] = error_body(e);
          }
          corr.push_back(c);
        }
      }
      if (structured()) {
        out << body({{"keys", report}, {"correlations", corr}});
      } else {
        for (const auto& e : report) {
          out << e["task"].get<std::string>() << " " << e["model"].get<std::string>() << " "
              << e["language"].get<std::string>() << ": ";
          if (e.contains("error")) {
            out << e["error"]["message"].get<std::string>() << "\n";
            continue;
          }
          out << "top " << e["top"]["config_code"].get<std::string>() << " "
              << cli::fmt(e["top"]["score"].get<double>(), 2);
          if (e.contains("improvement")) {
            out << "  vs " << direct_code << " " << cli::signed_pct(e["improvement"]["vs_direct_percent"])
                << "  vs " << pretranslate_code << " "
                << cli::signed_pct(e["improvement"]["vs_pretranslate_percent"]);
          } else if (e.contains("improvement_error")) {
            out << "  (improvement: " << e["improvement_error"]["message"].get<std::string>() << ")";
          }
          out << "\n";
        }
        for (const auto& c : corr) {
          if (c.contains("error")) continue;
          out << "corr " << c["task"].get<std::string>() << " " << c["model"].get<std::string>() << " "
              << c["language"].get<std::string>() << " " << c["component"].get<std::string>()
              << " r=" << cli::fmt(c["coefficient"].get<double>(), 3) << c["stars"].get<std::string>()
              << " p=" << cli::fmt(c["p_value"].get<double>(), 4) << " n=" << c["n"].get<std::size_t>()
              << "\n";
        }
      }
      return kExitOk;
    }

    if (*mine_cmd) {
      auto table = cli::filter_table(cli::load_results(results, err), task, model, "");
      auto registry = LanguageRegistry::load(data_file("languages.jsonl").string());
      auto prof = parse_profile(profile);
      auto binned = bin_scores(table);
      auto tx = make_transactions(binned, registry);
      auto res = apriori(tx, prof);
      std::vector<Rule> rules;
      for (const auto& r : res.rules) {
        if (!consequent.empty() && r.consequent != Itemset{consequent}) continue;
        rules.push_back(r);
      }
      std::vector<RecommendationRow> derived;
      if (!derive_family.empty()) {
        if (task.empty()) throw Error(ErrorCode::kParse, "cli", "--derive-family needs --task");
        derived = derive_rows_from_rules(res.rules, parse_task(task), text::ascii_lower(derive_family));
      }
      if (structured()) {
        nlohmann::json rj = nlohmann::json::array();
        for (const auto& r : rules) rj.push_back(to_json(r));
        nlohmann::json dj = nlohmann::json::array();
        for (const auto& d : derived) {
          dj.push_back({{"task", to_string(d.task)}, {"resource_level", to_string(d.bucket)},
                        {"model_family", d.model_family}, {"row", d.code()},
                        {"provenance", to_string(Provenance::kMinedFromResults)}});
        }
        out << body({{"profile", prof.name},
                     {"min_support", prof.min_support},
                     {"min_confidence", prof.min_confidence},
                     {"transactions", tx.size()},
                     {"frequent_itemsets", res.itemsets.size()},
                     {"rules", rj},
                     {"derived_rows", dj}});
      } else {
        out << "profile " << prof.name << " (support > " << prof.min_support << ", confidence > "
            << prof.min_confidence << "): " << tx.size() << " transactions, " << res.itemsets.size()
            << " frequent itemsets, " << rules.size() << " rules\n";
        for (const auto& r : rules) {
          out << cli::render_itemset(r.antecedent) << " => " << cli::render_itemset(r.consequent)
              << "  support=" << cli::fmt(r.support) << "  confidence=" << cli::fmt(r.confidence) << "\n";
        }
        for (const auto& d : derived) {
          out << "derived " << to_string(d.task) << "/" << to_string(d.bucket) << "/" << d.model_family
              << ": " << d.code() << "\n";
        }
      }
      return kExitOk;
    }

    if (*gap_cmd) {
      auto table = cli::filter_table(cli::load_results(results, err), task, model, "");
      auto scope = scope_name == "all"        ? ShotFilter::kAll
                   : scope_name == "zero-shot" ? ShotFilter::kZeroShot
                                               : ShotFilter::kFewShot;
      std::vector<Component> comps;
      if (component_name.empty()) {
        comps.assign(kAllComponents.begin(), kAllComponents.end());
      } else {
        comps.push_back(parse_component(component_name));
      }
      nlohmann::json rep = nlohmann::json::array();
      for (auto c : comps) {
        nlohmann::json e{{"component", to_string(c)}, {"scope", scope_name}};
        try {
          auto g = performance_gap(table, c, scope);
          e["mean_gap"] = g.mean_gap;
          e["k"] = g.k;
        } catch (const Error& ex) {
          if (!component_name.empty()) throw;
          e["error"] = error_body(ex);
        }
        rep.push_back(e);
      }
      if (structured()) {
        out << body({{"gaps", rep}});
      } else {
        for (const auto& e : rep) {
          out << e["component"].get<std::string>() << ": ";
          if (e.contains("error")) {
            out << e["error"]["message"].get<std::string>() << "\n";
          } else {
            out << "gap=" << cli::fmt(e["mean_gap"].get<double>()) << " k=" << e["k"].get<std::size_t>() << "\n";
          }
        }
      }
      return kExitOk;
    }

    if (*rec_cmd) {
      Service svc(Service::Resources::load_default(), std::make_shared<MockTranslator>());
      auto j = svc.recommend({{"task", task}, {"language", lang}, {"model", model}});
      if (structured()) {
        out << body(j);
      } else {
        out << j["config_code"].get<std::string>() << "\n";
      }
      return kExitOk;
    }

    if (*gen_cmd) {
      auto translators = cli::make_translator(topt, ".");
      Service svc(Service::Resources::load_default(), translators.provider, translators.cache);
      nlohmann::json input;
      try {
        auto raw = cli::read_file(input_path);
        auto first = raw.find('\n');
        try {
          input = nlohmann::json::parse(raw);
        } catch (const nlohmann::json::parse_error&) {
          input = nlohmann::json::parse(raw.substr(0, first));  // first line of a line-delimited file
        }
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::kParse, "cli", input_path + ": " + e.what());
      }
      nlohmann::json req{{"task", task}, {"config_code", config_code}, {"language", lang}, {"input", input}, {"k", k}};
      auto j = svc.prompt(req);
      if (structured()) {
        out << body(j);
      } else {
        out << j["prompt_text"].get<std::string>() << "\n";
      }
      return kExitOk;
    }

    if (*mt_cmd) {
      std::vector<TranslationPair> pairs;
      std::istringstream in(cli::read_file(pairs_path));
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
          auto j = nlohmann::json::parse(line);
          pairs.push_back({j.at("hypothesis").get<std::string>(), j.at("reference").get<std::string>(),
                           j.at("language").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::kSchema, "cli", pairs_path + ":" + std::to_string(lineno) + ": " + e.what());
        }
      }
      auto tok = tokenizers_path.empty() ? cli::default_tokenizers() : TokenizerTable::load(tokenizers_path);
      auto rep = mt_quality_study(pairs, load_similarity(similarity_path), tok);
      if (structured()) {
        nlohmann::json langs = nlohmann::json::array();
        for (const auto& q : rep.per_language) {
          langs.push_back({{"language", q.language}, {"n", q.n}, {"rouge1", q.rouge1}, {"bleu", q.bleu},
                           {"chrf", q.chrf}, {"similarity", q.similarity}});
        }
        out << body({{"languages", langs},
                     {"correlation",
                      {{"coefficient", rep.similarity_correlation.coefficient},
                       {"p_value", rep.similarity_correlation.p_value},
                       {"n", rep.similarity_correlation.n}}}});
      } else {
        for (const auto& q : rep.per_language) {
          out << q.language << "  n=" << q.n << "  rouge1=" << cli::fmt(q.rouge1) << "  bleu="
              << cli::fmt(q.bleu) << "  chrf=" << cli::fmt(q.chrf) << "  similarity=" << cli::fmt(q.similarity)
              << "\n";
        }
        out << "pearson r=" << cli::fmt(rep.similarity_correlation.coefficient, 3)
            << significance_stars(rep.similarity_correlation.p_value)
            << " p=" << cli::fmt(rep.similarity_correlation.p_value) << " n=" << rep.similarity_correlation.n
            << "\n";
      }
      return kExitOk;
    }

    if (*conv_cmd) {
      auto data = convert_file(input_path, parse_source_format(from), lang);
      if (output_path.empty()) {
        write_dataset(out, data);
      } else {
        std::ofstream f(output_path, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::kIo, "cli", "cannot write '" + output_path + "'");
        write_dataset(f, data);
      }
      err << "converted " << data.size() << " records\n";
      return kExitOk;
    }

    if (*serve_cmd) {
      auto translators = cli::make_translator(topt, ".");
      Service svc(Service::Resources::load_default(), translators.provider, translators.cache);
      httplib::Server server;
      install_routes(server, svc);
      if (!server.bind_to_port(host, port)) {
        throw Error(ErrorCode::kIo, "cli", "cannot bind " + host + ":" + std::to_string(port));
      }
      err << "listening on http://" << host << ":" << port << "\n";
      server.listen_after_bind();
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "selprompt: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "selprompt: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace selprompt
