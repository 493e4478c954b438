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

// Sweeps: every sampled instance under every configuration, one record per
// cell in results.jsonl next to manifest.json. Records are emitted in
// canonical cell order whatever the worker count, so a resumed run ends
// byte-identical to an uninterrupted one.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "selprompt/analysis.hpp"
#include "selprompt/config_space.hpp"
#include "selprompt/corpus.hpp"
#include "selprompt/error.hpp"
#include "selprompt/gateway.hpp"
#include "selprompt/hash.hpp"
#include "selprompt/metrics.hpp"
#include "selprompt/postproc.hpp"
#include "selprompt/prompting.hpp"
#include "selprompt/store.hpp"
#include "selprompt/translation.hpp"

namespace selprompt {

inline constexpr std::string_view kToolVersion = "selprompt 0.1.0";
inline constexpr int kRecordLayoutVersion = 1;

struct SweepOptions {
  TaskKind task = TaskKind::kQA;
  std::string language;            // source language of the dataset
  std::vector<TaskInstance> dataset;
  SamplePolicy policy;
  std::uint64_t seed = 0;
  std::vector<Configuration> configs;
  std::size_t shots = 1;           // demonstrations for few-shot configs
  std::filesystem::path out_dir;
  std::size_t workers = 4;
  std::optional<std::size_t> stop_after;  // write at most this many new records
};

struct SweepServices {
  ModelProvider& model;
  TranslationProvider& translator;
  TranslationCache* translation_cache = nullptr;
  RecordStore* completions = nullptr;
  RateLimiter* limiter = nullptr;
  const LanguageRegistry* registry = nullptr;
  const Lexicons* lexicons = nullptr;
  const TemplateSet* templates = nullptr;
  const LanguageDetector* detector = nullptr;
  const TokenizerTable* tokenizers = nullptr;
};

struct ConfigSummary {
  std::string config_code;
  std::size_t attempted = 0;
  std::size_t scored = 0;
  std::size_t errored = 0;  // stage failures, no score
  double mean_score = 0;
  std::map<std::string, std::size_t> error_classes;
  std::size_t language_match = 0;
  std::size_t language_mismatch = 0;
  std::size_t language_indeterminate = 0;

  double language_success_rate() const {
    auto d = language_match + language_mismatch;
    return d ? static_cast<double>(language_match) / static_cast<double>(d) : 0.0;
  }
};

struct RunSummary {
  std::string run_id;
  std::size_t records = 0;
  std::size_t written_this_run = 0;
  std::size_t skipped_existing = 0;
  bool complete = false;
  std::vector<ConfigSummary> per_config;  // in configuration order
};

inline nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& c : s.per_config) {
    per.push_back({{"config_code", c.config_code},
                   {"attempted", c.attempted},
                   {"scored", c.scored},
                   {"errored", c.errored},
                   {"mean_score", c.mean_score},
                   {"error_classes", c.error_classes},
                   {"output_language",
                    {{"match", c.language_match},
                     {"mismatch", c.language_mismatch},
                     {"indeterminate", c.language_indeterminate},
                     {"success_rate", c.language_success_rate()}}}});
  }
  return {{"run_id", s.run_id},
          {"records", s.records},
          {"written_this_run", s.written_this_run},
          {"skipped_existing", s.skipped_existing},
          {"complete", s.complete},
          {"per_config", per}};
}

// ------------------------------------------------------------- manifest

inline nlohmann::json build_manifest(const SweepOptions& o, const SweepServices& svc,
                                     const std::vector<TaskInstance>& eval,
                                     const std::vector<TaskInstance>& demos) {
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& c : o.configs) configs.push_back(c.code());
  nlohmann::json eval_ids = nlohmann::json::array();
  for (const auto& i : eval) eval_ids.push_back(i.id);
  nlohmann::json demo_ids = nlohmann::json::array();
  for (const auto& i : demos) demo_ids.push_back(i.id);
  nlohmann::json m{
      {"task", to_string(o.task)},
      {"language", o.language},
      {"model", svc.model.name()},
      {"dataset_digest", dataset_digest(o.dataset)},
      {"sample_seed", o.seed},
      {"policy",
       {{"max_instances", o.policy.max_instances}, {"max_context_units", o.policy.max_context_units}}},
      {"configs", configs},
      {"shots", o.shots},
      {"provider",
       {{"name", svc.model.name()},
        {"kind", to_string(svc.model.kind())},
        {"params", svc.model.params().to_json()}}},
      {"translator", {{"name", svc.translator.name()}, {"kind", to_string(svc.translator.kind())}}},
      {"instances", eval_ids},
      {"demonstrations", demo_ids},
      {"version", kToolVersion},
      {"record_layout_version", kRecordLayoutVersion},
  };
  m["run_id"] = sha256_hex(m.dump()).substr(0, 16);
  return m;
}

// ------------------------------------------------------------- pipeline

namespace detail {

struct CellTiming {
  double compile_ms = 0, complete_ms = 0, back_translate_ms = 0, normalize_ms = 0, score_ms = 0;
};

class Stopwatch {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - t_).count();
    t_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point t_ = std::chrono::steady_clock::now();
};

inline std::string render_entity_list(const std::vector<NerEntity>& es) {
  std::string out = "[";
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) out += ", ";
    out += "(" + std::string(to_string(es[i].type)) + ", " + es[i].surface + ")";
  }
  return out + "]";
}

struct Cell {
  const Configuration* config;
  const TaskInstance* instance;
};

inline nlohmann::json run_cell(const Cell& cell, const std::string& run_id,
                               const std::string& source_lang,
                               const std::vector<TaskInstance>& demos, const SweepServices& svc,
                               CellTiming& timing) {
  const auto& cfg = *cell.config;
  const auto& inst = *cell.instance;
  const std::string gold_lang = inst.language;
  nlohmann::json rec{{"run_id", run_id},
                     {"config_code", cfg.code()},
                     {"instance_id", inst.id},
                     {"gold_language", gold_lang},
                     {"prompt_hash", nullptr},
                     {"raw_output", nullptr},
                     {"post_translated_output", nullptr},
                     {"normalized_output", nullptr},
                     {"output_language", nullptr},
                     {"output_language_ok", nullptr},
                     {"error_class", "none"},
                     {"stage_error", nullptr},
                     {"score", nullptr}};
  std::string stage = "compile";
  Stopwatch sw;
  try {
    CompileContext ctx{svc.translator, svc.translation_cache, svc.registry, svc.templates};
    static const std::vector<TaskInstance> kNone;
    auto prompt = compile(cfg, inst, cfg.zero_shot() ? kNone : demos, source_lang, ctx);
    rec["prompt_hash"] = sha256_hex(prompt.text);
    timing.compile_ms = sw.lap();

    stage = "complete";
    auto completion = complete(prompt, svc.model, svc.completions, svc.limiter);
    const std::string& raw = completion.response_text;
    rec["raw_output"] = raw;
    timing.complete_ms = sw.lap();

    const std::string out_lang = prompt.expected_output_lang;
    auto back = [&](const std::string& s) {
      return back_translate(s, out_lang, gold_lang, svc.translator, svc.translation_cache);
    };
    static const Lexicons kEmptyLexicons{};
    const Lexicons& lex = svc.lexicons ? *svc.lexicons : kEmptyLexicons;
    const bool english_gold = text::ascii_lower(gold_lang) == "en";
    ErrorClass error_class = ErrorClass::kNone;
    std::string checked_text = raw;
    std::string check_lang = out_lang;
    Score score;

    switch (cfg.task) {
      case TaskKind::kQA: {
        stage = "back_translate";
        auto post = back(raw);
        rec["post_translated_output"] = post;
        timing.back_translate_ms = sw.lap();
        stage = "normalize";
        auto q = classify_qa(post, english_gold);
        error_class = q.error_class;
        rec["normalized_output"] = q.answer;
        timing.normalize_ms = sw.lap();
        stage = "score";
        const auto& golds = std::get<QaPayload>(inst.payload).answers;
        std::vector<std::string> norm_golds;
        for (const auto& g : golds) norm_golds.push_back(normalize_qa(g, english_gold));
        auto tok = svc.tokenizers ? svc.tokenizers->for_language(gold_lang)
                                  : Tokenizer{TokenizerPolicy::kMixed};
        score = token_f1(q.answer, norm_golds, tok);
        break;
      }
      case TaskKind::kNER: {
        stage = "normalize";
        auto parsed = parse_ner(raw);
        error_class = parsed.error_class;
        timing.normalize_ms = sw.lap();
        stage = "back_translate";
        for (auto& e : parsed.entities) e.surface = back(e.surface);
        rec["post_translated_output"] = render_entity_list(parsed.entities);
        timing.back_translate_ms = sw.lap();
        stage = "normalize";
        const auto& gold = std::get<NerPayload>(inst.payload);
        auto proj = project_biose(gold.tokens, parsed.entities);
        nlohmann::json ents = nlohmann::json::array();
        for (const auto& e : parsed.entities) ents.push_back({to_string(e.type), e.surface});
        rec["normalized_output"] = {{"entities", ents}, {"labels", proj.labels}, {"dropped", proj.dropped}};
        std::vector<std::string> surfaces;
        for (const auto& e : parsed.entities) surfaces.push_back(e.surface);
        checked_text.clear();
        // Language is judged on the raw entity surfaces, before back-translation.
        for (const auto& e : parse_ner(raw).entities) checked_text += e.surface + " ";
        timing.normalize_ms += sw.lap();
        stage = "score";
        score = entity_f1(proj.labels, gold.tags);
        break;
      }
      case TaskKind::kNLI: {
        stage = "normalize";
        auto n = normalize_nli(raw, lex.nli);
        error_class = n.error_class;
        rec["post_translated_output"] = raw;
        rec["normalized_output"] = n.label ? nlohmann::json(to_string(*n.label)) : nlohmann::json(nullptr);
        timing.normalize_ms = sw.lap();
        check_lang = "en";  // label words are fixed English
        stage = "score";
        bool ok = n.label && *n.label == std::get<NliPayload>(inst.payload).label;
        score = {ok ? 1.0 : 0.0, Metric::kAccuracy};
        break;
      }
      case TaskKind::kSUM: {
        stage = "back_translate";
        auto post = back(raw);
        rec["post_translated_output"] = post;
        timing.back_translate_ms = sw.lap();
        stage = "normalize";
        auto s = classify_sum(post, lex.summary_prefixes);
        error_class = s.error_class;
        rec["normalized_output"] = s.summary;
        timing.normalize_ms = sw.lap();
        stage = "score";
        auto tok = svc.tokenizers ? svc.tokenizers->for_language(gold_lang, true, true)
                                  : Tokenizer{TokenizerPolicy::kMixed, true, true};
        score = rouge(s.summary, std::get<SumPayload>(inst.payload).reference_summary,
                      RougeVariant::k1, tok);
        break;
      }
    }
    if (svc.detector) {
      auto lc = check_output_language(checked_text, check_lang, *svc.detector);
      rec["output_language"] = to_string(lc);
      if (lc != LanguageCheck::kIndeterminate) rec["output_language_ok"] = lc == LanguageCheck::kMatch;
      if (lc == LanguageCheck::kMismatch && error_class == ErrorClass::kNone) {
        error_class = ErrorClass::kWrongLanguage;
      }
    }
    rec["error_class"] = to_string(error_class);
    rec["score"] = {{"metric", to_string(score.metric)}, {"value", score.value}};
    timing.score_ms = sw.lap();
  } catch (const Error& e) {
    rec["stage_error"] = {{"stage", stage},
                          {"code", to_string(e.code())},
                          {"module", e.module()},
                          {"message", e.detail()}};
  } catch (const std::exception& e) {
    rec["stage_error"] = {{"stage", stage}, {"code", "internal"}, {"module", "runner"}, {"message", e.what()}};
  }
  return rec;
}

inline std::pair<std::string, std::string> record_key(const nlohmann::json& rec) {
  return {rec.at("config_code").get<std::string>(), rec.at("instance_id").get<std::string>()};
}

}  // namespace detail

inline std::vector<nlohmann::json> read_records(const std::filesystem::path& results) {
  std::vector<nlohmann::json> out;
  std::ifstream in(results, std::ios::binary);
  if (!in) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIo, "runner",
                  results.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline RunSummary summarize(const std::string& run_id, const std::vector<Configuration>& configs,
                            const std::vector<nlohmann::json>& records) {
  RunSummary s;
  s.run_id = run_id;
  s.records = records.size();
  std::map<std::string, ConfigSummary> by;
  for (const auto& c : configs) by[c.code()].config_code = c.code();
  for (const auto& r : records) {
    auto& c = by[r.at("config_code").get<std::string>()];
    c.config_code = r.at("config_code").get<std::string>();
    ++c.attempted;
    if (r.at("score").is_null()) {
      ++c.errored;
    } else {
      ++c.scored;
      c.mean_score += r["score"]["value"].get<double>();
      ++c.error_classes[r.at("error_class").get<std::string>()];
    }
    const auto& lc = r.at("output_language");
    if (lc == "match") ++c.language_match;
    else if (lc == "mismatch") ++c.language_mismatch;
    else if (lc == "indeterminate") ++c.language_indeterminate;
  }
  for (const auto& cfg : configs) {
    auto& c = by[cfg.code()];
    if (c.scored) c.mean_score /= static_cast<double>(c.scored);
    s.per_config.push_back(c);
  }
  return s;
}

/// Runs (or resumes) a sweep into `o.out_dir`.
inline RunSummary sweep(const SweepOptions& o, const SweepServices& svc) {
  // Validation happens before anything touches the store.
  if (o.configs.empty()) throw Error(ErrorCode::kContract, "runner", "no configurations to run");
  for (const auto& c : o.configs) {
    if (c.task != o.task) {
      throw Error(ErrorCode::kContract, "runner", "configuration " + c.code() + " is for another task");
    }
  }
  for (const auto& i : o.dataset) {
    if (i.task() != o.task) throw Error(ErrorCode::kContract, "runner", "dataset holds another task");
    if (text::ascii_lower(i.language) != text::ascii_lower(o.language)) {
      throw Error(ErrorCode::kContract, "runner",
                  "instance '" + i.id + "' is in '" + i.language + "', expected '" + o.language + "'");
    }
  }
  if (!svc.model.ready()) {
    throw Error(ErrorCode::kContract, "runner", "provider '" + svc.model.name() + "' has nothing to replay");
  }
  bool few_shot = std::any_of(o.configs.begin(), o.configs.end(),
                              [](const Configuration& c) { return !c.zero_shot(); });
  std::vector<TaskInstance> demos, pool_rest = o.dataset;
  if (few_shot) {
    if (o.shots == 0) throw Error(ErrorCode::kContract, "runner", "few-shot configurations need shots > 0");
    auto split = split_examples_pool(o.dataset, o.shots, o.seed);
    demos = std::move(split.pool);
    pool_rest = std::move(split.eval);
  }
  auto eval = sample(pool_rest, o.policy, o.seed);
  if (eval.empty()) throw Error(ErrorCode::kContract, "runner", "no instance fits the sample policy");

  auto manifest = build_manifest(o, svc, eval, demos);
  const std::string run_id = manifest["run_id"];

  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "runner", "cannot create '" + o.out_dir.string() + "': " + ec.message());
  auto manifest_path = o.out_dir / "manifest.json";
  auto results_path = o.out_dir / "results.jsonl";
  auto timings_path = o.out_dir / "timings.jsonl";
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    nlohmann::json old;
    try {
      old = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIo, "runner", "unreadable manifest: " + std::string(e.what()));
    }
    if (old.value("run_id", "") != run_id) {
      throw Error(ErrorCode::kIo, "runner",
                  o.out_dir.string() + " holds run " + old.value("run_id", "?") +
                      "; inputs now describe run " + run_id + " (use another directory)");
    }
  } else {
    std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::kIo, "runner", "cannot write " + manifest_path.string());
  }

  repair_truncated_tail(results_path);
  repair_truncated_tail(timings_path);
  std::set<std::pair<std::string, std::string>> done;
  for (const auto& r : read_records(results_path)) done.insert(detail::record_key(r));

  std::vector<detail::Cell> cells;
  std::size_t skipped = 0;
  for (const auto& c : o.configs) {
    for (const auto& i : eval) {
      if (done.count({c.code(), i.id})) {
        ++skipped;
        continue;
      }
      cells.push_back({&c, &i});
    }
  }
  if (o.stop_after && cells.size() > *o.stop_after) cells.resize(*o.stop_after);

  std::ofstream results(results_path, std::ios::binary | std::ios::app);
  std::ofstream timings(timings_path, std::ios::binary | std::ios::app);
  if (!results || !timings) throw Error(ErrorCode::kIo, "runner", "cannot append to " + results_path.string());

  // Workers fill slots; the writer drains the contiguous finished prefix.
  std::vector<std::optional<std::pair<nlohmann::json, detail::CellTiming>>> slots(cells.size());
  std::mutex mu;
  std::size_t next_write = 0;
  std::atomic<std::size_t> next_cell{0};
  std::exception_ptr io_failure;

  auto drain_locked = [&] {
    while (next_write < slots.size() && slots[next_write]) {
      auto& [rec, t] = *slots[next_write];
      results << rec.dump() << '\n';
      results.flush();
      timings << nlohmann::json{{"run_id", run_id},
                                {"config_code", rec["config_code"]},
                                {"instance_id", rec["instance_id"]},
                                {"compile_ms", t.compile_ms},
                                {"complete_ms", t.complete_ms},
                                {"back_translate_ms", t.back_translate_ms},
                                {"normalize_ms", t.normalize_ms},
                                {"score_ms", t.score_ms}}
                     .dump()
              << '\n';
      if (!results) {
        io_failure = std::make_exception_ptr(
            Error(ErrorCode::kIo, "runner", "write to " + results_path.string() + " failed"));
        return;
      }
      slots[next_write].reset();
      ++next_write;
    }
  };

  auto worker = [&] {
    for (;;) {
      auto idx = next_cell.fetch_add(1);
      if (idx >= cells.size()) return;
      {
        std::lock_guard lock(mu);
        if (io_failure) return;
      }
      detail::CellTiming t;
      auto rec = detail::run_cell(cells[idx], run_id, o.language, demos, svc, t);
      std::lock_guard lock(mu);
      slots[idx].emplace(std::move(rec), t);
      drain_locked();
    }
  };

  std::size_t n_workers = std::max<std::size_t>(1, std::min(o.workers, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (io_failure) std::rethrow_exception(io_failure);
  results.close();
  timings.close();

  auto summary = summarize(run_id, o.configs, read_records(results_path));
  summary.written_this_run = next_write;
  summary.skipped_existing = skipped;
  summary.complete = summary.records == o.configs.size() * eval.size();
  return summary;
}

// ------------------------------------------------------------- aggregate

struct AggregateResult {
  ResultTable table;
  std::vector<std::string> warnings;
};

/// Mean score per configuration over scored records.
inline AggregateResult aggregate(const std::vector<nlohmann::json>& records, TaskKind task,
                                 const std::string& model, const std::string& language,
                                 const std::vector<Configuration>& configs) {
  AggregateResult out;
  std::map<std::string, std::pair<double, std::size_t>> acc;
  std::map<std::string, std::size_t> attempted;
  for (const auto& r : records) {
    auto code = r.at("config_code").get<std::string>();
    ++attempted[code];
    if (r.at("score").is_null()) continue;
    auto& a = acc[code];
    a.first += r["score"]["value"].get<double>();
    ++a.second;
  }
  for (const auto& c : configs) {
    auto it = acc.find(c.code());
    if (it == acc.end() || it->second.second == 0) {
      if (attempted.count(c.code())) {
        out.warnings.push_back("configuration " + c.code() + " has no scored records; omitted");
      }
      continue;
    }
    out.table.add({task, model, language, c, it->second.first / static_cast<double>(it->second.second)});
  }
  if (out.table.empty()) out.warnings.push_back("no scored records at all; table is empty");
  return out;
}

/// Reads manifest.json and results.jsonl from a run directory.
inline AggregateResult aggregate_run(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(ErrorCode::kIo, "runner", "no manifest in " + dir.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, "runner", "unreadable manifest: " + std::string(e.what()));
  }
  auto task = parse_task(m.at("task").get<std::string>());
  std::vector<Configuration> configs;
  for (const auto& c : m.at("configs")) configs.push_back(parse_config_code(c.get<std::string>(), task));
  return aggregate(read_records(dir / "results.jsonl"), task, m.at("model").get<std::string>(),
                   m.at("language").get<std::string>(), configs);
}

}  // namespace selprompt
