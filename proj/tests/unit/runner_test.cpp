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


#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "selprompt/runner.hpp"

namespace selprompt {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("selprompt-runner-" + name + "-" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<TaskInstance> mini() { return load_dataset(data_file("fixtures/qa_de_mini.jsonl").string(), TaskKind::kQA); }

// Answers every question with its first gold answer, in the requested
// output language (mock-tagged when that is English).
ScriptedProvider::Script oracle_script(std::vector<TaskInstance> data) {
  return [data](const CompiledPrompt& p) {
    auto block = p.context_block();
    for (const auto& i : data) {
      const auto& q = std::get<QaPayload>(i.payload);
      if (block.find(q.question) == std::string_view::npos) continue;
      auto tag = p.expected_output_lang == "en" ? MockTranslator::tag("de", "en") : std::string();
      return tag + q.answers.front();
    }
    return std::string("?");
  };
}

struct Rig {
  LanguageRegistry reg = LanguageRegistry::load(data_file("languages.jsonl").string());
  Lexicons lex = Lexicons::load_default();
  TemplateSet templates = TemplateSet::load_default();
  std::shared_ptr<LanguageRegistry> reg_ptr = std::make_shared<LanguageRegistry>(reg);
  ScriptDetector detector{reg_ptr};
  MockTranslator mt;

  SweepServices services(ModelProvider& m, RecordStore* store = nullptr) {
    return {m, mt, nullptr, store, nullptr, &reg, &lex, &templates, &detector, nullptr};
  }
  SweepOptions options(const fs::path& out, ShotFilter f = ShotFilter::kAll) {
    SweepOptions o;
    o.task = TaskKind::kQA;
    o.language = "de";
    o.dataset = mini();
    o.policy = {5, 10000};
    o.seed = 7;
    o.configs = enumerate_configurations(TaskKind::kQA, f);
    o.out_dir = out;
    return o;
  }
};

TEST(Sweep, OracleModelScoresOneEverywhere) {
  Rig rig;
  ScriptedProvider model("oracle", oracle_script(mini()));
  auto dir = fresh_dir("oracle");
  auto s = sweep(rig.options(dir), rig.services(model));
  EXPECT_TRUE(s.complete);
  EXPECT_EQ(s.records, 24u * 5u);
  for (const auto& c : s.per_config) {
    EXPECT_EQ(c.scored, 5u) << c.config_code;
    EXPECT_DOUBLE_EQ(c.mean_score, 1.0) << c.config_code;
  }
  auto agg = aggregate_run(dir);
  EXPECT_TRUE(agg.warnings.empty());
  fs::remove_all(dir);
}

TEST(Sweep, DeterministicAcrossRunsAndWorkerCounts) {
  Rig rig;
  ScriptedEchoProvider model;
  auto a = fresh_dir("det-a"), b = fresh_dir("det-b");
  auto oa = rig.options(a);
  oa.workers = 1;
  auto ob = rig.options(b);
  ob.workers = 8;
  auto sa = sweep(oa, rig.services(model));
  auto sb = sweep(ob, rig.services(model));
  EXPECT_EQ(sa.run_id, sb.run_id);
  EXPECT_EQ(slurp(a / "results.jsonl"), slurp(b / "results.jsonl"));
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Sweep, InterruptedRunResumes) {
  Rig rig;
  ScriptedEchoProvider model;
  auto full = fresh_dir("full"), part = fresh_dir("part");
  sweep(rig.options(full), rig.services(model));
  auto o = rig.options(part);
  o.stop_after = 17;
  auto first = sweep(o, rig.services(model));
  EXPECT_EQ(first.written_this_run, 17u);
  EXPECT_FALSE(first.complete);
  // A torn final line from a crash is dropped on resume.
  {
    std::ofstream f(part / "results.jsonl", std::ios::app);
    f << R"({"run_id":"x","config_co)";
  }
  o.stop_after.reset();
  auto second = sweep(o, rig.services(model));
  EXPECT_EQ(second.skipped_existing, 17u);
  EXPECT_TRUE(second.complete);
  auto keys = [](const fs::path& p) {
    std::set<std::pair<std::string, std::string>> k;
    for (const auto& r : read_records(p / "results.jsonl")) k.insert({r["config_code"].get<std::string>(), r["instance_id"].get<std::string>()});
    return k;
  };
  EXPECT_EQ(keys(full), keys(part));
  auto third = sweep(o, rig.services(model));
  EXPECT_EQ(third.written_this_run, 0u);
  fs::remove_all(full);
  fs::remove_all(part);
}

TEST(Sweep, ChangedInputsRefuseExistingDirectory) {
  Rig rig;
  ScriptedEchoProvider model;
  auto dir = fresh_dir("changed");
  sweep(rig.options(dir, ShotFilter::kZeroShot), rig.services(model));
  try {
    sweep(rig.options(dir, ShotFilter::kFewShot), rig.services(model));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  fs::remove_all(dir);
}

TEST(Sweep, ValidationBeforeStore) {
  Rig rig;
  ReplayProvider empty("gpt", std::make_shared<RecordStore>());
  auto dir = fresh_dir("unseeded");
  try {
    sweep(rig.options(dir), rig.services(empty));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kContract);
  }
  EXPECT_FALSE(fs::exists(dir));
  ScriptedEchoProvider model;
  auto o = rig.options(dir);
  o.language = "fr";
  EXPECT_THROW(sweep(o, rig.services(model)), Error);
  o = rig.options(dir);
  o.configs = enumerate_configurations(TaskKind::kNLI);
  EXPECT_THROW(sweep(o, rig.services(model)), Error);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Sweep, ReplayMissIsIsolatedPerCell) {
  Rig rig;
  // The recorder fails on few-shot prompts, so only zero-shot replies are
  // stored.
  ScriptedProvider recorder("scripted-echo", [](const CompiledPrompt& p) {
    if (p.example_count() > 0) throw Error(ErrorCode::kTransport, "test", "offline");
    return std::string(p.context_block());
  });
  auto store = std::make_shared<RecordStore>();
  auto rec_dir = fresh_dir("rec");
  sweep(rig.options(rec_dir), rig.services(recorder, store.get()));
  EXPECT_EQ(store->size(), 8u * 5u);
  ReplayProvider replay("scripted-echo", store);
  auto dir = fresh_dir("replay");
  auto s = sweep(rig.options(dir), rig.services(replay));
  EXPECT_TRUE(s.complete);
  std::size_t misses = 0, ok = 0;
  for (const auto& r : read_records(dir / "results.jsonl")) {
    auto cfg = parse_config_code(r["config_code"].get<std::string>(), TaskKind::kQA);
    if (cfg.zero_shot()) {
      EXPECT_TRUE(r["stage_error"].is_null());
      EXPECT_FALSE(r["score"].is_null());
      ++ok;
    } else {
      EXPECT_EQ(r["stage_error"]["code"], "replay_miss");
      EXPECT_EQ(r["stage_error"]["stage"], "complete");
      EXPECT_TRUE(r["score"].is_null());
      ++misses;
    }
  }
  EXPECT_EQ(ok, 8u * 5u);
  EXPECT_EQ(misses, 16u * 5u);
  fs::remove_all(rec_dir);
  fs::remove_all(dir);
}

TEST(Sweep, LanguageAccounting) {
  Rig rig;
  // Always answers in Cyrillic: wrong language for every configuration.
  ScriptedProvider model("ru", [](const CompiledPrompt&) { return std::string("Привет"); });
  auto dir = fresh_dir("lang");
  auto s = sweep(rig.options(dir, ShotFilter::kZeroShot), rig.services(model));
  for (const auto& c : s.per_config) {
    EXPECT_EQ(c.language_mismatch, 5u);
    EXPECT_DOUBLE_EQ(c.language_success_rate(), 0.0);
  }
  for (const auto& r : read_records(dir / "results.jsonl")) EXPECT_EQ(r["error_class"], "wrong_language");
  fs::remove_all(dir);
}

TEST(Aggregate, MeansAndWarnings) {
  auto cfg = enumerate_configurations(TaskKind::kQA, ShotFilter::kZeroShot);
  auto rec = [](std::string code, std::string id, std::optional<double> v) {
    nlohmann::json r{{"config_code", code}, {"instance_id", id}, {"score", nullptr}};
    if (v) r["score"] = {{"metric", "token_f1"}, {"value", *v}};
    return r;
  };
  std::vector<nlohmann::json> rs{rec(cfg[0].code(), "a", 1.0), rec(cfg[0].code(), "b", 0.5),
                                 rec(cfg[1].code(), "a", std::nullopt)};
  auto agg = aggregate(rs, TaskKind::kQA, "m", "de", cfg);
  ASSERT_EQ(agg.table.rows().size(), 1u);
  EXPECT_DOUBLE_EQ(*agg.table.rows()[0].score, 0.75);
  ASSERT_EQ(agg.warnings.size(), 1u);
  EXPECT_NE(agg.warnings[0].find(cfg[1].code()), std::string::npos);
}

}  // namespace
}  // namespace selprompt
