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

#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "selprompt/api.hpp"
#include "selprompt/cli.hpp"

namespace selprompt {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "selprompt");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string run_binary(const std::string& args) {
  std::string cmd = std::string(SELPROMPT_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return out;
  std::array<char, 4096> buf;
  while (auto n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  pclose(p);
  return out;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("selprompt-cli-" + name + "-" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

class Server : public ::testing::Test {
 protected:
  void SetUp() override {
    svc_ = std::make_unique<Service>(Service::Resources::load_default(), std::make_shared<MockTranslator>());
    install_routes(server_, *svc_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

  std::unique_ptr<Service> svc_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(Server, HealthConfigsLanguages) {
  auto c = client();
  auto h = c.Get("/healthz");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->status, 200);
  auto cfg = c.Get("/v1/configs?task=nli");
  ASSERT_TRUE(cfg);
  auto j = nlohmann::json::parse(cfg->body);
  EXPECT_EQ(j["count"], 12);
  EXPECT_EQ(j["configs"].size(), 12u);
  auto bad = c.Get("/v1/configs");
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(nlohmann::json::parse(bad->body)["code"], "schema_error");
  auto langs = c.Get("/v1/languages");
  EXPECT_EQ(langs->status, 200);
  EXPECT_GT(nlohmann::json::parse(langs->body)["languages"].size(), 10u);
  EXPECT_EQ(langs->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(Server, RecommendMatchesCliBytes) {
  auto c = client();
  auto r = c.Post("/v1/recommend", R"({"task": "qa", "language": "ml", "model": "gpt"})", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  auto j = nlohmann::json::parse(r->body);
  EXPECT_EQ(j["config_code"], "SSSS");
  EXPECT_EQ(j["row"], "NSSS");
  EXPECT_EQ(j["resolved_neutrals"], nlohmann::json::array({"instruction"}));
  auto in_proc = run({"recommend", "--task", "qa", "--lang", "ml", "--model", "gpt", "--format", "structured"});
  EXPECT_EQ(in_proc.code, 0);
  EXPECT_EQ(in_proc.out, r->body);
  EXPECT_EQ(run_binary("recommend --task qa --lang ml --model gpt --format structured"), r->body);

  auto missing = c.Post("/v1/recommend", R"({"task": "qa", "language": "ml", "model": "llama"})", "application/json");
  EXPECT_EQ(missing->status, 404);
  auto junk = c.Post("/v1/recommend", "{nope", "application/json");
  EXPECT_EQ(junk->status, 400);
  EXPECT_EQ(nlohmann::json::parse(junk->body)["code"], "parse_error");
}

TEST_F(Server, PromptEndpoint) {
  auto c = client();
  nlohmann::json req{{"task", "qa"},
                     {"config_code", "SSZE"},
                     {"language", "de"},
                     {"input", {{"question", "Wo liegt Bonn?"}, {"context", "Bonn liegt am Rhein."}}}};
  auto r = c.Post("/v1/prompt", req.dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  auto j = nlohmann::json::parse(r->body);
  EXPECT_EQ(j["expected_output_lang"], "en");
  EXPECT_EQ(j["config_code"], "SSZE");
  EXPECT_EQ(j["component_spans"].size(), 2u);

  req["config_code"] = "SSSS";
  req["k"] = 2;
  auto few = nlohmann::json::parse(c.Post("/v1/prompt", req.dump(), "application/json")->body);
  int examples = 0;
  for (const auto& s : few["component_spans"]) examples += s["component"] == "example";
  EXPECT_EQ(examples, 2);

  req["k"] = 99;
  auto too_many = c.Post("/v1/prompt", req.dump(), "application/json");
  EXPECT_EQ(too_many->status, 422);

  req["config_code"] = "SSZS";
  req["demos"] = nlohmann::json::array({{{"question", "q"}, {"context", "c"}, {"answers", {"a"}}}});
  auto zs = c.Post("/v1/prompt", req.dump(), "application/json");
  EXPECT_EQ(zs->status, 422);
  EXPECT_EQ(nlohmann::json::parse(zs->body)["code"], "contract_error");

  nlohmann::json no_ctx{{"task", "qa"}, {"config_code", "SSZS"}, {"language", "de"},
                        {"input", {{"question", "q"}, {"context", " "}}}};
  EXPECT_EQ(c.Post("/v1/prompt", no_ctx.dump(), "application/json")->status, 400);
  no_ctx["language"] = "tlh";
  EXPECT_EQ(c.Post("/v1/prompt", no_ctx.dump(), "application/json")->status, 404);
}

TEST_F(Server, CorsPreflight) {
  auto c = client();
  auto r = c.Options("/v1/prompt");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 204);
  EXPECT_NE(r->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

TEST(Api, StatusMapping) {
  EXPECT_EQ(http_status_for(ErrorCode::kNotFound), 404);
  EXPECT_EQ(http_status_for(ErrorCode::kReplayMiss), 502);
  EXPECT_EQ(http_status_for(ErrorCode::kTransport), 502);
  EXPECT_EQ(http_status_for(ErrorCode::kIo), 500);
  EXPECT_EQ(http_status_for(ErrorCode::kContract), 422);
  EXPECT_EQ(http_status_for(ErrorCode::kSchema), 400);
}

TEST(Api, InstanceFromInput) {
  auto ner = instance_from_input({{"sentence", "Angela Merkel spricht"}}, TaskKind::kNER, "de");
  EXPECT_EQ(std::get<NerPayload>(ner.payload).tags, std::vector<std::string>(3, "O"));
  auto sum = instance_from_input({{"text", "Lang."}}, TaskKind::kSUM, "de");
  EXPECT_EQ(std::get<SumPayload>(sum.payload).document, "Lang.");
  EXPECT_THROW(instance_from_input({{"premise", "p"}}, TaskKind::kNLI, "de"), Error);
  EXPECT_THROW(instance_from_input(nlohmann::json::array(), TaskKind::kQA, "de"), Error);
}

TEST(Cli, GenPromptMatchesService) {
  auto dir = scratch("gen");
  nlohmann::json input{{"question", "Wo liegt Bonn?"}, {"context", "Bonn liegt am Rhein."}};
  {
    std::ofstream f(dir / "in.json");
    f << input.dump();
  }
  auto r = run({"gen-prompt", "--task", "qa", "--config", "ESSE", "--lang", "de", "--input",
                (dir / "in.json").string(), "--k", "1", "--format", "structured"});
  ASSERT_EQ(r.code, 0) << r.err;
  Service svc(Service::Resources::load_default(), std::make_shared<MockTranslator>());
  auto direct = svc.prompt({{"task", "qa"}, {"config_code", "ESSE"}, {"language", "de"}, {"input", input}, {"k", 1}});
  EXPECT_EQ(r.out, body(direct));
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"recommend", "--task", "qa", "--lang", "ml"}).code, kExitConfig);
  EXPECT_EQ(run({"recommend", "--task", "qa", "--lang", "ml", "--model", "llama"}).code, kExitConfig);
  EXPECT_EQ(run({"analyze", "--results", "/nonexistent/results.csv"}).code, kExitStore);
  auto dir = scratch("unseeded");
  auto r = run({"sweep", "--task", "qa", "--lang", "de", "--dataset",
                data_file("fixtures/qa_de_mini.jsonl").string(), "--provider", "replay", "--model", "gpt",
                "--replay-dir", (dir / "empty").string(), "--out", (dir / "run").string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_FALSE(fs::exists(dir / "run"));
  auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, std::string(kToolVersion) + "\n");
  fs::remove_all(dir);
}

TEST(Cli, SweepThenAnalyze) {
  auto dir = scratch("sweep");
  auto common = std::vector<std::string>{"sweep", "--task", "qa", "--lang", "de", "--dataset",
                                         data_file("fixtures/qa_de_mini.jsonl").string(), "--config",
                                         "SSZS,EEZE", "--out", (dir / "run").string()};
  auto first = run(common);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_TRUE(fs::exists(dir / "run" / "table.csv"));
  auto again = run(common);
  EXPECT_NE(again.out.find("0 new"), std::string::npos);
  auto other = common;
  other[8] = "SSZS";
  EXPECT_EQ(run(other).code, kExitStore);
  auto a = run({"analyze", "--results", (dir / "run").string(), "--direct", "SSZS", "--pretranslate", "EEZE"});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("qa scripted-echo de"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, AnalyzeGapMineOnFixture) {
  auto fixture = data_file("fixtures/qa_results.csv").string();
  auto a = run({"analyze", "--results", fixture, "--model", "gpt", "--lang", "de"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("+18.1%"), std::string::npos);
  EXPECT_NE(a.out.find("+9.0%"), std::string::npos);
  auto g = run({"gap", "--results", fixture, "--component", "context", "--model", "gpt", "--format", "structured"});
  EXPECT_EQ(g.code, 0) << g.err;
  EXPECT_NO_THROW(nlohmann::json::parse(g.out));
  auto m = run({"mine", "--results", fixture, "--task", "qa", "--model", "gpt", "--profile", "table4",
                "--consequent", "score_bin=high", "--derive-family", "gpt"});
  EXPECT_EQ(m.code, 0) << m.err;
  EXPECT_NE(m.out.find("score_bin=high"), std::string::npos);
}

TEST(Cli, ConvertAndMtQuality) {
  auto dir = scratch("conv");
  {
    std::ofstream f(dir / "in.conll");
    f << "Bonn B-LOC\nliegt O\n";
    std::ofstream p(dir / "pairs.jsonl");
    p << R"({"hypothesis": "the cat sat", "reference": "the cat sat", "language": "de"})" "\n"
      << R"({"hypothesis": "a dog", "reference": "the cat sat", "language": "hi"})" "\n"
      << R"({"hypothesis": "the cat", "reference": "the cat sat", "language": "ru"})" "\n";
    std::ofstream s(dir / "sim.txt");
    s << "de 0.9\nhi 0.2\nru 0.5\n";
  }
  auto c = run({"convert", "--from", "wikiann", "--lang", "de", "--input", (dir / "in.conll").string()});
  ASSERT_EQ(c.code, 0) << c.err;
  auto rec = nlohmann::json::parse(c.out);
  EXPECT_EQ(rec["tags"], nlohmann::json::array({"S-LOC", "O"}));
  auto q = run({"mt-quality", "--pairs", (dir / "pairs.jsonl").string(), "--similarity",
                (dir / "sim.txt").string(), "--format", "structured"});
  ASSERT_EQ(q.code, 0) << q.err;
  auto j = nlohmann::json::parse(q.out);
  EXPECT_EQ(j["languages"].size(), 3u);
  EXPECT_GT(j["correlation"]["coefficient"].get<double>(), 0.9);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace selprompt
