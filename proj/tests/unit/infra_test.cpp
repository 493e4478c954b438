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

#include <atomic>
#include <deque>
#include <fstream>
#include <random>
#include <thread>

#include "selprompt/gateway.hpp"
#include "selprompt/store.hpp"
#include "selprompt/translation.hpp"
#include "selprompt/transport.hpp"

namespace selprompt {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("selprompt-infra-" + name + "-" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  return p;
}

class FakeTransport final : public HttpTransport {
 public:
  HttpResponse post(const std::string&, const std::string& path, const Headers& headers,
                    const std::string& body) override {
    ++calls;
    last_path = path;
    last_headers = headers;
    last_body = body;
    if (replies.empty()) return {500, "", {}, ""};
    auto r = replies.front();
    replies.pop_front();
    return r;
  }
  std::deque<HttpResponse> replies;
  int calls = 0;
  std::string last_path, last_body;
  Headers last_headers;
};

RetryPolicy recording_policy(std::vector<std::chrono::milliseconds>* sleeps) {
  RetryPolicy p;
  p.sleep = [sleeps](std::chrono::milliseconds d) { sleeps->push_back(d); };
  return p;
}

TEST(Store, LineFilePersistsAndFirstWriteWins) {
  auto dir = fresh_dir("line");
  {
    KeyedStore s(dir / "s.jsonl", StoreLayout::kLineFile);
    s.put_if_absent("k1", {{"v", 1}});
    auto held = s.put_if_absent("k1", {{"v", 2}});
    EXPECT_EQ(held["v"], 1);
  }
  KeyedStore again(dir / "s.jsonl", StoreLayout::kLineFile);
  EXPECT_EQ(again.size(), 1u);
  EXPECT_EQ((*again.get("k1"))["v"], 1);
  EXPECT_FALSE(again.get("k2").has_value());
  fs::remove_all(dir);
}

TEST(Store, TruncatedTailIsRepaired) {
  auto dir = fresh_dir("tail");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "s.jsonl");
    f << R"({"key":"a","v":1})" << "\n" << R"({"key":"b","v":)";
  }
  KeyedStore s(dir / "s.jsonl", StoreLayout::kLineFile);
  EXPECT_EQ(s.size(), 1u);
  s.put_if_absent("b", {{"v", 2}});
  KeyedStore t(dir / "s.jsonl", StoreLayout::kLineFile);
  EXPECT_EQ(t.size(), 2u);
  fs::remove_all(dir);
}

TEST(Store, DirectoryLayoutConcurrentWriters) {
  auto dir = fresh_dir("dir");
  KeyedStore a(dir, StoreLayout::kDirectory);
  KeyedStore b(dir, StoreLayout::kDirectory);
  std::vector<std::thread> ts;
  std::atomic<int> ones{0};
  for (int i = 0; i < 8; ++i) {
    ts.emplace_back([&, i] {
      auto& s = i % 2 ? a : b;
      auto held = s.put_if_absent("same", {{"writer", i}});
      ones += held.contains("writer");
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(ones.load(), 8);
  EXPECT_EQ((*a.get("same"))["writer"], (*b.get("same"))["writer"]);
  EXPECT_EQ(a.size(), 1u);
  fs::remove_all(dir);
}

TEST(Store, LayoutNames) {
  EXPECT_EQ(parse_store_layout("jsonl"), StoreLayout::kLineFile);
  EXPECT_EQ(parse_store_layout("dir"), StoreLayout::kDirectory);
  EXPECT_THROW(parse_store_layout("s3"), Error);
}

TEST(Transport, RetriesThenSucceeds) {
  FakeTransport t;
  t.replies = {{503, "", {}, ""}, {0, "", {}, "refused"}, {200, "ok", {}, ""}};
  std::vector<std::chrono::milliseconds> sleeps;
  auto r = post_with_retries(t, recording_policy(&sleeps), "test", "http://x", "/p", {}, "{}");
  EXPECT_EQ(r.attempts, 3);
  EXPECT_EQ(r.response.body, "ok");
  EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500),
                                                            std::chrono::milliseconds(1000)}));
}

TEST(Transport, RetryAfterHonoured) {
  FakeTransport t;
  t.replies = {{429, "", {{"Retry-After", "3"}}, ""}, {200, "ok", {}, ""}};
  std::vector<std::chrono::milliseconds> sleeps;
  post_with_retries(t, recording_policy(&sleeps), "test", "http://x", "/p", {}, "{}");
  ASSERT_EQ(sleeps.size(), 1u);
  EXPECT_EQ(sleeps[0], std::chrono::milliseconds(3000));
}

TEST(Transport, GivesUpWithTransportError) {
  FakeTransport t;
  std::vector<std::chrono::milliseconds> sleeps;
  try {
    post_with_retries(t, recording_policy(&sleeps), "test", "http://x", "/p", {}, "{}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
  EXPECT_EQ(t.calls, 4);
  FakeTransport bad;
  bad.replies = {{401, "", {}, ""}};
  EXPECT_THROW(post_with_retries(bad, recording_policy(&sleeps), "test", "http://x", "/p", {}, "{}"), Error);
  EXPECT_EQ(bad.calls, 1);
}

TEST(Translation, MockRoundTripIsIdentity) {
  MockTranslator m;
  auto there = translate({"Hallo Welt", "de", "en"}, m, nullptr);
  EXPECT_EQ(there, "⟦de→en⟧Hallo Welt");
  EXPECT_EQ(translate({there, "en", "de"}, m, nullptr), "Hallo Welt");
  EXPECT_EQ(translate({"same", "DE", "de"}, m, nullptr), "same");
}

TEST(Translation, CacheAndReplay) {
  auto dir = fresh_dir("mt");
  MockTranslator m;
  {
    TranslationCache cache(dir / "translations.jsonl", StoreLayout::kLineFile);
    translate({"eins", "de", "en"}, m, &cache);
    translate({"eins", "de", "en"}, m, &cache);
    EXPECT_EQ(cache.size(), 1u);
  }
  auto recorded = std::make_shared<TranslationCache>(dir / "translations.jsonl", StoreLayout::kLineFile);
  ReplayTranslator replay("mock", recorded);
  EXPECT_EQ(translate({"eins", "de", "en"}, replay, nullptr), "⟦de→en⟧eins");
  try {
    translate({"zwei", "de", "en"}, replay, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReplayMiss);
  }
  fs::remove_all(dir);
}

TEST(Translation, HttpAdapter) {
  auto t = std::make_shared<FakeTransport>();
  t->replies = {{200, R"({"data": {"out": "hello"}})", {}, ""}};
  HttpTranslator h({"vendor", "http://mt", "/translate", "", "/data/out"}, t);
  EXPECT_EQ(h.translate_text({"hallo", "de", "en"}), "hello");
  auto sent = nlohmann::json::parse(t->last_body);
  EXPECT_EQ(sent["source"], "de");
  t->replies = {{200, R"({"nope": 1})", {}, ""}};
  EXPECT_THROW(h.translate_text({"x", "de", "en"}), Error);
}

CompiledPrompt prompt_of(std::string text) {
  CompiledPrompt p;
  p.text = std::move(text);
  p.component_spans = {{"context", 0, p.text.size()}};
  return p;
}

TEST(Gateway, StoreServesRepeatsAndReplay) {
  auto dir = fresh_dir("gw");
  int calls = 0;
  ScriptedProvider sp("scripted", [&](const CompiledPrompt& p) {
    ++calls;
    return "re: " + p.text;
  });
  auto store = std::make_shared<RecordStore>(dir / "completions.jsonl", StoreLayout::kLineFile);
  auto a = complete(prompt_of("hi"), sp, store.get());
  auto b = complete(prompt_of("hi"), sp, store.get());
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(a.response_text, b.response_text);
  EXPECT_EQ(a.key, completion_key("scripted", sp.params(), "hi"));

  ReplayProvider rp("scripted", store);
  EXPECT_TRUE(rp.ready());
  EXPECT_EQ(complete(prompt_of("hi"), rp, nullptr).response_text, "re: hi");
  try {
    complete(prompt_of("other"), rp, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReplayMiss);
  }
  ReplayProvider empty("scripted", std::make_shared<RecordStore>());
  EXPECT_FALSE(empty.ready());
  fs::remove_all(dir);
}

TEST(Gateway, KeyDependsOnParams) {
  ModelParams a, b;
  b.temperature = 0.7;
  EXPECT_NE(completion_key("m", a, "p"), completion_key("m", b, "p"));
  EXPECT_NE(completion_key("m", a, "p"), completion_key("n", a, "p"));
}

TEST(Gateway, VendorShapes) {
  auto t = std::make_shared<FakeTransport>();
  t->replies = {{200, R"({"choices": [{"message": {"content": "A"}}]})", {}, ""}};
  OpenAiChatProvider oa({"gpt-x", "http://oa", ""}, t);
  EXPECT_EQ(oa.call(prompt_of("q")).text, "A");
  EXPECT_EQ(t->last_path, "/v1/chat/completions");
  EXPECT_EQ(nlohmann::json::parse(t->last_body)["messages"][0]["content"], "q");

  t->replies = {{200, R"({"candidates": [{"content": {"parts": [{"text": "B"}]}}]})", {}, ""}};
  GeminiProvider gm({"gem", "http://g", ""}, t);
  EXPECT_EQ(gm.call(prompt_of("q")).text, "B");
  EXPECT_EQ(t->last_path, "/v1beta/models/gem:generateContent");
}

TEST(Gateway, RateLimiterBoundsInFlight) {
  RateLimiter lim(2, std::chrono::milliseconds(0));
  std::atomic<int> live{0}, peak{0};
  ScriptedProvider slow("s", [&](const CompiledPrompt&) {
    int now = ++live;
    int old = peak.load();
    while (now > old && !peak.compare_exchange_weak(old, now)) {}
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --live;
    return std::string("x");
  });
  std::vector<std::thread> ts;
  for (int i = 0; i < 8; ++i) {
    ts.emplace_back([&] {
      auto permit = lim.acquire();
      slow.call(prompt_of("p"));
    });
  }
  for (auto& th : ts) th.join();
  EXPECT_LE(peak.load(), 2);
  EXPECT_LE(lim.peak_in_flight(), 2u);
}

}  // namespace
}  // namespace selprompt
