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
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include "httplib.h"
#include "selprompt/error.hpp"

namespace selprompt {

using Headers = std::map<std::string, std::string>;

struct HttpResponse {
  int status = 0;  // 0 when no response arrived
  std::string body;
  Headers headers;
  std::string error;
};

/// The only component that touches the network. Providers receive one so
/// tests can count or script calls.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& base_url, const std::string& path,
                            const Headers& headers, const std::string& body) = 0;
};

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(120))
      : timeout_(timeout) {}

  HttpResponse post(const std::string& base_url, const std::string& path,
                    const Headers& headers, const std::string& body) override {
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    HttpResponse out;
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) out.headers[k] = v;
    return out;
  }

 private:
  std::chrono::seconds timeout_;
};

/// Bounded exponential backoff. A 429 honours Retry-After (seconds) when the
/// server sends one; 5xx and connection failures back off; other statuses
/// fail immediately.
struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{30000};
  std::function<void(std::chrono::milliseconds)> sleep =
      [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };

  std::chrono::milliseconds backoff(int attempt) const {
    double ms = static_cast<double>(initial_delay.count());
    for (int i = 1; i < attempt; ++i) ms *= multiplier;
    ms = std::min(ms, static_cast<double>(max_delay.count()));
    return std::chrono::milliseconds(static_cast<long long>(ms));
  }
};

struct RetriedResponse {
  HttpResponse response;
  int attempts = 0;
};

inline RetriedResponse post_with_retries(HttpTransport& transport,
                                         const RetryPolicy& policy,
                                         const std::string& module,
                                         const std::string& base_url,
                                         const std::string& path,
                                         const Headers& headers,
                                         const std::string& body) {
  const int max_attempts = std::max(1, policy.max_attempts);
  std::string last;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    auto res = transport.post(base_url, path, headers, body);
    if (res.status >= 200 && res.status < 300) return {std::move(res), attempt};
    bool retryable = res.status == 0 || res.status == 429 || res.status >= 500;
    last = res.status == 0 ? "no response (" + res.error + ")"
                           : "HTTP " + std::to_string(res.status);
    if (!retryable) break;
    if (attempt == max_attempts) break;
    auto delay = policy.backoff(attempt);
    if (res.status == 429) {
      auto it = res.headers.find("Retry-After");
      if (it != res.headers.end()) {
        char* end = nullptr;
        long secs = std::strtol(it->second.c_str(), &end, 10);
        if (end != it->second.c_str() && secs >= 0) {
          delay = std::min<std::chrono::milliseconds>(std::chrono::seconds(secs),
                                                      policy.max_delay);
        }
      }
    }
    policy.sleep(delay);
  }
  throw Error(ErrorCode::kTransport, module,
              "request to " + base_url + path + " failed: " + last);
}

/// Reads a credential from the environment; empty when unset.
inline std::string credential_from_env(const std::string& var) {
  const char* v = std::getenv(var.c_str());
  return v ? std::string(v) : std::string();
}

}  // namespace selprompt
