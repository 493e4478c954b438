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

// Content-keyed append-only record store. Two layouts: one JSON object per
// line in a single file, or one <key>.json file per record in a directory.
// A key is written once; later writers observe the first value.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"
#include "selprompt/error.hpp"

namespace selprompt {

enum class StoreLayout { kLineFile, kDirectory, kMemory };

inline StoreLayout parse_store_layout(std::string_view s) {
  if (s == "file" || s == "jsonl") return StoreLayout::kLineFile;
  if (s == "dir" || s == "directory") return StoreLayout::kDirectory;
  if (s == "memory") return StoreLayout::kMemory;
  throw Error(ErrorCode::kParse, "store", "unknown store layout '" + std::string(s) + "'");
}

/// Drops an incomplete trailing line left by an interrupted writer. Returns
/// true when the file was repaired.
inline bool repair_truncated_tail(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return false;
  std::ifstream in(path, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  if (data.empty() || data.back() == '\n') return false;
  auto cut = data.rfind('\n');
  std::size_t keep = cut == std::string::npos ? 0 : cut + 1;
  std::filesystem::resize_file(path, keep, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "store", "cannot repair '" + path.string() + "': " + ec.message());
  }
  return true;
}

class KeyedStore {
 public:
  KeyedStore() = default;  // in-memory

  KeyedStore(std::filesystem::path path, StoreLayout layout)
      : path_(std::move(path)), layout_(layout) {
    std::error_code ec;
    if (layout_ == StoreLayout::kDirectory) {
      std::filesystem::create_directories(path_, ec);
      if (ec) fail("cannot create directory", ec);
    } else if (layout_ == StoreLayout::kLineFile) {
      if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
      repair_truncated_tail(path_);
      load_lines();
      out_.open(path_, std::ios::app | std::ios::binary);
      if (!out_) fail("cannot open for append", {});
    }
  }

  KeyedStore(const KeyedStore&) = delete;
  KeyedStore& operator=(const KeyedStore&) = delete;

  std::optional<nlohmann::json> get(const std::string& key) const {
    std::lock_guard lock(mu_);
    return get_locked(key);
  }

  /// Stores `record` under `key` unless the key already exists; returns
  /// the value that the store holds afterwards.
  nlohmann::json put_if_absent(const std::string& key, nlohmann::json record) {
    std::lock_guard lock(mu_);
    if (auto existing = get_locked(key)) return *existing;
    record["key"] = key;
    switch (layout_) {
      case StoreLayout::kMemory:
        break;
      case StoreLayout::kLineFile:
        out_ << record.dump() << '\n';
        out_.flush();
        if (!out_) fail("write failed", {});
        break;
      case StoreLayout::kDirectory: {
        // Write aside, then hard-link into place; the link fails if another
        // process got there first.
        auto final_path = path_ / (key + ".json");
        auto tmp = path_ / (key + ".json.tmp" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        {
          std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
          f << record.dump() << '\n';
          if (!f) fail("write failed", {});
        }
        std::error_code ec;
        std::filesystem::create_hard_link(tmp, final_path, ec);
        std::filesystem::remove(tmp);
        if (ec) {
          if (auto existing = read_file(final_path)) {
            cache_[key] = *existing;
            return *existing;
          }
          fail("cannot publish record", ec);
        }
        break;
      }
    }
    cache_[key] = record;
    return record;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    if (layout_ != StoreLayout::kDirectory) return cache_.size();
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(path_)) {
      if (e.path().extension() == ".json") ++n;
    }
    return n;
  }

  const std::filesystem::path& path() const { return path_; }
  StoreLayout layout() const { return layout_; }

 private:
  [[noreturn]] void fail(const std::string& what, std::error_code ec) const {
    throw Error(ErrorCode::kIo, "store",
                what + " '" + path_.string() + "'" + (ec ? ": " + ec.message() : ""));
  }

  static std::optional<nlohmann::json> read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return std::nullopt;
    std::stringstream ss;
    ss << f.rdbuf();
    try {
      return nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
  }

  std::optional<nlohmann::json> get_locked(const std::string& key) const {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    if (layout_ == StoreLayout::kDirectory) {
      if (auto rec = read_file(path_ / (key + ".json"))) {
        cache_[key] = *rec;
        return rec;
      }
    }
    return std::nullopt;
  }

  void load_lines() {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kIo, "store",
                    path_.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      auto key = rec.value("key", "");
      if (!key.empty()) cache_.emplace(key, std::move(rec));  // first wins
    }
  }

  std::filesystem::path path_;
  StoreLayout layout_ = StoreLayout::kMemory;
  mutable std::mutex mu_;
  mutable std::map<std::string, nlohmann::json> cache_;
  std::ofstream out_;
};

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace selprompt
