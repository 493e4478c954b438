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

#include <cstdlib>
#include <filesystem>
#include <string>

#ifndef SELPROMPT_DATA_DIR
#define SELPROMPT_DATA_DIR "data"
#endif

namespace selprompt {

/// Bundled data directory; SELPROMPT_DATA_DIR in the environment wins.
inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("SELPROMPT_DATA_DIR"); env && *env) return env;
  return SELPROMPT_DATA_DIR;
}

inline std::filesystem::path data_file(const std::string& rel) { return data_dir() / rel; }

}  // namespace selprompt
