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

#include <stdexcept>
#include <string>
#include <string_view>

namespace selprompt {

enum class ErrorCode {
  kParse,
  kDomain,
  kSchema,
  kNerLengthMismatch,
  kContract,
  kReplayMiss,
  kTransport,
  kUndefinedCorrelation,
  kUndefinedImprovement,
  kNotFound,
  kIo,
  kEmptyInput,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kDomain: return "domain_error";
    case ErrorCode::kSchema: return "schema_error";
    case ErrorCode::kNerLengthMismatch: return "ner_length_mismatch";
    case ErrorCode::kContract: return "contract_error";
    case ErrorCode::kReplayMiss: return "replay_miss";
    case ErrorCode::kTransport: return "transport_error";
    case ErrorCode::kUndefinedCorrelation: return "undefined_correlation";
    case ErrorCode::kUndefinedImprovement: return "undefined_improvement";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kEmptyInput: return "empty_input";
  }
  return "unknown";
}

/// Every failure raised by the toolkit. `module()` names the subsystem that
/// raised it so command-line and HTTP surfaces can qualify messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message),
        code_(code),
        module_(std::move(module)),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  // Message without the module prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string module_;
  std::string detail_;
};

}  // namespace selprompt
