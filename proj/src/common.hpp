// Copyright (c) 2026 The SCTTS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace sctts {

// Error categories; mirrored one-to-one by the status codes of the C API.
enum class ErrorCode {
  kInvalidArgument = 1,  // bad parameter value or precondition violation
  kIo = 2,               // file missing or unreadable
  kParse = 3,            // malformed file or config content
  kDomain = 4,           // semantically invalid data (duplicate id, OOV token, ...)
  kInternal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sctts
