// Copyright 2026 The Multi-DPP Authors.
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

#ifndef MDPP_ERROR_HPP_
#define MDPP_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mdpp {

enum class ErrorKind {
  kFormat,      // malformed header or document
  kLength,      // truncated payload
  kData,        // non-finite values
  kIndex,       // out-of-range view or time-step
  kValidation,  // inconsistent or duplicate content
  kConfig,      // bad hyperparameters or options
  kShape,       // dimension mismatch
  kNumeric,     // factorization failure, non-finite gradient
  kDegenerate,  // zero joint feature column
  kIo,          // filesystem failure
};

std::string_view ToString(ErrorKind kind);

// Every library failure is reported through this type; the kind maps onto the
// CLI exit code and the machine-parseable stderr prefix.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Throw(ErrorKind kind, const std::string& message);

}  // namespace mdpp

#endif  // MDPP_ERROR_HPP_
