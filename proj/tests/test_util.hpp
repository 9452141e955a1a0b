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

#ifndef MDPP_TESTS_TEST_UTIL_HPP_
#define MDPP_TESTS_TEST_UTIL_HPP_

#include <functional>

#include <gtest/gtest.h>

#include "mdpp/error.hpp"

namespace mdpp::testing {

// The kind of the mdpp::Error thrown by f, failing the test if none is.
inline ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no mdpp::Error thrown";
  return ErrorKind::kIo;
}

}  // namespace mdpp::testing

#endif  // MDPP_TESTS_TEST_UTIL_HPP_
