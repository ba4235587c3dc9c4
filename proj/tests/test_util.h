//
// Copyright 2026 The renyigen Authors
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
//

#ifndef RENYIGEN_TESTS_TEST_UTIL_H_
#define RENYIGEN_TESTS_TEST_UTIL_H_

#include <gtest/gtest.h>

#include "renyigen/error.h"

// Expects `statement` to throw renyigen::Error carrying `expected`.
#define EXPECT_ERROR_CODE(statement, expected)                  \
  try {                                                         \
    statement;                                                  \
    ADD_FAILURE() << "no exception from " #statement;           \
  } catch (const ::renyigen::Error& e) {                        \
    EXPECT_EQ(e.code(), expected) << e.what();                  \
  }

#endif  // RENYIGEN_TESTS_TEST_UTIL_H_
