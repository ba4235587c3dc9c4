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

#ifndef RENYIGEN_SELFTEST_H_
#define RENYIGEN_SELFTEST_H_

#include <cstdint>
#include <string>
#include <vector>

namespace renyigen {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Fast oracle and property checks over every module; a few seconds in total.
std::vector<SelfTestResult> RunSelfTests(std::uint64_t seed);

}  // namespace renyigen

#endif  // RENYIGEN_SELFTEST_H_
