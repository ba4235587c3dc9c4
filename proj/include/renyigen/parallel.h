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

#ifndef RENYIGEN_PARALLEL_H_
#define RENYIGEN_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace renyigen {

// Name of the environment variable that fixes the worker count.
inline constexpr const char kWorkersEnv[] = "RENYIGEN_WORKERS";

// RENYIGEN_WORKERS if set to a positive integer, else one worker per
// available processor.
std::size_t WorkerCount();

// Calls body(i) for every i in [0, n) on up to `workers` threads. Bodies must
// not share mutable state. If any call throws, the exception of the smallest
// failing index is rethrown after all threads join.
void ParallelFor(std::size_t n, std::size_t workers,
                 const std::function<void(std::size_t)>& body);

}  // namespace renyigen

#endif  // RENYIGEN_PARALLEL_H_
