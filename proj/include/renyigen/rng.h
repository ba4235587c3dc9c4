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

#ifndef RENYIGEN_RNG_H_
#define RENYIGEN_RNG_H_

#include <cstdint>
#include <random>

namespace renyigen {

using Rng = std::mt19937_64;

// Independent sub-streams derived from one master seed. Each component draws
// from its own stream so that it replays regardless of what the others do.
enum class Stream : std::uint64_t {
  kInit = 1,        // parameter initialization
  kShuffle = 2,     // epoch permutations
  kNoise = 3,       // SGLD noise
  kAuxiliary = 4,   // virtual noise of the SGD auxiliary process
  kData = 5,        // dataset draws
  kLabels = 6,      // label corruption
  kProbe = 7,       // Hutchinson probes
  kSubsample = 8,   // dataset subsampling
  kRun = 9,         // per-run master seeds of an experiment
  kTeacher = 10,    // ground-truth model of synthetic tasks
};

// SplitMix64 finalizer applied to (master, stream, index).
std::uint64_t DeriveSeed(std::uint64_t master, Stream stream,
                         std::uint64_t index = 0);

inline Rng MakeRng(std::uint64_t master, Stream stream,
                   std::uint64_t index = 0) {
  return Rng(DeriveSeed(master, stream, index));
}

}  // namespace renyigen

#endif  // RENYIGEN_RNG_H_
