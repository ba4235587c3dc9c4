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

#include "renyigen/partition.h"

#include <string>

#include "renyigen/error.h"

namespace renyigen {

void ValidatePartition(const Partition& partition, std::size_t d) {
  std::vector<char> seen(d, 0);
  std::size_t covered = 0;
  for (const auto& block : partition) {
    if (block.empty()) {
      throw Error(ErrorCode::kInvalidPartition, "empty block");
    }
    for (std::size_t k = 0; k < block.size(); ++k) {
      const std::size_t i = block[k];
      if (i >= d) {
        throw Error(ErrorCode::kInvalidPartition,
                    "index " + std::to_string(i) + " out of range");
      }
      if (k > 0 && i <= block[k - 1]) {
        throw Error(ErrorCode::kInvalidPartition, "block is not increasing");
      }
      if (seen[i]) {
        throw Error(ErrorCode::kInvalidPartition,
                    "index " + std::to_string(i) + " in two blocks");
      }
      seen[i] = 1;
      ++covered;
    }
  }
  if (covered != d) {
    throw Error(ErrorCode::kInvalidPartition,
                "partition covers " + std::to_string(covered) + " of " +
                    std::to_string(d) + " indices");
  }
}

Partition WholePartition(std::size_t d) {
  IndexSet all(d);
  for (std::size_t i = 0; i < d; ++i) all[i] = i;
  return {all};
}

Partition SingletonPartition(std::size_t d) {
  Partition p(d);
  for (std::size_t i = 0; i < d; ++i) p[i] = {i};
  return p;
}

Partition RangePartition(const std::vector<std::size_t>& bounds) {
  Partition p;
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    IndexSet block;
    for (std::size_t i = bounds[k]; i < bounds[k + 1]; ++i) block.push_back(i);
    if (!block.empty()) p.push_back(std::move(block));
  }
  return p;
}

}  // namespace renyigen
