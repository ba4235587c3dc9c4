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

#ifndef RENYIGEN_PARTITION_H_
#define RENYIGEN_PARTITION_H_

#include <cstddef>
#include <vector>

namespace renyigen {

// Strictly increasing coordinate indices.
using IndexSet = std::vector<std::size_t>;
// Disjoint index sets whose union is [0, d).
using Partition = std::vector<IndexSet>;

// Throws InvalidPartition unless `partition` covers [0, d) disjointly with
// non-empty, strictly increasing blocks.
void ValidatePartition(const Partition& partition, std::size_t d);

Partition WholePartition(std::size_t d);
Partition SingletonPartition(std::size_t d);
// One block per contiguous range [bounds[k], bounds[k + 1]).
Partition RangePartition(const std::vector<std::size_t>& bounds);

}  // namespace renyigen

#endif  // RENYIGEN_PARTITION_H_
