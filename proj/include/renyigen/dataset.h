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

#ifndef RENYIGEN_DATASET_H_
#define RENYIGEN_DATASET_H_

#include <cstddef>
#include <span>
#include <vector>

#include "renyigen/samples.h"

namespace renyigen {

// Supervised samples. Regression sets fill `targets`; classification sets
// fill `labels` and `num_classes` and leave `targets` empty.
struct Dataset {
  SampleSet inputs;
  SampleSet targets;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return inputs.size(); }
  bool is_classification() const { return num_classes > 0; }

  Dataset Subset(std::span<const std::size_t> indices) const;

  // Length of one flattened (x, y) pair: input_dim plus target_dim, or plus
  // num_classes (one-hot label) for classification.
  std::size_t flat_sample_dim() const;
  // Appends the flattened pair i to `out`.
  void AppendFlatSample(std::size_t i, std::vector<double>& out) const;
  // Concatenation of all pairs in index order.
  std::vector<double> Flatten() const;
  // Concatenation of the pairs at `indices`, in the given order.
  std::vector<double> FlattenSubset(std::span<const std::size_t> indices) const;
};

}  // namespace renyigen

#endif  // RENYIGEN_DATASET_H_
