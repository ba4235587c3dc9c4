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

#include "renyigen/dataset.h"

namespace renyigen {

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.num_classes = num_classes;
  out.inputs = SampleSet(indices.size(), inputs.dim());
  if (!targets.empty()) out.targets = SampleSet(indices.size(), targets.dim());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto x = inputs[indices[k]];
    std::copy(x.begin(), x.end(), out.inputs.row(k).begin());
    if (!targets.empty()) {
      const auto y = targets[indices[k]];
      std::copy(y.begin(), y.end(), out.targets.row(k).begin());
    }
    if (is_classification()) out.labels.push_back(labels[indices[k]]);
  }
  return out;
}

std::size_t Dataset::flat_sample_dim() const {
  return inputs.dim() + (is_classification()
                             ? static_cast<std::size_t>(num_classes)
                             : targets.dim());
}

void Dataset::AppendFlatSample(std::size_t i, std::vector<double>& out) const {
  const auto x = inputs[i];
  out.insert(out.end(), x.begin(), x.end());
  if (is_classification()) {
    for (int c = 0; c < num_classes; ++c) out.push_back(labels[i] == c ? 1.0 : 0.0);
  } else {
    const auto y = targets[i];
    out.insert(out.end(), y.begin(), y.end());
  }
}

std::vector<double> Dataset::Flatten() const {
  std::vector<double> out;
  out.reserve(size() * flat_sample_dim());
  for (std::size_t i = 0; i < size(); ++i) AppendFlatSample(i, out);
  return out;
}

std::vector<double> Dataset::FlattenSubset(
    std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * flat_sample_dim());
  for (std::size_t i : indices) AppendFlatSample(i, out);
  return out;
}

}  // namespace renyigen
