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

#include "renyigen/samples.h"

#include <algorithm>
#include <string>

#include "renyigen/error.h"

namespace renyigen {

SampleSet::SampleSet(std::size_t dim, std::vector<double> data)
    : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0 || data_.size() % dim_ != 0) {
    throw Error(ErrorCode::kInvalidInput,
                "sample buffer of length " + std::to_string(data_.size()) +
                    " is not a multiple of dimension " + std::to_string(dim_));
  }
  count_ = data_.size() / dim_;
}

SampleSet SampleSet::FromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  SampleSet out;
  out.dim_ = rows.front().size();
  for (const auto& r : rows) out.push_back(r);
  return out;
}

void SampleSet::push_back(std::span<const double> sample) {
  if (count_ == 0 && dim_ == 0) dim_ = sample.size();
  if (sample.size() != dim_) {
    throw Error(ErrorCode::kInvalidInput,
                "sample of dimension " + std::to_string(sample.size()) +
                    " pushed into a set of dimension " + std::to_string(dim_));
  }
  data_.insert(data_.end(), sample.begin(), sample.end());
  ++count_;
}

SampleSet SampleSet::Permuted(std::span<const std::size_t> order) const {
  SampleSet out(count_, dim_);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto src = (*this)[order[i]];
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace renyigen
