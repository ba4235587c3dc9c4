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

#ifndef RENYIGEN_SAMPLES_H_
#define RENYIGEN_SAMPLES_H_

#include <cstddef>
#include <span>
#include <vector>

namespace renyigen {

// A list of equal-length real vectors stored row-major: one row per sample.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::size_t count, std::size_t dim)
      : count_(count), dim_(dim), data_(count * dim, 0.0) {}
  // Throws InvalidInput if data.size() is not a multiple of dim.
  SampleSet(std::size_t dim, std::vector<double> data);
  static SampleSet FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return count_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return count_ == 0; }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * dim_, dim_};
  }

  void push_back(std::span<const double> sample);

  const std::vector<double>& data() const { return data_; }

  // Applies the same permutation to the rows.
  SampleSet Permuted(std::span<const std::size_t> order) const;

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace renyigen

#endif  // RENYIGEN_SAMPLES_H_
