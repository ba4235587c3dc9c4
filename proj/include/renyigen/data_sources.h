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

#ifndef RENYIGEN_DATA_SOURCES_H_
#define RENYIGEN_DATA_SOURCES_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "renyigen/dataset.h"

namespace renyigen {

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Ground truth of the synthetic regression task y = w^T x + eps.
struct SyntheticTask {
  std::vector<double> true_w;
  double noise_var = 0.01;
  std::size_t input_dim() const { return true_w.size(); }
};

// Draws w ~ N(0, I) from the teacher stream of master_seed.
SyntheticTask MakeSyntheticTask(std::uint64_t master_seed,
                                std::size_t input_dim = 10,
                                double noise_var = 0.01);

// Fresh train and test sets of n samples each: x ~ N(0, I), eps ~ N(0, var).
TrainTestSplit gen_synthetic(const SyntheticTask& task, std::size_t n,
                             std::uint64_t seed);

// Teacher for a k-class surrogate classification task: label = argmax(U x).
struct ClassificationTask {
  std::size_t input_dim = 10;
  int num_classes = 4;
  std::vector<double> teacher;  // num_classes x input_dim, row-major
};

ClassificationTask MakeClassificationTask(std::uint64_t master_seed,
                                          std::size_t input_dim,
                                          int num_classes);

TrainTestSplit gen_classification(const ClassificationTask& task,
                                  std::size_t n, std::uint64_t seed);

// Parses IDX image (magic 0x00000803) and label (0x00000801) buffers into a
// 10-class dataset with pixels scaled to [0, 1]. Errors are FormatError with
// the byte offset at which parsing failed.
Dataset ParseMnistIdx(std::span<const std::uint8_t> images,
                      std::span<const std::uint8_t> labels);

// Reads both files and keeps a uniform subsample (without replacement) of
// subsample_n rows, in file order. subsample_n = 0 keeps everything.
Dataset load_mnist_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path,
                       std::size_t subsample_n, std::uint64_t seed);

// Uniform subsample of n rows without replacement, in original order.
Dataset Subsample(const Dataset& data, std::size_t n, std::uint64_t seed);

// Each label independently, with probability rho, becomes a uniform draw
// over all classes.
Dataset corrupt_labels(const Dataset& data, double rho, std::uint64_t seed);

}  // namespace renyigen

#endif  // RENYIGEN_DATA_SOURCES_H_
