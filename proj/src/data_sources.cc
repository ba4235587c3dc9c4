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

#include "renyigen/data_sources.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>

#include "renyigen/error.h"
#include "renyigen/rng.h"

namespace renyigen {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, const char* what)
      : bytes_(bytes), what_(what) {}

  std::uint32_t ReadBigEndian32() {
    Require(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v = (v << 8) | bytes_[offset_ + k];
    offset_ += 4;
    return v;
  }

  std::span<const std::uint8_t> Take(std::size_t n) {
    Require(n);
    auto out = bytes_.subspan(offset_, n);
    offset_ += n;
    return out;
  }

  std::size_t offset() const { return offset_; }

  [[noreturn]] void Fail(const std::string& message, std::size_t at) const {
    throw Error(ErrorCode::kFormatError, std::string(what_) + " at byte offset " +
                                             std::to_string(at) + ": " + message);
  }

 private:
  void Require(std::size_t n) const {
    if (bytes_.size() - offset_ < n) {
      Fail("truncated, needed " + std::to_string(n) + " bytes but " +
               std::to_string(bytes_.size() - offset_) + " remain",
           offset_);
    }
  }

  std::span<const std::uint8_t> bytes_;
  const char* what_;
  std::size_t offset_ = 0;
};

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

SyntheticTask MakeSyntheticTask(std::uint64_t master_seed,
                                std::size_t input_dim, double noise_var) {
  if (input_dim == 0) throw Error(ErrorCode::kInvalidInput, "input_dim = 0");
  if (!(noise_var >= 0.0)) {
    throw Error(ErrorCode::kDomainError, "noise variance must be nonnegative");
  }
  Rng rng = MakeRng(master_seed, Stream::kTeacher);
  std::normal_distribution<double> normal(0.0, 1.0);
  SyntheticTask task;
  task.noise_var = noise_var;
  task.true_w.resize(input_dim);
  for (double& w : task.true_w) w = normal(rng);
  return task;
}

TrainTestSplit gen_synthetic(const SyntheticTask& task, std::size_t n,
                             std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidInput, "n must be at least 1");
  Rng rng = MakeRng(seed, Stream::kData);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_sd = std::sqrt(task.noise_var);
  const std::size_t d = task.input_dim();
  auto draw = [&](Dataset& out) {
    out.inputs = SampleSet(n, d);
    out.targets = SampleSet(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      auto x = out.inputs.row(i);
      double y = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        x[j] = normal(rng);
        y += task.true_w[j] * x[j];
      }
      const double eps = normal(rng);
      out.targets.row(i)[0] = y + (noise_sd > 0.0 ? noise_sd * eps : 0.0);
    }
  };
  TrainTestSplit split;
  draw(split.train);
  draw(split.test);
  return split;
}

ClassificationTask MakeClassificationTask(std::uint64_t master_seed,
                                          std::size_t input_dim,
                                          int num_classes) {
  if (input_dim == 0 || num_classes < 2) {
    throw Error(ErrorCode::kInvalidInput,
                "classification needs input_dim >= 1 and at least 2 classes");
  }
  ClassificationTask task;
  task.input_dim = input_dim;
  task.num_classes = num_classes;
  Rng rng = MakeRng(master_seed, Stream::kTeacher);
  std::normal_distribution<double> normal(0.0, 1.0);
  task.teacher.resize(static_cast<std::size_t>(num_classes) * input_dim);
  for (double& u : task.teacher) u = normal(rng);
  return task;
}

TrainTestSplit gen_classification(const ClassificationTask& task,
                                  std::size_t n, std::uint64_t seed) {
  Rng rng = MakeRng(seed, Stream::kData);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = task.input_dim;
  auto draw = [&](Dataset& out) {
    out.num_classes = task.num_classes;
    out.inputs = SampleSet(n, d);
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto x = out.inputs.row(i);
      for (double& v : x) v = normal(rng);
      int best = 0;
      double best_score = -INFINITY;
      for (int c = 0; c < task.num_classes; ++c) {
        double score = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          score += task.teacher[static_cast<std::size_t>(c) * d + j] * x[j];
        }
        if (score > best_score) {
          best_score = score;
          best = c;
        }
      }
      out.labels[i] = best;
    }
  };
  TrainTestSplit split;
  draw(split.train);
  draw(split.test);
  return split;
}

Dataset ParseMnistIdx(std::span<const std::uint8_t> images,
                      std::span<const std::uint8_t> labels) {
  ByteReader img(images, "images");
  const std::uint32_t image_magic = img.ReadBigEndian32();
  if (image_magic != kImagesMagic) {
    std::ostringstream msg;
    msg << "bad magic 0x" << std::hex << image_magic << ", expected 0x803";
    img.Fail(msg.str(), 0);
  }
  const std::uint32_t count = img.ReadBigEndian32();
  const std::uint32_t rows = img.ReadBigEndian32();
  const std::uint32_t cols = img.ReadBigEndian32();
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  if (pixels == 0) img.Fail("zero-sized images", 8);

  ByteReader lab(labels, "labels");
  const std::uint32_t label_magic = lab.ReadBigEndian32();
  if (label_magic != kLabelsMagic) {
    std::ostringstream msg;
    msg << "bad magic 0x" << std::hex << label_magic << ", expected 0x801";
    lab.Fail(msg.str(), 0);
  }
  const std::uint32_t label_count = lab.ReadBigEndian32();
  if (label_count != count) {
    lab.Fail("label count " + std::to_string(label_count) +
                 " differs from image count " + std::to_string(count),
             4);
  }

  Dataset data;
  data.num_classes = 10;
  data.inputs = SampleSet(count, pixels);
  data.labels.resize(count);
  const auto label_bytes = lab.Take(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (label_bytes[i] > 9) {
      lab.Fail("label value " + std::to_string(label_bytes[i]) + " > 9", 8 + i);
    }
    data.labels[i] = label_bytes[i];
    const auto px = img.Take(pixels);
    auto row = data.inputs.row(i);
    for (std::size_t p = 0; p < pixels; ++p) row[p] = px[p] / 255.0;
  }
  return data;
}

Dataset Subsample(const Dataset& data, std::size_t n, std::uint64_t seed) {
  if (n > data.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "subsample of " + std::to_string(n) + " from " +
                    std::to_string(data.size()) + " rows");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = MakeRng(seed, Stream::kSubsample);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(n);
  std::sort(order.begin(), order.end());
  return data.Subset(order);
}

Dataset load_mnist_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path,
                       std::size_t subsample_n, std::uint64_t seed) {
  const auto images = ReadFile(images_path);
  const auto labels = ReadFile(labels_path);
  Dataset all = ParseMnistIdx(images, labels);
  if (subsample_n == 0 || subsample_n == all.size()) return all;
  return Subsample(all, subsample_n, seed);
}

Dataset corrupt_labels(const Dataset& data, double rho, std::uint64_t seed) {
  if (!data.is_classification()) {
    throw Error(ErrorCode::kInvalidInput,
                "label corruption needs a classification dataset");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw Error(ErrorCode::kDomainError, "rho must lie in [0, 1]");
  }
  Dataset out = data;
  Rng rng = MakeRng(seed, Stream::kLabels);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> klass(0, data.num_classes - 1);
  for (int& label : out.labels) {
    const double u = coin(rng);
    const int replacement = klass(rng);
    if (u < rho) label = replacement;
  }
  return out;
}

}  // namespace renyigen
