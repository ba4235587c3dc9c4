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

#ifndef RENYIGEN_MLP_H_
#define RENYIGEN_MLP_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "renyigen/dataset.h"
#include "renyigen/partition.h"
#include "renyigen/samples.h"

namespace renyigen {

enum class LossKind { kMse, kSoftmaxCrossEntropy };

struct LossSpec {
  LossKind kind = LossKind::kMse;
};

// Fully connected network: ReLU on hidden layers, identity on the output.
// Parameters live in one flat vector laid out layer by layer as the weight
// matrix (row-major, out x in) followed by the bias vector.
class MlpModel {
 public:
  explicit MlpModel(std::vector<std::size_t> layer_sizes, bool bias = true);

  // Scaled uniform initialization: every parameter of a layer is drawn from
  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static MlpModel Initialized(std::vector<std::size_t> layer_sizes,
                              std::uint64_t seed, bool bias = true);

  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  std::size_t num_layers() const { return layer_sizes_.size() - 1; }
  bool has_bias() const { return bias_; }
  std::size_t param_count() const { return params_.size(); }
  std::size_t input_dim() const { return layer_sizes_.front(); }
  std::size_t output_dim() const { return layer_sizes_.back(); }

  std::size_t weight_offset(std::size_t layer) const { return weight_offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return bias_offsets_[layer]; }

  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }

  std::vector<double> flatten() const { return params_; }
  // Throws InvalidInput on length mismatch.
  void unflatten(std::span<const double> flat);

 private:
  std::vector<std::size_t> layer_sizes_;
  bool bias_;
  std::vector<std::size_t> weight_offsets_;
  std::vector<std::size_t> bias_offsets_;
  std::vector<double> params_;
};

struct ForwardResult {
  std::vector<double> per_sample;
  double mean = 0.0;
};

// mse: sum over outputs of (f(x) - y)^2. softmax_cross_entropy: -log p(label).
ForwardResult forward(const MlpModel& model, const Dataset& data,
                      LossSpec loss);

// Mean loss under an explicit parameter vector (model supplies the shape).
double mean_loss_at(const MlpModel& model, std::span<const double> params,
                     const Dataset& data, LossSpec loss);

// One row per batch sample, in flatten order. Rows are computed independently;
// ReLU has derivative 0 at 0.
SampleSet per_sample_gradients(const MlpModel& model, const Dataset& data,
                               std::span<const std::size_t> batch,
                               LossSpec loss,
                               std::vector<double>* per_sample_losses = nullptr);
SampleSet per_sample_gradients(const MlpModel& model, const Dataset& data,
                               LossSpec loss);

// Gradient of the mean loss over all of `data` at `params`.
std::vector<double> mean_gradient_at(const MlpModel& model,
                                     std::span<const double> params,
                                     const Dataset& data, LossSpec loss);

// One contiguous block per weight tensor and one per bias tensor.
Partition layer_groups(const MlpModel& model);

}  // namespace renyigen

#endif  // RENYIGEN_MLP_H_
