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

#include "renyigen/mlp.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "renyigen/error.h"
#include "renyigen/rng.h"

namespace renyigen {
namespace {

struct Workspace {
  std::vector<std::vector<double>> pre;   // z per layer
  std::vector<std::vector<double>> post;  // a per layer, post[0] = input
  std::vector<double> delta;
  std::vector<double> prev_delta;

  explicit Workspace(const MlpModel& model) {
    const auto& sizes = model.layer_sizes();
    post.resize(sizes.size());
    pre.resize(sizes.size() - 1);
    for (std::size_t l = 0; l < sizes.size(); ++l) post[l].resize(sizes[l]);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) pre[l].resize(sizes[l + 1]);
  }
};

void CheckData(const MlpModel& model, const Dataset& data, LossSpec loss) {
  if (data.inputs.dim() != model.input_dim() && data.size() > 0) {
    throw Error(ErrorCode::kInvalidInput,
                "input dimension " + std::to_string(data.inputs.dim()) +
                    " does not match network input " +
                    std::to_string(model.input_dim()));
  }
  if (loss.kind == LossKind::kMse) {
    if (data.targets.size() != data.size() ||
        (data.size() > 0 && data.targets.dim() != model.output_dim())) {
      throw Error(ErrorCode::kInvalidInput,
                  "mse targets must have one row of output dimension per input");
    }
  } else {
    if (!data.is_classification() ||
        static_cast<std::size_t>(data.num_classes) != model.output_dim() ||
        data.labels.size() != data.size()) {
      throw Error(ErrorCode::kInvalidInput,
                  "cross-entropy needs labels over output_dim classes");
    }
  }
}

// Loss of sample i; when `grad` is non-null it receives the full gradient.
double SampleLoss(const MlpModel& model, std::span<const double> params,
                  const Dataset& data, std::size_t i, LossSpec loss,
                  double* grad, Workspace& ws) {
  const auto& sizes = model.layer_sizes();
  const std::size_t layers = model.num_layers();
  const auto x = data.inputs[i];
  std::copy(x.begin(), x.end(), ws.post[0].begin());

  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = sizes[l];
    const std::size_t out = sizes[l + 1];
    const double* w = params.data() + model.weight_offset(l);
    const double* b = model.has_bias() ? params.data() + model.bias_offset(l) : nullptr;
    const auto& a = ws.post[l];
    auto& z = ws.pre[l];
    for (std::size_t o = 0; o < out; ++o) {
      double sum = b != nullptr ? b[o] : 0.0;
      const double* row = w + o * in;
      for (std::size_t k = 0; k < in; ++k) sum += row[k] * a[k];
      z[o] = sum;
    }
    auto& next = ws.post[l + 1];
    if (l + 1 == layers) {
      std::copy(z.begin(), z.end(), next.begin());
    } else {
      for (std::size_t o = 0; o < out; ++o) next[o] = z[o] > 0.0 ? z[o] : 0.0;
    }
  }

  const auto& output = ws.post[layers];
  const std::size_t k = output.size();
  ws.delta.assign(k, 0.0);
  double value = 0.0;
  if (loss.kind == LossKind::kMse) {
    const auto y = data.targets[i];
    for (std::size_t o = 0; o < k; ++o) {
      const double r = output[o] - y[o];
      value += r * r;
      ws.delta[o] = 2.0 * r;
    }
  } else {
    const double top = *std::max_element(output.begin(), output.end());
    double sum = 0.0;
    for (std::size_t o = 0; o < k; ++o) sum += std::exp(output[o] - top);
    const double lse = top + std::log(sum);
    const auto label = static_cast<std::size_t>(data.labels[i]);
    value = std::max(0.0, lse - output[label]);
    for (std::size_t o = 0; o < k; ++o) {
      ws.delta[o] = std::exp(output[o] - lse) - (o == label ? 1.0 : 0.0);
    }
  }
  if (grad == nullptr) return value;

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = sizes[l];
    const std::size_t out = sizes[l + 1];
    const auto& a = ws.post[l];
    double* gw = grad + model.weight_offset(l);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = ws.delta[o];
      double* row = gw + o * in;
      for (std::size_t c = 0; c < in; ++c) row[c] = d * a[c];
    }
    if (model.has_bias()) {
      double* gb = grad + model.bias_offset(l);
      for (std::size_t o = 0; o < out; ++o) gb[o] = ws.delta[o];
    }
    if (l == 0) break;
    const double* w = params.data() + model.weight_offset(l);
    const auto& z_prev = ws.pre[l - 1];
    ws.prev_delta.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = ws.delta[o];
      if (d == 0.0) continue;
      const double* row = w + o * in;
      for (std::size_t c = 0; c < in; ++c) ws.prev_delta[c] += row[c] * d;
    }
    for (std::size_t c = 0; c < in; ++c) {
      if (!(z_prev[c] > 0.0)) ws.prev_delta[c] = 0.0;
    }
    ws.delta.swap(ws.prev_delta);
  }
  return value;
}

}  // namespace

MlpModel::MlpModel(std::vector<std::size_t> layer_sizes, bool bias)
    : layer_sizes_(std::move(layer_sizes)), bias_(bias) {
  if (layer_sizes_.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "a network needs at least 2 layer sizes");
  }
  for (std::size_t s : layer_sizes_) {
    if (s == 0) throw Error(ErrorCode::kInvalidInput, "layer size 0");
  }
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    weight_offsets_.push_back(offset);
    offset += layer_sizes_[l] * layer_sizes_[l + 1];
    bias_offsets_.push_back(offset);
    if (bias_) offset += layer_sizes_[l + 1];
  }
  params_.assign(offset, 0.0);
}

MlpModel MlpModel::Initialized(std::vector<std::size_t> layer_sizes,
                               std::uint64_t seed, bool bias) {
  MlpModel model(std::move(layer_sizes), bias);
  Rng rng(seed);
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const double fan_in = static_cast<double>(model.layer_sizes_[l]);
    std::uniform_real_distribution<double> u(-1.0 / std::sqrt(fan_in),
                                             1.0 / std::sqrt(fan_in));
    const std::size_t end =
        l + 1 < model.num_layers() ? model.weight_offsets_[l + 1] : model.params_.size();
    for (std::size_t i = model.weight_offsets_[l]; i < end; ++i) {
      model.params_[i] = u(rng);
    }
  }
  return model;
}

void MlpModel::unflatten(std::span<const double> flat) {
  if (flat.size() != params_.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "parameter vector of length " + std::to_string(flat.size()) +
                    ", expected " + std::to_string(params_.size()));
  }
  std::copy(flat.begin(), flat.end(), params_.begin());
}

ForwardResult forward(const MlpModel& model, const Dataset& data,
                      LossSpec loss) {
  CheckData(model, data, loss);
  Workspace ws(model);
  ForwardResult result;
  result.per_sample.resize(data.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    result.per_sample[i] =
        SampleLoss(model, model.params(), data, i, loss, nullptr, ws);
    sum += result.per_sample[i];
  }
  result.mean = data.size() > 0 ? sum / static_cast<double>(data.size()) : 0.0;
  return result;
}

double mean_loss_at(const MlpModel& model, std::span<const double> params,
                    const Dataset& data, LossSpec loss) {
  CheckData(model, data, loss);
  Workspace ws(model);
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    sum += SampleLoss(model, params, data, i, loss, nullptr, ws);
  }
  return sum / static_cast<double>(data.size());
}

SampleSet per_sample_gradients(const MlpModel& model, const Dataset& data,
                               std::span<const std::size_t> batch,
                               LossSpec loss,
                               std::vector<double>* per_sample_losses) {
  CheckData(model, data, loss);
  if (batch.empty()) throw Error(ErrorCode::kInvalidInput, "empty batch");
  Workspace ws(model);
  SampleSet grads(batch.size(), model.param_count());
  if (per_sample_losses != nullptr) per_sample_losses->resize(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (batch[k] >= data.size()) {
      throw Error(ErrorCode::kInvalidInput, "batch index out of range");
    }
    const double value = SampleLoss(model, model.params(), data, batch[k], loss,
                                    grads.row(k).data(), ws);
    if (per_sample_losses != nullptr) (*per_sample_losses)[k] = value;
  }
  return grads;
}

SampleSet per_sample_gradients(const MlpModel& model, const Dataset& data,
                               LossSpec loss) {
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return per_sample_gradients(model, data, all, loss);
}

std::vector<double> mean_gradient_at(const MlpModel& model,
                                     std::span<const double> params,
                                     const Dataset& data, LossSpec loss) {
  CheckData(model, data, loss);
  Workspace ws(model);
  const std::size_t d = model.param_count();
  std::vector<double> sum(d, 0.0), g(d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    SampleLoss(model, params, data, i, loss, g.data(), ws);
    for (std::size_t j = 0; j < d; ++j) sum[j] += g[j];
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  for (double& s : sum) s *= inv;
  return sum;
}

Partition layer_groups(const MlpModel& model) {
  std::vector<std::size_t> bounds{0};
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    bounds.push_back(model.bias_offset(l));
    if (model.has_bias()) {
      bounds.push_back(model.bias_offset(l) + model.layer_sizes()[l + 1]);
    }
  }
  return RangePartition(bounds);
}

}  // namespace renyigen
