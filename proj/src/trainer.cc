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

#include "renyigen/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "renyigen/error.h"

namespace renyigen {

void TrainConfig::Validate(std::size_t dataset_size) const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::kInvalidInput, "learning rate must be positive");
  }
  if (algorithm == Algorithm::kSgld && !(sigma2 > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "sgld needs sigma2 > 0");
  }
  if (algorithm == Algorithm::kSgd && sigma2 != 0.0) {
    throw Error(ErrorCode::kInvalidInput,
                "sgd updates carry no noise; set sigma2 = 0 (the auxiliary "
                "process has its own variance)");
  }
  if (epochs < 0) throw Error(ErrorCode::kInvalidInput, "negative epoch count");
  if (record_every < 0) {
    throw Error(ErrorCode::kInvalidInput, "negative record stride");
  }
  if (batch_size == 0 || dataset_size < batch_size ||
      dataset_size % batch_size != 0) {
    throw Error(ErrorCode::kInvalidInput,
                "dataset size " + std::to_string(dataset_size) +
                    " must be a positive multiple of batch size " +
                    std::to_string(batch_size));
  }
}

SgldUpdate sgld_step(std::span<const double> params, const SampleSet& grads,
                     double eta, double sigma2, Rng& rng) {
  if (!(sigma2 >= 0.0)) {
    throw Error(ErrorCode::kDomainError, "noise variance must be nonnegative");
  }
  if (grads.empty() || grads.dim() != params.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "gradients do not match the parameter vector");
  }
  const std::size_t d = params.size();
  const double b = static_cast<double>(grads.size());
  std::vector<double> mean(d, 0.0);
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const auto g = grads[k];
    for (std::size_t i = 0; i < d; ++i) mean[i] += g[i];
  }
  SgldUpdate out{std::vector<double>(d), std::vector<double>(d, 0.0)};
  if (sigma2 > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
    for (double& xi : out.noise) xi = normal(rng);
  }
  for (std::size_t i = 0; i < d; ++i) {
    const double g = mean[i] / b;
    if (!std::isfinite(g)) {
      throw Error(ErrorCode::kDivergedTraining,
                  "non-finite gradient at coordinate " + std::to_string(i));
    }
    out.params[i] = params[i] - eta * g + out.noise[i];
    if (!std::isfinite(out.params[i])) {
      throw Error(ErrorCode::kDivergedTraining,
                  "non-finite parameter at coordinate " + std::to_string(i));
    }
  }
  return out;
}

AuxiliaryProcess::AuxiliaryProcess(std::size_t dim, double virtual_sigma2,
                                   std::uint64_t seed)
    : stddev_(std::sqrt(virtual_sigma2)),
      rng_(MakeRng(seed, Stream::kAuxiliary)),
      offset_(dim, 0.0) {
  if (!(virtual_sigma2 >= 0.0)) {
    throw Error(ErrorCode::kDomainError,
                "virtual noise variance must be nonnegative");
  }
}

void AuxiliaryProcess::Advance(std::span<double> increment) {
  for (std::size_t i = 0; i < offset_.size(); ++i) {
    increment[i] = stddev_ > 0.0 ? stddev_ * normal_(rng_) : 0.0;
    offset_[i] += increment[i];
  }
}

Trainer::Trainer(const MlpModel& initial, const Dataset& train,
                 const Dataset* test, TrainConfig config,
                 std::optional<AuxiliarySpec> auxiliary)
    : model_(initial),
      train_(train),
      test_(test),
      config_(config),
      shuffle_rng_(MakeRng(config.seed, Stream::kShuffle)),
      noise_rng_(MakeRng(config.seed, Stream::kNoise)) {
  config_.Validate(train.size());
  steps_per_epoch_ = config_.steps_per_epoch(train.size());
  total_steps_ = static_cast<std::size_t>(config_.epochs) * steps_per_epoch_;
  order_.resize(train.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (auxiliary.has_value()) {
    if (config_.algorithm != Algorithm::kSgd) {
      throw Error(ErrorCode::kInvalidInput,
                  "the auxiliary process applies to sgd runs only");
    }
    aux_.emplace(model_.param_count(), auxiliary->virtual_sigma2,
                 auxiliary->seed);
    aux_noise_.resize(model_.param_count());
    trajectory_.has_auxiliary = true;
    trajectory_.virtual_sigma2 = auxiliary->virtual_sigma2;
    trajectory_.aux_seed = auxiliary->seed;
  }
  trajectory_.config = config_;
  trajectory_.layer_sizes = model_.layer_sizes();
  trajectory_.bias = model_.has_bias();
  trajectory_.initial_params = model_.flatten();
  trajectory_.steps.reserve(total_steps_);
  EvaluateEpochLosses();
}

void Trainer::EvaluateEpochLosses() {
  trajectory_.train_loss.push_back(forward(model_, train_, config_.loss).mean);
  trajectory_.test_loss.push_back(
      test_ != nullptr ? forward(model_, *test_, config_.loss).mean
                       : std::numeric_limits<double>::quiet_NaN());
}

const StepView& Trainer::Step() {
  if (finished()) {
    throw Error(ErrorCode::kInvalidInput, "training already finished");
  }
  const std::size_t within = step_ % steps_per_epoch_;
  if (within == 0) std::shuffle(order_.begin(), order_.end(), shuffle_rng_);
  const std::span<const std::size_t> batch(
      order_.data() + within * config_.batch_size, config_.batch_size);

  before_ = model_.flatten();
  grads_ = per_sample_gradients(model_, train_, batch, config_.loss, &losses_);
  const double batch_loss =
      std::accumulate(losses_.begin(), losses_.end(), 0.0) /
      static_cast<double>(losses_.size());
  const double sigma2 =
      config_.algorithm == Algorithm::kSgld ? config_.sigma2 : 0.0;
  try {
    update_ = sgld_step(before_, grads_, config_.eta, sigma2, noise_rng_);
  } catch (const Error& e) {
    throw Error(ErrorCode::kDivergedTraining,
                "step " + std::to_string(step_ + 1) + ": " + e.what());
  }
  model_.unflatten(update_.params);
  if (aux_.has_value()) aux_->Advance(aux_noise_);

  ++step_;
  const int epoch = static_cast<int>((step_ - 1) / steps_per_epoch_) + 1;
  const bool epoch_end = step_ % steps_per_epoch_ == 0;

  StepRecord record;
  record.step = step_;
  record.epoch = epoch;
  record.batch.assign(batch.begin(), batch.end());
  record.batch_loss = batch_loss;
  if (config_.record_every > 0 &&
      step_ % static_cast<std::size_t>(config_.record_every) == 0) {
    record.params_before = before_;
    record.params_after = update_.params;
    record.grads = grads_;
    record.noise = update_.noise;
    if (aux_.has_value()) {
      record.aux_noise = aux_noise_;
      record.aux_offset.assign(aux_->offset().begin(), aux_->offset().end());
    }
  }
  trajectory_.steps.push_back(std::move(record));
  if (epoch_end) EvaluateEpochLosses();

  view_ = StepView{};
  view_.step = step_;
  view_.epoch = epoch;
  view_.epoch_end = epoch_end;
  view_.batch = batch;
  view_.params_before = before_;
  view_.params_after = update_.params;
  view_.grads = &grads_;
  view_.sample_losses = losses_;
  view_.batch_loss = batch_loss;
  view_.noise = update_.noise;
  if (aux_.has_value()) {
    view_.aux_noise = aux_noise_;
    view_.aux_offset = aux_->offset();
  }
  return view_;
}

Trajectory Trainer::Finish() && {
  trajectory_.final_params = model_.flatten();
  if (aux_.has_value()) {
    trajectory_.final_aux_offset.assign(aux_->offset().begin(),
                                        aux_->offset().end());
  }
  return std::move(trajectory_);
}

Trajectory run_training(const MlpModel& initial, const Dataset& train,
                        const Dataset* test, const TrainConfig& config,
                        const StepObserver& observer) {
  Trainer trainer(initial, train, test, config);
  while (!trainer.finished()) {
    const StepView& view = trainer.Step();
    if (observer) observer(view);
  }
  return std::move(trainer).Finish();
}

Trajectory attach_auxiliary(Trajectory trajectory, double virtual_sigma2,
                            std::uint64_t seed) {
  if (trajectory.config.algorithm != Algorithm::kSgd) {
    throw Error(ErrorCode::kInvalidInput,
                "the auxiliary process applies to sgd trajectories only");
  }
  const std::size_t d = trajectory.initial_params.size();
  AuxiliaryProcess aux(d, virtual_sigma2, seed);
  std::vector<double> increment(d);
  for (auto& record : trajectory.steps) {
    aux.Advance(increment);
    if (record.heavy()) {
      record.aux_noise = increment;
      record.aux_offset.assign(aux.offset().begin(), aux.offset().end());
    } else {
      record.aux_noise.clear();
      record.aux_offset.clear();
    }
  }
  trajectory.has_auxiliary = true;
  trajectory.virtual_sigma2 = virtual_sigma2;
  trajectory.aux_seed = seed;
  trajectory.final_aux_offset.assign(aux.offset().begin(), aux.offset().end());
  return trajectory;
}

MlpModel InitialModel(const std::vector<std::size_t>& layer_sizes,
                      std::uint64_t seed, bool bias) {
  return MlpModel::Initialized(layer_sizes, DeriveSeed(seed, Stream::kInit),
                               bias);
}

}  // namespace renyigen
