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

#ifndef RENYIGEN_TRAINER_H_
#define RENYIGEN_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "renyigen/dataset.h"
#include "renyigen/mlp.h"
#include "renyigen/rng.h"
#include "renyigen/samples.h"

namespace renyigen {

enum class Algorithm { kSgd, kSgld };

struct TrainConfig {
  Algorithm algorithm = Algorithm::kSgld;
  double eta = 0.001;
  double sigma2 = 1e-3;
  int epochs = 50;
  std::size_t batch_size = 10;
  std::uint64_t seed = 0;
  // Heavy fields (parameters, gradients, noise) are stored on steps that are
  // multiples of this stride; 0 stores none.
  int record_every = 1;
  LossSpec loss;

  // Throws InvalidInput for inconsistent settings or a dataset size that is
  // not a positive multiple of batch_size.
  void Validate(std::size_t dataset_size) const;
  std::size_t steps_per_epoch(std::size_t dataset_size) const {
    return dataset_size / batch_size;
  }
};

struct StepRecord {
  std::size_t step = 0;  // 1-based
  int epoch = 0;         // 1-based
  std::vector<std::size_t> batch;
  double batch_loss = 0.0;  // mean loss of the batch at W_{t-1}

  // Heavy fields; empty on steps that are not recorded.
  std::vector<double> params_before;
  std::vector<double> params_after;
  SampleSet grads;
  std::vector<double> noise;
  std::vector<double> aux_noise;   // xi~_t (sgd with auxiliary process)
  std::vector<double> aux_offset;  // Delta_t

  bool heavy() const { return !params_after.empty(); }
};

struct Trajectory {
  TrainConfig config;
  std::vector<std::size_t> layer_sizes;
  bool bias = true;
  std::vector<double> initial_params;
  std::vector<StepRecord> steps;
  std::vector<double> final_params;
  // Index 0 holds the loss at initialization, index e the loss after epoch e.
  std::vector<double> train_loss;
  std::vector<double> test_loss;

  bool has_auxiliary = false;
  double virtual_sigma2 = 0.0;
  std::uint64_t aux_seed = 0;
  std::vector<double> final_aux_offset;
};

struct SgldUpdate {
  std::vector<double> params;
  std::vector<double> noise;
};

// new = params - eta * mean(grads) + xi, xi ~ N(0, sigma2 I). sigma2 = 0 makes
// no draws and returns xi = 0. Throws DivergedTraining on non-finite values.
SgldUpdate sgld_step(std::span<const double> params, const SampleSet& grads,
                     double eta, double sigma2, Rng& rng);

// Random walk Delta_t = Delta_{t-1} + xi~_t with xi~_t ~ N(0, sigma2 I),
// drawn from the auxiliary stream of `seed`.
class AuxiliaryProcess {
 public:
  AuxiliaryProcess(std::size_t dim, double virtual_sigma2, std::uint64_t seed);
  // Draws xi~_t into `increment` and adds it to the offset.
  void Advance(std::span<double> increment);
  std::span<const double> offset() const { return offset_; }

 private:
  double stddev_;
  Rng rng_;
  std::normal_distribution<double> normal_;
  std::vector<double> offset_;
};

// Everything produced by one update; spans stay valid until the next Step().
struct StepView {
  std::size_t step = 0;
  int epoch = 0;
  bool epoch_end = false;
  std::span<const std::size_t> batch;
  std::span<const double> params_before;
  std::span<const double> params_after;
  const SampleSet* grads = nullptr;
  std::span<const double> sample_losses;
  double batch_loss = 0.0;
  std::span<const double> noise;
  std::span<const double> aux_noise;
  std::span<const double> aux_offset;
};

struct AuxiliarySpec {
  double virtual_sigma2 = 0.0;
  std::uint64_t seed = 0;
};

// Step-at-a-time driver of one training run. Batches are an epoch-wise
// shuffled partition of the training set; noise, shuffling and the auxiliary
// process draw from separate streams of config.seed.
class Trainer {
 public:
  Trainer(const MlpModel& initial, const Dataset& train, const Dataset* test,
          TrainConfig config, std::optional<AuxiliarySpec> auxiliary = {});

  std::size_t total_steps() const { return total_steps_; }
  std::size_t steps_done() const { return step_; }
  bool finished() const { return step_ >= total_steps_; }
  const MlpModel& model() const { return model_; }

  const StepView& Step();

  Trajectory Finish() &&;

 private:
  void EvaluateEpochLosses();

  MlpModel model_;
  const Dataset& train_;
  const Dataset* test_;
  TrainConfig config_;
  std::size_t steps_per_epoch_;
  std::size_t total_steps_;
  std::size_t step_ = 0;
  Rng shuffle_rng_;
  Rng noise_rng_;
  std::optional<AuxiliaryProcess> aux_;
  std::vector<std::size_t> order_;

  std::vector<double> before_;
  SampleSet grads_;
  std::vector<double> losses_;
  SgldUpdate update_;
  std::vector<double> aux_noise_;
  StepView view_;
  Trajectory trajectory_;
};

using StepObserver = std::function<void(const StepView&)>;

// Runs every step of `config` from `initial`; `observer` sees each step.
Trajectory run_training(const MlpModel& initial, const Dataset& train,
                        const Dataset* test, const TrainConfig& config,
                        const StepObserver& observer = {});

// Fills aux_noise / aux_offset on heavy records of an sgd trajectory.
// Throws InvalidInput for sgld trajectories. Same seed, same result.
Trajectory attach_auxiliary(Trajectory trajectory, double virtual_sigma2,
                            std::uint64_t seed);

// Initial network for a run: scaled uniform init from the kInit stream.
MlpModel InitialModel(const std::vector<std::size_t>& layer_sizes,
                      std::uint64_t seed, bool bias = true);

}  // namespace renyigen

#endif  // RENYIGEN_TRAINER_H_
