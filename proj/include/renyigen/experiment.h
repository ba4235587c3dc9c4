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

#ifndef RENYIGEN_EXPERIMENT_H_
#define RENYIGEN_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "renyigen/dataset.h"
#include "renyigen/mlp.h"
#include "renyigen/report.h"
#include "renyigen/samples.h"
#include "renyigen/trainer.h"

namespace renyigen {

enum class TaskKind {
  kSynthetic,       // y = w^T x + eps regression
  kClassification,  // argmax-teacher surrogate for label-noise runs
  kMnist,           // IDX files
};

enum class PartitionMode { kFull, kPerLayer, kPerParam };

struct ExperimentConfig {
  TaskKind task = TaskKind::kSynthetic;
  // train.seed is the master seed; every run derives its own.
  TrainConfig train;
  std::vector<std::size_t> hidden = {10};
  std::size_t n = 100;
  std::size_t runs = 100;
  double label_noise = 0.0;
  double kernel_quantile = 0.15;
  bool apply_normalizer = false;
  PartitionMode partition_mode = PartitionMode::kPerLayer;
  int mi_epoch_stride = 1;
  std::filesystem::path output_dir = "out";

  // Virtual noise of the sgd auxiliary process.
  double virtual_sigma2 = 1e-3;
  int hessian_probes = 64;
  std::size_t hessian_max_points = 1000;

  // Full covariance is accumulated only up to this dimension.
  std::size_t full_covariance_limit = 1024;
  bool compute_gradient_bounds = true;
  bool compute_cond_mi = true;
  bool keep_trajectories = false;
  // 0 selects WorkerCount().
  std::size_t workers = 0;

  std::size_t input_dim = 10;
  int num_classes = 4;
  double noise_var = 0.01;

  std::filesystem::path mnist_images;
  std::filesystem::path mnist_labels;

  // Table 1 rows.
  static ExperimentConfig SyntheticDefaults();
  static ExperimentConfig MnistDefaults();
  // Label-noise surrogate: SGD on a 4-class teacher task with n = 1000.
  static ExperimentConfig ClassificationDefaults();

  std::vector<std::size_t> layer_sizes() const;
  // Throws InvalidInput for inconsistent settings.
  void Validate() const;
};

nlohmann::json ExperimentConfigToJson(const ExperimentConfig& config);
// Starts from the defaults of j["task"] (synthetic when absent) and applies
// the remaining keys.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);

// Cross-run samples at one recorded epoch; row r of each view belongs to the
// r-th effective run. For sgd the weights are those of the auxiliary process.
struct MiEpochSamples {
  int epoch = 0;
  std::size_t step = 0;
  SampleSet w;       // W_t
  SampleSet w_prev;  // W_{t-1}
  SampleSet batch;   // flattened B_t
};

struct MiSamples {
  std::vector<std::size_t> run_ids;
  SampleSet s;  // flattened training set of each run
  std::vector<MiEpochSamples> epochs;
};

struct ExperimentResult {
  BoundReport report;
  MiSamples mi;
  std::vector<Trajectory> trajectories;  // when keep_trajectories is set
};

// Seed, data and initial model of run `run`, exactly as orchestrate builds
// them.
struct RunInputs {
  std::uint64_t seed = 0;
  Dataset train;
  Dataset test;
  MlpModel model;
};
RunInputs PrepareRun(const ExperimentConfig& config, std::size_t run);

ExperimentResult orchestrate(const ExperimentConfig& config);

struct TrajectoryReportOptions {
  PartitionMode partition_mode = PartitionMode::kPerLayer;
  std::size_t full_covariance_limit = 1024;
  int epoch_stride = 1;
  // Mean Hessian trace at W_T for the sgd term; NaN leaves the term unknown.
  double hessian_trace = std::numeric_limits<double>::quiet_NaN();
};

// Recomputes the loss and gradient columns from trajectories that carry heavy
// records on every step. The MI columns are NaN since trajectories do not
// store the training sets.
BoundReport ReportFromTrajectories(std::span<const Trajectory> runs,
                                   const TrajectoryReportOptions& options);

// WriteReportFiles plus mi_samples.json (shapes of the recorded samples).
void emit_report(const BoundReport& report, const MiSamples& mi,
                 const std::filesystem::path& output_dir);

}  // namespace renyigen

#endif  // RENYIGEN_EXPERIMENT_H_
