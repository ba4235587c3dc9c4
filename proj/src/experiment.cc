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

#include "renyigen/experiment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>

#include "renyigen/bounds.h"
#include "renyigen/data_sources.h"
#include "renyigen/entropy.h"
#include "renyigen/error.h"
#include "renyigen/hessian.h"
#include "renyigen/kernel.h"
#include "renyigen/parallel.h"
#include "renyigen/partition.h"
#include "renyigen/rng.h"
#include "renyigen/trajectory_io.h"

namespace renyigen {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* TaskName(TaskKind t) {
  switch (t) {
    case TaskKind::kSynthetic: return "synthetic";
    case TaskKind::kClassification: return "classification";
    case TaskKind::kMnist: return "mnist";
  }
  return "?";
}

const char* PartitionName(PartitionMode p) {
  switch (p) {
    case PartitionMode::kFull: return "full";
    case PartitionMode::kPerLayer: return "per_layer";
    case PartitionMode::kPerParam: return "per_param";
  }
  return "?";
}

TaskKind ParseTask(const std::string& s) {
  if (s == "synthetic") return TaskKind::kSynthetic;
  if (s == "classification") return TaskKind::kClassification;
  if (s == "mnist") return TaskKind::kMnist;
  throw Error(ErrorCode::kInvalidInput, "unknown task " + s);
}

PartitionMode ParsePartition(const std::string& s) {
  if (s == "full") return PartitionMode::kFull;
  if (s == "per_layer") return PartitionMode::kPerLayer;
  if (s == "per_param") return PartitionMode::kPerParam;
  throw Error(ErrorCode::kInvalidInput, "unknown partition_mode " + s);
}

// Gaussian kernel with the heuristic width; coincident samples fall back to
// width 1, where every kernel value is 1 anyway.
KernelSpec KernelFor(const SampleSet& samples, double quantile) {
  try {
    return AutoGaussianKernel(samples, quantile);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateSamples) throw;
    return KernelSpec::Gaussian(1.0, samples.dim());
  }
}

// Recorded epochs: multiples of the stride, plus the final epoch.
std::vector<int> RecordedEpochs(int epochs, int stride) {
  std::vector<int> out;
  for (int e = stride; e <= epochs; e += stride) out.push_back(e);
  if (epochs > 0 && (out.empty() || out.back() != epochs)) out.push_back(epochs);
  return out;
}

struct RunMiRecord {
  std::vector<double> w;
  std::vector<double> w_prev;
  std::vector<double> batch;
};

// Everything one run owns; the trainer references the datasets, so a run
// state never moves once built.
struct RunState {
  std::size_t id = 0;
  std::uint64_t seed = 0;
  Dataset train;
  Dataset test;
  std::optional<MlpModel> model;
  std::unique_ptr<Trainer> trainer;
  bool diverged = false;
  std::string divergence;
  std::vector<double> batch_losses;
  std::vector<double> prev_offset;  // Delta_{t-1} of the auxiliary process
  std::vector<RunMiRecord> mi;       // one per recorded epoch reached
  std::optional<Trajectory> trajectory;

  // Outputs of the current step.
  bool stepped = false;
  std::vector<SymMatrix> blocks;
  std::vector<double> mean_grad;
  double max_sq_norm = 0.0;
};

struct Setup {
  ExperimentConfig config;
  std::vector<std::size_t> sizes;
  std::size_t d = 0;
  std::optional<SyntheticTask> synthetic;
  std::optional<ClassificationTask> classification;
  std::optional<Dataset> mnist;
};

void BuildRunData(const Setup& setup, RunState& run) {
  const ExperimentConfig& c = setup.config;
  switch (c.task) {
    case TaskKind::kSynthetic: {
      auto split = gen_synthetic(*setup.synthetic, c.n, run.seed);
      run.train = std::move(split.train);
      run.test = std::move(split.test);
      break;
    }
    case TaskKind::kClassification: {
      auto split = gen_classification(*setup.classification, c.n, run.seed);
      run.train = std::move(split.train);
      run.test = std::move(split.test);
      break;
    }
    case TaskKind::kMnist: {
      // Disjoint train and held-out halves of one uniform subsample.
      Dataset both = Subsample(*setup.mnist, 2 * c.n, run.seed);
      std::vector<std::size_t> order(both.size());
      std::iota(order.begin(), order.end(), 0);
      Rng rng = MakeRng(run.seed, Stream::kSubsample, 1);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<std::size_t> a(order.begin(), order.begin() + c.n);
      std::vector<std::size_t> b(order.begin() + c.n, order.end());
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      run.train = both.Subset(a);
      run.test = both.Subset(b);
      break;
    }
  }
  // S is drawn from the corrupted distribution, so the held-out set that
  // stands in for it is corrupted the same way, from an independent stream.
  if (c.label_noise > 0.0) {
    run.train = corrupt_labels(run.train, c.label_noise, run.seed);
    run.test = corrupt_labels(run.test, c.label_noise,
                              DeriveSeed(run.seed, Stream::kLabels, 1));
  }
}

Setup MakeSetup(const ExperimentConfig& config) {
  Setup setup;
  setup.config = config;
  const ExperimentConfig& c = setup.config;
  const std::uint64_t master = c.train.seed;
  switch (c.task) {
    case TaskKind::kSynthetic:
      setup.synthetic = MakeSyntheticTask(master, c.input_dim, c.noise_var);
      break;
    case TaskKind::kClassification:
      setup.classification =
          MakeClassificationTask(master, c.input_dim, c.num_classes);
      break;
    case TaskKind::kMnist:
      setup.mnist = load_mnist_idx(c.mnist_images, c.mnist_labels, 0, master);
      setup.config.input_dim = setup.mnist->inputs.dim();
      break;
  }
  setup.sizes = setup.config.layer_sizes();
  return setup;
}

std::vector<double> Offsetted(std::span<const double> w,
                              std::span<const double> offset) {
  std::vector<double> out(w.begin(), w.end());
  for (std::size_t i = 0; i < offset.size(); ++i) out[i] += offset[i];
  return out;
}

std::vector<SymMatrix> ScaledSum(const std::vector<const std::vector<SymMatrix>*>& parts) {
  std::vector<SymMatrix> sum = *parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) {
    for (std::size_t b = 0; b < sum.size(); ++b) sum[b] += (*parts[k])[b];
  }
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (auto& m : sum) m *= inv;
  return sum;
}

// Cross-run average of per-run block covariances plus the covariance of the
// per-run batch means, turned into the per-step bound terms.
struct StepReducer {
  Partition storage;
  bool full_storage = true;
  Partition partition;
  double eta = 0.0;
  double sigma2 = 0.0;
  std::size_t d = 0;
  double running_L = 0.0;

  StepRow Reduce(std::size_t step, int epoch,
                 const std::vector<const std::vector<SymMatrix>*>& parts,
                 const SampleSet& means, double step_max_sq_norm) {
    running_L = std::max(running_L, step_max_sq_norm);
    StepRow row;
    row.step = static_cast<double>(step);
    row.epoch = epoch;
    row.max_sq_norm = running_L;
    if (parts.empty()) {
      row.scalar_var = row.theta_c = row.theta_c_partitioned = row.theta_v =
          row.lemma2 = row.lemma1 = kNaN;
    } else {
      const StepTerms terms = ComputeStepTerms(
          ScaledSum(parts), full_storage, partition, running_L, eta, sigma2, d);
      row.scalar_var = terms.scalar_var;
      row.theta_c = terms.theta_c;
      row.theta_c_partitioned = terms.theta_c_partitioned;
      row.theta_v = terms.theta_v;
      row.lemma2 = terms.lemma2;
      row.lemma1 = terms.lemma1;
    }
    if (means.size() >= 2) {
      const auto total = block_covariance(means, storage, /*scale_by_batch=*/false);
      const StepTerms terms = ComputeStepTerms(total, full_storage, partition,
                                               running_L, eta, sigma2, d);
      row.scalar_var_total = terms.scalar_var;
      row.theta_c_total = terms.theta_c;
      row.theta_c_partitioned_total = terms.theta_c_partitioned;
      row.theta_v_total = terms.theta_v;
    } else {
      row.scalar_var_total = row.theta_c_total = row.theta_c_partitioned_total =
          row.theta_v_total = kNaN;
    }
    return row;
  }
};

// Fills the cumulative gradient-bound columns of `row` from the step rows up
// to row.step. `cursor` and `sums` carry the running totals between calls.
void AccumulateThetaColumns(const std::vector<StepRow>& steps,
                            std::size_t& cursor, double (&sums)[8],
                            double hessian_term, double R, std::size_t n,
                            EpochRow& row) {
  const auto step = static_cast<std::size_t>(row.step);
  for (; cursor < step && cursor < steps.size(); ++cursor) {
    const StepRow& s = steps[cursor];
    const double terms[] = {s.theta_c, s.theta_c_partitioned, s.theta_v,
                            s.lemma2, s.lemma1, s.theta_c_total,
                            s.theta_c_partitioned_total, s.theta_v_total};
    for (int i = 0; i < 8; ++i) sums[i] += terms[i];
  }
  row.theta_c_sum = sums[0];
  row.theta_c_partitioned_sum = sums[1];
  row.theta_v_sum = sums[2];
  row.lemma2_sum = sums[3];
  row.lemma1_sum = sums[4];
  row.theta_c_total_sum = sums[5];
  row.theta_c_partitioned_total_sum = sums[6];
  row.theta_v_total_sum = sums[7];
  row.sgd_hessian_term = hessian_term;
  const double headline_c =
      std::isnan(row.theta_c_sum) ? row.theta_c_partitioned_sum : row.theta_c_sum;
  row.bound_theta_c = hessian_term + thm1_bounds(headline_c, R, n).mean_bound;
  row.bound_theta_v = hessian_term + thm1_bounds(row.theta_v_sum, R, n).mean_bound;
}

Partition MakePartition(PartitionMode mode, const MlpModel& shape) {
  const std::size_t d = shape.param_count();
  switch (mode) {
    case PartitionMode::kFull: return WholePartition(d);
    case PartitionMode::kPerLayer: return layer_groups(shape);
    case PartitionMode::kPerParam: return SingletonPartition(d);
  }
  return WholePartition(d);
}

}  // namespace

ExperimentConfig ExperimentConfig::SyntheticDefaults() {
  ExperimentConfig c;
  c.task = TaskKind::kSynthetic;
  c.train.algorithm = Algorithm::kSgld;
  c.train.eta = 0.001;
  c.train.sigma2 = 1e-3;
  c.train.epochs = 50;
  c.train.batch_size = 10;
  c.train.record_every = 0;
  c.train.loss.kind = LossKind::kMse;
  c.hidden = {10};
  c.n = 100;
  c.runs = 100;
  c.virtual_sigma2 = 1e-3;
  c.input_dim = 10;
  return c;
}

ExperimentConfig ExperimentConfig::MnistDefaults() {
  ExperimentConfig c;
  c.task = TaskKind::kMnist;
  c.train.algorithm = Algorithm::kSgld;
  c.train.eta = 0.01;
  c.train.sigma2 = 1e-5;
  c.train.epochs = 100;
  c.train.batch_size = 50;
  c.train.record_every = 0;
  c.train.loss.kind = LossKind::kSoftmaxCrossEntropy;
  c.hidden = {128};
  c.n = 5000;
  c.runs = 100;
  c.virtual_sigma2 = 1e-5;
  c.partition_mode = PartitionMode::kPerParam;
  c.input_dim = 784;
  c.num_classes = 10;
  return c;
}

ExperimentConfig ExperimentConfig::ClassificationDefaults() {
  ExperimentConfig c;
  c.task = TaskKind::kClassification;
  c.train.algorithm = Algorithm::kSgd;
  // Wide enough, and trained hard enough, to memorize corrupted labels.
  c.train.eta = 0.1;
  c.train.sigma2 = 0.0;
  c.train.epochs = 100;
  c.train.batch_size = 50;
  c.train.record_every = 0;
  c.train.loss.kind = LossKind::kSoftmaxCrossEntropy;
  c.hidden = {128};
  c.n = 1000;
  c.runs = 20;
  c.virtual_sigma2 = 1e-5;
  c.partition_mode = PartitionMode::kPerParam;
  c.input_dim = 30;
  c.num_classes = 4;
  return c;
}

std::vector<std::size_t> ExperimentConfig::layer_sizes() const {
  std::vector<std::size_t> sizes = {input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(task == TaskKind::kSynthetic
                      ? 1
                      : static_cast<std::size_t>(num_classes));
  return sizes;
}

void ExperimentConfig::Validate() const {
  train.Validate(n);
  auto fail = [](const std::string& m) {
    throw Error(ErrorCode::kInvalidInput, "experiment config: " + m);
  };
  if (runs < 2) fail("runs must be at least 2");
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) fail("label_noise outside [0, 1]");
  if (label_noise > 0.0 && task == TaskKind::kSynthetic) {
    fail("label_noise needs a classification task");
  }
  if (!(kernel_quantile > 0.0 && kernel_quantile <= 1.0)) {
    fail("kernel_quantile outside (0, 1]");
  }
  if (mi_epoch_stride < 1) fail("mi_epoch_stride must be positive");
  if (train.algorithm == Algorithm::kSgd && !(virtual_sigma2 > 0.0)) {
    fail("sgd needs virtual_sigma2 > 0");
  }
  if ((task == TaskKind::kSynthetic) != (train.loss.kind == LossKind::kMse)) {
    fail("synthetic uses mse, classification tasks use softmax_cross_entropy");
  }
  if (task != TaskKind::kSynthetic && num_classes < 2) fail("num_classes < 2");
  if (task == TaskKind::kMnist && (mnist_images.empty() || mnist_labels.empty())) {
    fail("mnist needs mnist_images and mnist_labels");
  }
  if (hessian_probes < 1) fail("hessian_probes must be positive");
}

nlohmann::json ExperimentConfigToJson(const ExperimentConfig& c) {
  return {{"task", TaskName(c.task)},
          {"train", TrainConfigToJson(c.train)},
          {"hidden", c.hidden},
          {"n", c.n},
          {"runs", c.runs},
          {"label_noise", c.label_noise},
          {"kernel_quantile", c.kernel_quantile},
          {"apply_normalizer", c.apply_normalizer},
          {"partition_mode", PartitionName(c.partition_mode)},
          {"mi_epoch_stride", c.mi_epoch_stride},
          {"output_dir", c.output_dir.string()},
          {"virtual_sigma2", c.virtual_sigma2},
          {"hessian_probes", c.hessian_probes},
          {"hessian_max_points", c.hessian_max_points},
          {"full_covariance_limit", c.full_covariance_limit},
          {"compute_gradient_bounds", c.compute_gradient_bounds},
          {"compute_cond_mi", c.compute_cond_mi},
          {"keep_trajectories", c.keep_trajectories},
          {"input_dim", c.input_dim},
          {"num_classes", c.num_classes},
          {"noise_var", c.noise_var},
          {"mnist_images", c.mnist_images.string()},
          {"mnist_labels", c.mnist_labels.string()}};
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j) {
  try {
    const TaskKind task = ParseTask(j.value("task", std::string("synthetic")));
    ExperimentConfig c = task == TaskKind::kSynthetic ? ExperimentConfig::SyntheticDefaults()
                         : task == TaskKind::kMnist   ? ExperimentConfig::MnistDefaults()
                                                      : ExperimentConfig::ClassificationDefaults();
    if (j.contains("train")) TrainConfigFromJson(j.at("train"), c.train);
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("hidden", c.hidden);
    get("n", c.n);
    get("runs", c.runs);
    get("label_noise", c.label_noise);
    get("kernel_quantile", c.kernel_quantile);
    get("apply_normalizer", c.apply_normalizer);
    if (j.contains("partition_mode")) {
      c.partition_mode = ParsePartition(j.at("partition_mode").get<std::string>());
    }
    get("mi_epoch_stride", c.mi_epoch_stride);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    get("virtual_sigma2", c.virtual_sigma2);
    get("hessian_probes", c.hessian_probes);
    get("hessian_max_points", c.hessian_max_points);
    get("full_covariance_limit", c.full_covariance_limit);
    get("compute_gradient_bounds", c.compute_gradient_bounds);
    get("compute_cond_mi", c.compute_cond_mi);
    get("keep_trajectories", c.keep_trajectories);
    get("workers", c.workers);
    get("input_dim", c.input_dim);
    get("num_classes", c.num_classes);
    get("noise_var", c.noise_var);
    if (j.contains("mnist_images")) c.mnist_images = j.at("mnist_images").get<std::string>();
    if (j.contains("mnist_labels")) c.mnist_labels = j.at("mnist_labels").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("config: ") + e.what());
  }
}

RunInputs PrepareRun(const ExperimentConfig& config, std::size_t run) {
  config.Validate();
  const Setup setup = MakeSetup(config);
  RunState state;
  state.id = run;
  state.seed = DeriveSeed(config.train.seed, Stream::kRun, run);
  BuildRunData(setup, state);
  return RunInputs{state.seed, std::move(state.train), std::move(state.test),
                   InitialModel(setup.sizes, state.seed)};
}

ExperimentResult orchestrate(const ExperimentConfig& config) {
  config.Validate();
  Setup setup = MakeSetup(config);
  const ExperimentConfig& c = setup.config;
  const std::uint64_t master = c.train.seed;
  const std::size_t workers = c.workers > 0 ? c.workers : WorkerCount();
  const bool sgd = c.train.algorithm == Algorithm::kSgd;
  const double bound_sigma2 = sgd ? c.virtual_sigma2 : c.train.sigma2;

  // Build every run.
  std::vector<std::unique_ptr<RunState>> runs(c.runs);
  for (std::size_t r = 0; r < c.runs; ++r) {
    runs[r] = std::make_unique<RunState>();
    runs[r]->id = r;
    runs[r]->seed = DeriveSeed(master, Stream::kRun, r);
  }
  ParallelFor(c.runs, workers, [&](std::size_t r) {
    RunState& run = *runs[r];
    BuildRunData(setup, run);
    run.model.emplace(InitialModel(setup.sizes, run.seed));
    TrainConfig tc = c.train;
    tc.seed = run.seed;
    std::optional<AuxiliarySpec> aux;
    if (sgd) aux = AuxiliarySpec{c.virtual_sigma2, run.seed};
    run.trainer = std::make_unique<Trainer>(*run.model, run.train, &run.test, tc, aux);
    run.prev_offset.assign(run.model->param_count(), 0.0);
  });

  const std::size_t d = runs.front()->model->param_count();
  setup.d = d;
  const MlpModel shape(setup.sizes);
  const Partition partition = MakePartition(c.partition_mode, shape);
  const bool full_storage = d <= c.full_covariance_limit;
  const Partition storage = full_storage ? WholePartition(d) : partition;

  const std::size_t steps_per_epoch = c.train.steps_per_epoch(c.n);
  const std::size_t total_steps = static_cast<std::size_t>(c.train.epochs) * steps_per_epoch;
  const std::vector<int> recorded = RecordedEpochs(c.train.epochs, c.mi_epoch_stride);

  BoundReport report;
  std::vector<StepRow>& step_rows = report.steps;
  StepReducer reducer{storage, full_storage, partition, c.train.eta,
                      bound_sigma2, d};

  for (std::size_t t = 1; t <= total_steps; ++t) {
    const int epoch = static_cast<int>((t - 1) / steps_per_epoch) + 1;
    const bool epoch_end = t % steps_per_epoch == 0;
    const bool record_mi =
        epoch_end && std::binary_search(recorded.begin(), recorded.end(), epoch);

    ParallelFor(c.runs, workers, [&](std::size_t r) {
      RunState& run = *runs[r];
      run.stepped = false;
      if (run.diverged) return;
      try {
        const StepView& v = run.trainer->Step();
        run.batch_losses.push_back(v.batch_loss);
        if (c.compute_gradient_bounds) {
          const SampleSet& g = *v.grads;
          run.blocks = block_covariance(g, storage, /*scale_by_batch=*/true);
          run.mean_grad.assign(d, 0.0);
          run.max_sq_norm = 0.0;
          for (std::size_t i = 0; i < g.size(); ++i) {
            const auto row = g[i];
            double sq = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
              run.mean_grad[k] += row[k];
              sq += row[k] * row[k];
            }
            run.max_sq_norm = std::max(run.max_sq_norm, sq);
          }
          for (double& m : run.mean_grad) m /= static_cast<double>(g.size());
        }
        if (record_mi) {
          RunMiRecord rec;
          if (sgd) {
            rec.w = Offsetted(v.params_after, v.aux_offset);
            rec.w_prev = Offsetted(v.params_before, run.prev_offset);
          } else {
            rec.w.assign(v.params_after.begin(), v.params_after.end());
            rec.w_prev.assign(v.params_before.begin(), v.params_before.end());
          }
          rec.batch = run.train.FlattenSubset(v.batch);
          run.mi.push_back(std::move(rec));
        }
        if (sgd) run.prev_offset.assign(v.aux_offset.begin(), v.aux_offset.end());
        run.stepped = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDivergedTraining) throw;
        run.diverged = true;
        run.divergence = e.what();
      }
    });

    if (!c.compute_gradient_bounds) continue;
    // Ordered reduction over the runs that completed this step.
    std::vector<const std::vector<SymMatrix>*> parts;
    SampleSet means(0, d);
    double step_L = 0.0;
    for (const auto& run : runs) {
      if (!run->stepped) continue;
      parts.push_back(&run->blocks);
      means.push_back(run->mean_grad);
      step_L = std::max(step_L, run->max_sq_norm);
    }
    StepRow row = reducer.Reduce(t, epoch, parts, means, step_L);
    step_rows.push_back(row);
    for (auto& run : runs) {
      run->blocks.clear();
      run->blocks.shrink_to_fit();
    }
  }

  // Gather.
  ExperimentResult result;
  std::vector<std::size_t> effective;
  for (auto& run : runs) {
    if (run->diverged) {
      report.meta.diverged_runs.push_back(run->id);
      continue;
    }
    effective.push_back(run->id);
    run->trajectory.emplace(std::move(*run->trainer).Finish());
    run->trainer.reset();
  }
  if (effective.size() < 2) {
    throw Error(ErrorCode::kDivergedTraining,
                "fewer than 2 runs finished; " +
                    std::to_string(report.meta.diverged_runs.size()) + " diverged");
  }
  const double n_eff = static_cast<double>(effective.size());

  ReportMeta& meta = report.meta;
  meta.task = TaskName(c.task);
  meta.algorithm = sgd ? "sgd" : "sgld";
  meta.partition_mode = PartitionName(c.partition_mode);
  meta.seed = master;
  meta.runs = c.runs;
  meta.effective_runs = effective.size();
  meta.n = c.n;
  meta.param_count = d;
  meta.steps = total_steps;
  meta.eta = c.train.eta;
  meta.sigma2 = c.train.sigma2;
  meta.virtual_sigma2 = sgd ? c.virtual_sigma2 : 0.0;
  meta.label_noise = c.label_noise;
  meta.kernel_quantile = c.kernel_quantile;
  meta.apply_normalizer = c.apply_normalizer;
  meta.full_covariance = full_storage && c.compute_gradient_bounds;

  double R = 0.0;
  for (std::size_t r : effective) R += subgaussian_R(runs[r]->batch_losses);
  R /= n_eff;
  meta.R = R;

  // Hessian trace at W_T on held-out data, sgd only.
  double hessian_trace = 0.0;
  if (sgd) {
    std::vector<double> traces(effective.size());
    ParallelFor(effective.size(), workers, [&](std::size_t k) {
      RunState& run = *runs[effective[k]];
      MlpModel model(setup.sizes);
      model.unflatten(run.trajectory->final_params);
      const Dataset* held_out = &run.test;
      Dataset trimmed;
      if (run.test.size() > c.hessian_max_points) {
        std::vector<std::size_t> idx(c.hessian_max_points);
        std::iota(idx.begin(), idx.end(), 0);
        trimmed = run.test.Subset(idx);
        held_out = &trimmed;
      }
      traces[k] = hessian_trace_hutchinson(model, *held_out, c.train.loss,
                                           c.hessian_probes,
                                           DeriveSeed(run.seed, Stream::kProbe));
    });
    for (double tr : traces) hessian_trace += tr;
    hessian_trace /= n_eff;
  }
  meta.hessian_trace = hessian_trace;

  // MI samples of the effective runs, aligned by run order.
  MiSamples& mi = result.mi;
  mi.run_ids = effective;
  mi.s = SampleSet(0, runs[effective.front()]->train.flat_sample_dim() * c.n);
  for (std::size_t r : effective) mi.s.push_back(runs[r]->train.Flatten());
  for (std::size_t k = 0; k < recorded.size(); ++k) {
    MiEpochSamples e;
    e.epoch = recorded[k];
    e.step = static_cast<std::size_t>(recorded[k]) * steps_per_epoch;
    const auto& first = runs[effective.front()]->mi[k];
    e.w = SampleSet(0, first.w.size());
    e.w_prev = SampleSet(0, first.w_prev.size());
    e.batch = SampleSet(0, first.batch.size());
    for (std::size_t r : effective) {
      const auto& rec = runs[r]->mi[k];
      e.w.push_back(rec.w);
      e.w_prev.push_back(rec.w_prev);
      e.batch.push_back(rec.batch);
    }
    mi.epochs.push_back(std::move(e));
  }

  std::vector<double> iws(recorded.size(), 0.0), cmi(recorded.size(), 0.0);
  const KernelSpec ks = KernelFor(mi.s, c.kernel_quantile);
  ParallelFor(recorded.size(), workers, [&](std::size_t k) {
    const MiEpochSamples& e = mi.epochs[k];
    const KernelSpec kw = KernelFor(e.w, c.kernel_quantile);
    iws[k] = mi_estimate(e.w, mi.s, kw, ks, c.apply_normalizer);
    if (c.compute_cond_mi) {
      const TripleKernels kernels{kw, KernelFor(e.batch, c.kernel_quantile),
                                  KernelFor(e.w_prev, c.kernel_quantile)};
      cmi[k] = cond_mi_estimate(e.w, e.batch, e.w_prev, kernels,
                                c.apply_normalizer);
    }
  });

  // Per-epoch rows.
  double iwbw = 0.0;
  int prev_epoch = 0;
  double sums[8] = {};
  std::size_t summed_steps = 0;
  for (std::size_t k = 0; k < recorded.size(); ++k) {
    const int e = recorded[k];
    const std::size_t step = static_cast<std::size_t>(e) * steps_per_epoch;
    EpochRow row;
    row.epoch = e;
    row.step = static_cast<double>(step);
    for (std::size_t r : effective) {
      const Trajectory& tr = *runs[r]->trajectory;
      row.train_loss += tr.train_loss[e];
      row.test_loss += tr.test_loss[e];
      row.true_gap += tr.test_loss[e] - tr.train_loss[e];
    }
    row.train_loss /= n_eff;
    row.test_loss /= n_eff;
    row.true_gap /= n_eff;
    row.R = R;
    row.iws = iws[k];
    // Rectangle rule: the sampled step stands for every step since the
    // previous recorded epoch.
    iwbw += cmi[k] * static_cast<double>((e - prev_epoch) * steps_per_epoch);
    prev_epoch = e;
    row.iwbw = c.compute_cond_mi ? iwbw : kNaN;
    const Thm1Bounds from_iws = thm1_bounds(row.iws, R, c.n);
    row.thm1_from_iws = from_iws.mean_bound;
    row.thm1_second_from_iws = from_iws.second_moment_bound;
    if (c.compute_cond_mi) {
      const Thm1Bounds from_iwbw = thm1_bounds(row.iwbw, R, c.n);
      row.thm1_from_iwbw = from_iwbw.mean_bound;
      row.thm1_second_from_iwbw = from_iwbw.second_moment_bound;
    } else {
      row.thm1_from_iwbw = row.thm1_second_from_iwbw = kNaN;
    }

    if (c.compute_gradient_bounds) {
      const double hessian_term =
          sgd ? 0.5 * static_cast<double>(step) * c.virtual_sigma2 * hessian_trace
              : 0.0;
      AccumulateThetaColumns(step_rows, summed_steps, sums, hessian_term, R, c.n,
                             row);
    } else {
      row.theta_c_sum = row.theta_c_partitioned_sum = row.theta_v_sum =
          row.lemma2_sum = row.lemma1_sum = row.theta_c_total_sum =
              row.theta_c_partitioned_total_sum = row.theta_v_total_sum =
                  row.sgd_hessian_term = row.bound_theta_c = row.bound_theta_v = kNaN;
    }
    report.epochs.push_back(row);
  }

  if (c.keep_trajectories) {
    for (std::size_t r : effective) result.trajectories.push_back(*runs[r]->trajectory);
  }
  result.report = std::move(report);
  return result;
}

BoundReport ReportFromTrajectories(std::span<const Trajectory> runs,
                                   const TrajectoryReportOptions& options) {
  if (runs.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "need at least 2 trajectories");
  }
  const Trajectory& first = runs.front();
  const TrainConfig& tc = first.config;
  for (const Trajectory& t : runs) {
    if (t.layer_sizes != first.layer_sizes || t.bias != first.bias ||
        t.steps.size() != first.steps.size() ||
        t.config.algorithm != tc.algorithm || t.config.eta != tc.eta ||
        t.config.sigma2 != tc.sigma2 || t.config.epochs != tc.epochs ||
        t.config.batch_size != tc.batch_size) {
      throw Error(ErrorCode::kInvalidInput, "trajectories disagree on settings");
    }
    for (const StepRecord& s : t.steps) {
      if (!s.heavy() || s.grads.size() < 2) {
        throw Error(ErrorCode::kInvalidInput,
                    "every step needs recorded gradients (record_every = 1)");
      }
    }
  }
  const bool sgd = tc.algorithm == Algorithm::kSgd;
  if (sgd && !first.has_auxiliary) {
    throw Error(ErrorCode::kInvalidInput, "sgd trajectories need the auxiliary process");
  }
  const double bound_sigma2 = sgd ? first.virtual_sigma2 : tc.sigma2;
  const MlpModel shape(first.layer_sizes, first.bias);
  const std::size_t d = shape.param_count();
  const Partition partition = MakePartition(options.partition_mode, shape);
  const bool full_storage = d <= options.full_covariance_limit;
  const Partition storage = full_storage ? WholePartition(d) : partition;
  const std::size_t total_steps = first.steps.size();
  const std::size_t steps_per_epoch =
      tc.epochs > 0 ? total_steps / static_cast<std::size_t>(tc.epochs) : 0;
  const std::size_t n = steps_per_epoch * tc.batch_size;

  BoundReport report;
  StepReducer reducer{storage, full_storage, partition, tc.eta, bound_sigma2, d};
  std::vector<std::vector<SymMatrix>> blocks(runs.size());
  for (std::size_t t = 0; t < total_steps; ++t) {
    std::vector<const std::vector<SymMatrix>*> parts;
    SampleSet means(0, d);
    double step_L = 0.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const SampleSet& g = runs[r].steps[t].grads;
      blocks[r] = block_covariance(g, storage, /*scale_by_batch=*/true);
      parts.push_back(&blocks[r]);
      std::vector<double> mean(d, 0.0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        double sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          mean[k] += g[i][k];
          sq += g[i][k] * g[i][k];
        }
        step_L = std::max(step_L, sq);
      }
      for (double& m : mean) m /= static_cast<double>(g.size());
      means.push_back(mean);
    }
    report.steps.push_back(
        reducer.Reduce(t + 1, first.steps[t].epoch, parts, means, step_L));
  }

  const double n_runs = static_cast<double>(runs.size());
  double R = 0.0;
  for (const Trajectory& t : runs) {
    std::vector<double> losses;
    for (const StepRecord& s : t.steps) losses.push_back(s.batch_loss);
    R += losses.empty() ? 0.0 : subgaussian_R(losses);
  }
  R /= n_runs;

  ReportMeta& meta = report.meta;
  meta.task = "trajectories";
  meta.algorithm = sgd ? "sgd" : "sgld";
  meta.partition_mode = PartitionName(options.partition_mode);
  meta.runs = meta.effective_runs = runs.size();
  meta.n = n;
  meta.param_count = d;
  meta.steps = total_steps;
  meta.eta = tc.eta;
  meta.sigma2 = tc.sigma2;
  meta.virtual_sigma2 = sgd ? first.virtual_sigma2 : 0.0;
  meta.kernel_quantile = kNaN;
  meta.full_covariance = full_storage;
  meta.hessian_trace = sgd ? options.hessian_trace : 0.0;
  meta.R = R;

  std::size_t cursor = 0;
  double sums[8] = {};
  for (int e : RecordedEpochs(tc.epochs, std::max(1, options.epoch_stride))) {
    EpochRow row;
    row.epoch = e;
    const std::size_t step = static_cast<std::size_t>(e) * steps_per_epoch;
    row.step = static_cast<double>(step);
    for (const Trajectory& t : runs) {
      row.train_loss += t.train_loss[e];
      row.test_loss += t.test_loss[e];
      row.true_gap += t.test_loss[e] - t.train_loss[e];
    }
    row.train_loss /= n_runs;
    row.test_loss /= n_runs;
    row.true_gap /= n_runs;
    row.R = R;
    row.iws = row.iwbw = row.thm1_from_iws = row.thm1_from_iwbw =
        row.thm1_second_from_iws = row.thm1_second_from_iwbw = kNaN;
    const double hessian_term =
        sgd ? 0.5 * static_cast<double>(step) * first.virtual_sigma2 *
                  options.hessian_trace
            : 0.0;
    AccumulateThetaColumns(report.steps, cursor, sums, hessian_term, R, n, row);
    report.epochs.push_back(row);
  }
  return report;
}

void emit_report(const BoundReport& report, const MiSamples& mi,
                 const std::filesystem::path& output_dir) {
  WriteReportFiles(report, output_dir);
  nlohmann::json j;
  j["run_ids"] = mi.run_ids;
  j["s_dim"] = mi.s.dim();
  j["samples"] = mi.s.size();
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : mi.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"step", e.step},
                      {"w_dim", e.w.dim()},
                      {"w_prev_dim", e.w_prev.dim()},
                      {"batch_dim", e.batch.dim()},
                      {"samples", e.w.size()}});
  }
  j["epochs"] = std::move(epochs);
  WriteTextFile(output_dir / "mi_samples.json", j.dump(2) + "\n");
}

}  // namespace renyigen
