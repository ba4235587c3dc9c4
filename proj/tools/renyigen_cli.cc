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

// Command-line front end: train, experiment, estimate, selftest, report.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "renyigen/entropy.h"
#include "renyigen/error.h"
#include "renyigen/experiment.h"
#include "renyigen/kernel.h"
#include "renyigen/report.h"
#include "renyigen/selftest.h"
#include "renyigen/trainer.h"
#include "renyigen/trajectory_io.h"

namespace fs = std::filesystem;
using namespace renyigen;

namespace {

// Flags shared by train and experiment; unset flags keep config values.
struct Overrides {
  std::string config_path;
  std::string task;
  std::optional<std::uint64_t> seed;
  std::string algorithm;
  std::optional<double> eta, sigma2, virtual_sigma2, rho, quantile;
  std::optional<int> epochs, stride;
  std::optional<std::size_t> batch_size, n, runs, workers;
  std::string partition;
  bool normalize = false;
  std::string mnist_images, mnist_labels;

  void Register(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file");
    app->add_option("--task", task, "synthetic | classification | mnist");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--algorithm", algorithm, "sgd | sgld");
    app->add_option("--eta", eta, "learning rate");
    app->add_option("--sigma2", sigma2, "SGLD noise variance");
    app->add_option("--virtual-sigma2", virtual_sigma2,
                    "virtual noise of the sgd auxiliary process");
    app->add_option("--epochs", epochs);
    app->add_option("--batch-size", batch_size);
    app->add_option("--n", n, "training set size");
    app->add_option("--runs", runs, "independent runs");
    app->add_option("--rho", rho, "label noise probability");
    app->add_option("--quantile", quantile, "kernel width quantile");
    app->add_option("--stride", stride, "MI recording stride in epochs");
    app->add_option("--partition", partition, "full | per_layer | per_param");
    app->add_option("--workers", workers, "worker threads (default: env or all)");
    app->add_flag("--normalize", normalize, "apply the kernel normalizer to MI");
    app->add_option("--mnist-images", mnist_images);
    app->add_option("--mnist-labels", mnist_labels);
  }

  ExperimentConfig Build() const {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      try {
        j = nlohmann::json::parse(ReadTextFile(config_path));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kInvalidInput,
                    config_path + ": " + std::string(e.what()));
      }
    }
    if (!task.empty()) j["task"] = task;
    ExperimentConfig c = ExperimentConfigFromJson(j);
    nlohmann::json train = nlohmann::json::object();
    if (!algorithm.empty()) {
      train["algorithm"] = algorithm;
      if (algorithm == "sgd" && !sigma2) c.train.sigma2 = 0.0;
    }
    if (eta) train["eta"] = *eta;
    if (sigma2) train["sigma2"] = *sigma2;
    if (epochs) train["epochs"] = *epochs;
    if (batch_size) train["batch_size"] = *batch_size;
    if (seed) train["seed"] = *seed;
    TrainConfigFromJson(train, c.train);
    if (virtual_sigma2) c.virtual_sigma2 = *virtual_sigma2;
    if (n) c.n = *n;
    if (runs) c.runs = *runs;
    if (rho) c.label_noise = *rho;
    if (quantile) c.kernel_quantile = *quantile;
    if (stride) c.mi_epoch_stride = *stride;
    if (workers) c.workers = *workers;
    if (normalize) c.apply_normalizer = true;
    if (!partition.empty()) {
      nlohmann::json p = ExperimentConfigToJson(c);
      p["partition_mode"] = partition;
      p["workers"] = c.workers;
      c = ExperimentConfigFromJson(p);
    }
    if (!mnist_images.empty()) c.mnist_images = mnist_images;
    if (!mnist_labels.empty()) c.mnist_labels = mnist_labels;
    return c;
  }
};

void PrintRow(const EpochRow& r) {
  std::printf("epoch %g  true_gap %.6g  iws %.6g  iwbw %.6g  bound_theta_c %.6g  "
              "bound_theta_v %.6g\n",
              r.epoch, r.true_gap, r.iws, r.iwbw, r.bound_theta_c, r.bound_theta_v);
}

int RunTrain(const Overrides& o, std::size_t run, int record_every,
             const std::string& out) {
  ExperimentConfig c = o.Build();
  c.train.record_every = record_every;
  const RunInputs inputs = PrepareRun(c, run);
  TrainConfig tc = c.train;
  tc.seed = inputs.seed;
  std::optional<AuxiliarySpec> aux;
  if (tc.algorithm == Algorithm::kSgd) aux = AuxiliarySpec{c.virtual_sigma2, inputs.seed};
  Trainer trainer(inputs.model, inputs.train, &inputs.test, tc, aux);
  while (!trainer.finished()) trainer.Step();
  const Trajectory t = std::move(trainer).Finish();
  WriteTrajectory(t, out);
  std::printf("steps %zu  params %zu  train_loss %.6g -> %.6g  test_loss %.6g -> %.6g\n",
              t.steps.size(), t.initial_params.size(), t.train_loss.front(),
              t.train_loss.back(), t.test_loss.front(), t.test_loss.back());
  std::printf("wrote %s and %s.json\n", out.c_str(), out.c_str());
  return 0;
}

int RunExperiment(const Overrides& o, const std::string& out, bool no_cond_mi,
                  bool no_gradient_bounds, bool save_trajectories) {
  ExperimentConfig c = o.Build();
  if (!out.empty()) c.output_dir = out;
  if (no_cond_mi) c.compute_cond_mi = false;
  if (no_gradient_bounds) c.compute_gradient_bounds = false;
  if (save_trajectories) {
    c.keep_trajectories = true;
    c.train.record_every = 1;
  }
  const ExperimentResult result = orchestrate(c);
  emit_report(result.report, result.mi, c.output_dir);
  WriteTextFile(c.output_dir / "config.json", ExperimentConfigToJson(c).dump(2) + "\n");
  if (save_trajectories) {
    const fs::path dir = c.output_dir / "trajectories";
    fs::create_directories(dir);
    for (std::size_t k = 0; k < result.trajectories.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "run_%04zu.bin", result.mi.run_ids[k]);
      WriteTrajectory(result.trajectories[k], dir / name);
    }
  }
  const ReportMeta& m = result.report.meta;
  std::printf("task %s  algorithm %s  runs %zu (effective %zu)  params %zu  R %.6g\n",
              m.task.c_str(), m.algorithm.c_str(), m.runs, m.effective_runs,
              m.param_count, m.R);
  if (!result.report.epochs.empty()) PrintRow(result.report.epochs.back());
  std::printf("wrote %s\n", c.output_dir.string().c_str());
  return 0;
}

KernelSpec KernelOf(const SampleSet& s, std::optional<double> width, double quantile) {
  return width ? KernelSpec::Gaussian(*width, s.dim()) : AutoGaussianKernel(s, quantile);
}

int RunEstimate(const std::string& xf, const std::string& yf, const std::string& zf,
                std::optional<double> width, double quantile, bool normalize) {
  const SampleSet x = ParseSamplesCsv(ReadTextFile(xf));
  const KernelSpec kx = KernelOf(x, width, quantile);
  const EntropyEstimate hx = entropy_estimate(x, kx, normalize);
  nlohmann::json j = {{"m", hx.m},
                      {"width_x", kx.width},
                      {"entropy_x", hx.value},
                      {"normalizer_applied", hx.log_normalizer_applied},
                      {"concentration_radius_95", hx.concentration_radius_at_95}};
  if (!yf.empty()) {
    const SampleSet y = ParseSamplesCsv(ReadTextFile(yf));
    const KernelSpec ky = KernelOf(y, width, quantile);
    j["width_y"] = ky.width;
    j["mi_xy"] = mi_estimate(x, y, kx, ky, normalize);
    if (!zf.empty()) {
      const SampleSet z = ParseSamplesCsv(ReadTextFile(zf));
      const KernelSpec kz = KernelOf(z, width, quantile);
      j["width_z"] = kz.width;
      j["cond_mi_xy_given_z"] = cond_mi_estimate(x, y, z, {kx, ky, kz}, normalize);
    }
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int RunSelftest(std::uint64_t seed) {
  int failed = 0;
  for (const auto& r : RunSelfTests(seed)) {
    std::printf("%s %s%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.empty() ? "" : ": ", r.detail.c_str());
    if (!r.passed) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

int RunReport(const std::string& input, const std::string& trajectories,
              const std::string& out, const std::string& partition, int stride,
              std::optional<double> hessian_trace) {
  BoundReport report;
  if (!trajectories.empty()) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(trajectories)) {
      if (entry.path().extension() == ".bin") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Trajectory> runs;
    for (const auto& f : files) runs.push_back(ReadTrajectory(f));
    TrajectoryReportOptions options;
    if (!partition.empty()) {
      nlohmann::json p = {{"partition_mode", partition}};
      options.partition_mode = ExperimentConfigFromJson(p).partition_mode;
    }
    options.epoch_stride = stride;
    if (hessian_trace) options.hessian_trace = *hessian_trace;
    report = ReportFromTrajectories(runs, options);
  } else {
    if (input.empty()) throw Error(ErrorCode::kInvalidInput, "report needs --input or --trajectories");
    try {
      report = ReportFromJson(nlohmann::json::parse(ReadTextFile(fs::path(input) / "bounds.json")));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormatError, std::string("bounds.json: ") + e.what());
    }
  }
  const fs::path dir = out.empty() ? fs::path(input.empty() ? "report" : input) : fs::path(out);
  WriteReportFiles(report, dir);
  std::printf("rows %zu  steps %zu\n", report.epochs.size(), report.steps.size());
  if (!report.epochs.empty()) PrintRow(report.epochs.back());
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernelized Renyi entropy estimators and generalization bounds"};
  app.require_subcommand(1);

  Overrides train_o;
  std::size_t run_index = 0;
  int record_every = 1;
  std::string traj_out = "trajectory.bin";
  auto* train = app.add_subcommand("train", "single training run, saved as a trajectory");
  train_o.Register(train);
  train->add_option("--run", run_index, "run index whose data and seed to use");
  train->add_option("--record-every", record_every, "heavy record stride (0: none)");
  train->add_option("--out", traj_out, "trajectory path");

  Overrides exp_o;
  std::string exp_out;
  bool no_cond_mi = false, no_gradient_bounds = false, save_trajectories = false;
  auto* experiment = app.add_subcommand("experiment", "multi-run bounds experiment");
  exp_o.Register(experiment);
  experiment->add_option("--out", exp_out, "output directory");
  experiment->add_flag("--no-cond-mi", no_cond_mi, "skip the IWB|W estimates");
  experiment->add_flag("--no-gradient-bounds", no_gradient_bounds,
                       "skip covariance-based bounds");
  experiment->add_flag("--save-trajectories", save_trajectories,
                       "write every run's full trajectory");

  std::string xf, yf, zf;
  std::optional<double> width;
  double quantile = 0.15;
  bool normalize = false;
  auto* estimate = app.add_subcommand("estimate", "entropy / MI of sample files");
  estimate->add_option("--x", xf, "samples CSV")->required();
  estimate->add_option("--y", yf, "paired samples CSV for MI");
  estimate->add_option("--z", zf, "conditioning samples CSV");
  estimate->add_option("--width", width, "fixed Gaussian width");
  estimate->add_option("--quantile", quantile, "width heuristic quantile");
  estimate->add_flag("--normalize", normalize, "multiply by the kernel normalizer");

  std::uint64_t self_seed = 1;
  auto* selftest = app.add_subcommand("selftest", "oracle and property checks");
  selftest->add_option("--seed", self_seed);

  std::string rep_in, rep_traj, rep_out, rep_partition;
  int rep_stride = 1;
  std::optional<double> rep_hessian;
  auto* report = app.add_subcommand("report", "re-render a report");
  report->add_option("--input", rep_in, "directory holding bounds.json");
  report->add_option("--trajectories", rep_traj, "directory of trajectory .bin files");
  report->add_option("--out", rep_out, "output directory");
  report->add_option("--partition", rep_partition, "full | per_layer | per_param");
  report->add_option("--stride", rep_stride, "epoch stride of report rows");
  report->add_option("--hessian-trace", rep_hessian, "mean trace for the sgd term");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return RunTrain(train_o, run_index, record_every, traj_out);
    if (*experiment) {
      return RunExperiment(exp_o, exp_out, no_cond_mi, no_gradient_bounds,
                           save_trajectories);
    }
    if (*estimate) return RunEstimate(xf, yf, zf, width, quantile, normalize);
    if (*selftest) return RunSelftest(self_seed);
    if (*report) {
      return RunReport(rep_in, rep_traj, rep_out, rep_partition, rep_stride,
                       rep_hessian);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
