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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Pass criterion numbers as arguments to
// run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "renyigen/bounds.h"
#include "renyigen/data_sources.h"
#include "renyigen/entropy.h"
#include "renyigen/error.h"
#include "renyigen/experiment.h"
#include "renyigen/hessian.h"
#include "renyigen/kernel.h"
#include "renyigen/mlp.h"
#include "renyigen/partition.h"
#include "renyigen/report.h"
#include "renyigen/rng.h"
#include "renyigen/sym_matrix.h"
#include "renyigen/trainer.h"
#include "renyigen/trajectory_io.h"

namespace renyigen {
namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

SampleSet NormalSamples(std::size_t m, std::size_t d, double sd, Rng& rng) {
  std::normal_distribution<double> normal(0.0, sd);
  SampleSet s(m, d);
  for (std::size_t i = 0; i < m; ++i) {
    for (double& v : s.row(i)) v = normal(rng);
  }
  return s;
}

// Covariance of the batch mean and max squared norm of b random vectors.
struct RandomStep {
  SymMatrix cov;
  double max_sq_norm = 0.0;
};

RandomStep MakeRandomStep(std::size_t d, Rng& rng) {
  std::uniform_int_distribution<std::size_t> batch(2, 12);
  std::uniform_real_distribution<double> scale(0.1, 3.0);
  const SampleSet g = NormalSamples(batch(rng), d, scale(rng), rng);
  const GradientStats stats = grad_stats(g, 0.0);
  return {stats.cov, stats.max_sq_norm};
}

Partition RandomPartition(std::size_t d, Rng& rng) {
  std::uniform_int_distribution<std::size_t> count(1, d);
  const std::size_t k = count(rng);
  std::vector<std::size_t> order(d);
  for (std::size_t i = 0; i < d; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  Partition p(k);
  for (std::size_t i = 0; i < d; ++i) p[i < k ? i : rng() % k].push_back(order[i]);
  for (auto& block : p) std::sort(block.begin(), block.end());
  return p;
}

// 1. Entropy of N(0, 1) under a width-0.5 Gaussian kernel.
Outcome GaussianEntropyOracle() {
  const auto start = Clock::now();
  const double truth = gaussian_closed_form(SymMatrix::Identity(1), 0.5);
  const KernelSpec kernel = KernelSpec::Gaussian(0.5, 1);
  const double radius = concentration_radius(2000, 0.05, std::exp(kernel.log_normalizer));
  int within = 0;
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = MakeRng(seed, Stream::kData);
    const double v = entropy_estimate(NormalSamples(2000, 1, 1.0, rng), kernel, true).value;
    mean += v / 100.0;
    if (std::abs(v - truth) <= radius) ++within;
  }
  const double t = Seconds(start);
  return {within >= 95 && t <= 120.0,
          Fmt("%d/100 seeds within radius %.4f of %.6f (mean estimate %.4f), %.1fs",
              within, radius, truth, mean, t)};
}

// 2. Simpson quadrature of the defining integral against the closed form.
Outcome QuadratureConsistency() {
  const auto start = Clock::now();
  const double pairs[3][2] = {{1.0, 0.5}, {4.0, 1.0}, {0.25, 0.2}};
  double worst = 0.0;
  for (const auto& p : pairs) {
    const double var = p[0], width = p[1], sd = std::sqrt(var);
    const auto pdf = [sd](double x) {
      return std::exp(-0.5 * x * x / (sd * sd)) / (sd * std::sqrt(2.0 * std::numbers::pi));
    };
    const double q = quadrature_entropy_1d(pdf, KernelSpec::Gaussian(width, 1),
                                           {-12.0 * sd, 12.0 * sd});
    const std::vector<double> v = {var};
    worst = std::max(worst, std::abs(q - gaussian_closed_form(SymMatrix::Diagonal(v), width)));
  }
  const double t = Seconds(start);
  return {worst <= 1e-3 && t <= 60.0, Fmt("max |quadrature - closed form| = %.2e, %.1fs", worst, t)};
}

// 3. theta_c <= partitioned theta_c <= theta_v(tr V) <= theta_v(L).
Outcome PartitionChain() {
  const auto start = Clock::now();
  Rng rng = MakeRng(3, Stream::kData);
  std::uniform_int_distribution<std::size_t> dim(1, 16);
  std::uniform_real_distribution<double> log_ratio(-3.0, 3.0);
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = dim(rng);
    const RandomStep step = MakeRandomStep(d, rng);
    const Partition p = RandomPartition(d, rng);
    const double eta = 1.0, sigma2 = std::pow(10.0, -log_ratio(rng));
    const double c = theta_c(step.cov, eta, sigma2);
    const double cp = theta_c_partitioned(step.cov, p, eta, sigma2);
    const double v = theta_v(step.cov.trace(), eta, sigma2, d);
    const double l = theta_v(step.max_sq_norm, eta, sigma2, d);
    if (!(c <= cp + 1e-9 && cp <= v + 1e-9 && v <= l + 1e-9)) ++violations;
  }
  const double t = Seconds(start);
  return {violations == 0 && t <= 60.0, Fmt("%d violations in 500 trials, %.1fs", violations, t)};
}

// 4. det(V) <= det(A) det(B) for the diagonal blocks A, B of PSD V.
Outcome BlockDeterminant() {
  Rng rng = MakeRng(4, Stream::kData);
  std::uniform_int_distribution<std::size_t> dim(2, 12);
  int violations = 0;
  double worst_oracle_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = dim(rng);
    const SymMatrix v = MakeRandomStep(d, rng).cov;
    const std::size_t k = 1 + rng() % (d - 1);
    std::vector<std::size_t> first(k), second(d - k);
    for (std::size_t i = 0; i < d; ++i) (i < k ? first[i] : second[i - k]) = i;
    const auto det = [](const SymMatrix& m) {
      double prod = 1.0;
      for (double l : sym_eigenvalues(m)) prod *= l;
      return prod;
    };
    const double dv = det(v);
    const double da = det(principal_submatrix(v, first));
    const double db = det(principal_submatrix(v, second));
    if (!(dv <= da * db + 1e-9)) ++violations;
    Eigen::MatrixXd e(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) e(i, j) = v(i, j);
    }
    const double scale = std::max(1.0, std::abs(dv));
    worst_oracle_gap = std::max(worst_oracle_gap, std::abs(e.determinant() - dv) / scale);
  }
  return {violations == 0 && worst_oracle_gap < 1e-8,
          Fmt("%d violations in 200 splits; determinants agree with LU to %.1e",
              violations, worst_oracle_gap)};
}

// 5. Raw MI is nonnegative, equals its entropy decomposition, and vanishes
// for a constant Y.
Outcome MiIdentities() {
  Rng rng = MakeRng(5, Stream::kData);
  std::uniform_int_distribution<std::size_t> count(10, 80), dim(1, 5);
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  int negative = 0, inexact = 0, nonzero = 0;
  double lowest = 1e300;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = count(rng), dx = dim(rng), dy = dim(rng);
    const SampleSet x = NormalSamples(m, dx, 1.0, rng);
    SampleSet y = NormalSamples(m, dy, 1.0, rng);
    const double a = mix(rng);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < dy; ++j) y.row(i)[j] += a * x[i][j % dx];
    }
    const KernelSpec kx = AutoGaussianKernel(x), ky = AutoGaussianKernel(y);
    const double mi = mi_estimate(x, y, kx, ky, false);
    lowest = std::min(lowest, mi);
    if (mi < -1e-9) ++negative;
    const GramMatrix gx = gram(x, kx), gy = gram(y, ky);
    const double parts = gram_entropy(gx, false) + gram_entropy(gy, false) -
                         gram_entropy(hadamard_joint(gx, gy), false);
    if (parts != mi) ++inexact;
    const SampleSet constant(m, dy);
    if (mi_estimate(x, constant, kx, KernelSpec::Gaussian(1.0, dy), false) != 0.0) ++nonzero;
  }
  return {negative == 0 && inexact == 0 && nonzero == 0,
          Fmt("min raw MI %.3e, %d negative, %d inexact decompositions, %d nonzero constant-Y",
              lowest, negative, inexact, nonzero)};
}

// 6. Analytic gradients and the Hutchinson trace.
Outcome GradientCorrectness() {
  Rng rng = MakeRng(6, Stream::kData);
  std::uniform_int_distribution<std::size_t> width(1, 8);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t in = width(rng), hidden = width(rng), out = width(rng);
    const MlpModel model = MlpModel::Initialized({in, hidden, out}, 60 + trial);
    const bool classify = trial % 2 == 1 && out > 1;
    Dataset data{NormalSamples(8, in, 1.0, rng), NormalSamples(8, out, 1.0, rng), {}, 0};
    if (classify) {
      data.targets = SampleSet();
      data.num_classes = static_cast<int>(out);
      for (std::size_t i = 0; i < 8; ++i) data.labels.push_back(static_cast<int>(rng() % out));
    }
    const LossSpec loss{classify ? LossKind::kSoftmaxCrossEntropy : LossKind::kMse};
    const std::vector<double> g = mean_gradient_at(model, model.params(), data, loss);
    std::vector<double> w = model.flatten();
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double h = 1e-6 * (1.0 + std::abs(w[i])), saved = w[i];
      w[i] = saved + h;
      const double up = mean_loss_at(model, w, data, loss);
      w[i] = saved - h;
      const double down = mean_loss_at(model, w, data, loss);
      w[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      diff += (fd - g[i]) * (fd - g[i]);
      norm += fd * fd;
    }
    worst = std::max(worst, std::sqrt(diff / std::max(norm, 1e-300)));
  }
  const MlpModel small = MlpModel::Initialized({8, 12, 1}, 7);
  const Dataset data{NormalSamples(64, 8, 1.0, rng), NormalSamples(64, 1, 1.0, rng), {}, 0};
  const double exact = hessian_trace_exact_fd(small, data, {LossKind::kMse});
  const double hutch = hessian_trace_hutchinson(small, data, {LossKind::kMse}, 512, 11);
  const double rel = std::abs(hutch - exact) / std::abs(exact);
  return {worst <= 1e-5 && rel <= 0.05 && small.param_count() <= 200,
          Fmt("max gradient relative error %.2e; Hutchinson %.4f vs exact %.4f (%.2f%%, d=%zu)",
              worst, hutch, exact, 100.0 * rel, small.param_count())};
}

// 7. Trainer identities.
Outcome TrainerIdentities() {
  const TrainTestSplit data = gen_synthetic(MakeSyntheticTask(0), 100, 1);
  const TrainConfig sgld;  // Table 1 synthetic row.
  const Trajectory t = run_training(InitialModel({10, 10, 1}, 1), data.train, nullptr, sgld);
  std::size_t bad_steps = 0;
  std::vector<double> w = t.initial_params;
  for (const StepRecord& r : t.steps) {
    std::vector<double> next(w.size());
    const double b = static_cast<double>(r.grads.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k < r.grads.size(); ++k) sum += r.grads[k][i];
      next[i] = w[i] - sgld.eta * (sum / b) + r.noise[i];
    }
    if (r.params_before != w || r.params_after != next) ++bad_steps;
    w = r.params_after;
  }

  TrainConfig sgd = sgld;
  sgd.algorithm = Algorithm::kSgd;
  sgd.sigma2 = 0.0;
  const Trajectory aux = attach_auxiliary(
      run_training(InitialModel({10, 10, 1}, 1), data.train, nullptr, sgd), 1e-3, 2);
  std::size_t bad_aux = 0;
  std::vector<double> sum(aux.initial_params.size(), 0.0);
  for (const StepRecord& r : aux.steps) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += r.aux_noise[i];
    if (r.aux_offset != sum) ++bad_aux;
  }

  ExperimentConfig c = ExperimentConfig::SyntheticDefaults();
  c.runs = 8;
  c.train.epochs = 5;
  c.keep_trajectories = true;
  c.compute_cond_mi = false;
  c.hessian_probes = 4;
  std::size_t mismatched = 0;
  std::vector<std::vector<std::uint8_t>> reference;
  for (std::size_t workers : {1u, 2u, 5u}) {
    c.workers = workers;
    const ExperimentResult r = orchestrate(c);
    for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
      const auto bytes = EncodeTrajectory(r.trajectories[i]);
      if (reference.size() <= i) {
        reference.push_back(bytes);
      } else if (bytes != reference[i]) {
        ++mismatched;
      }
    }
  }
  return {bad_steps == 0 && bad_aux == 0 && mismatched == 0 && reference.size() == 8,
          Fmt("%zu/%zu sgld steps off, %zu/%zu auxiliary offsets off, %zu trajectories "
              "differ across 1/2/5 workers",
              bad_steps, t.steps.size(), bad_aux, aux.steps.size(), mismatched)};
}

// 8. Full synthetic experiment.
Outcome SyntheticExperiment() {
  const auto start = Clock::now();
  const ExperimentConfig c = ExperimentConfig::SyntheticDefaults();
  const ExperimentResult r = orchestrate(c);
  const auto& rows = r.report.epochs;
  int mi_order = 0, ladder = 0;
  int rung[4] = {0, 0, 0, 0};
  for (const EpochRow& e : rows) {
    if (e.iws <= e.iwbw) ++mi_order;
    const bool r0 = e.true_gap <= e.thm1_from_iws;
    const bool r1 = e.thm1_from_iws <= e.thm1_from_iwbw;
    const bool r2 = e.thm1_from_iwbw <= e.bound_theta_c;
    const bool r3 = e.bound_theta_c <= e.bound_theta_v;
    rung[0] += r0;
    rung[1] += r1;
    rung[2] += r2;
    rung[3] += r3;
    if (r0 && r1 && r2 && r3) ++ladder;
  }
  std::size_t step_violations = 0;
  for (const StepRow& s : r.report.steps) {
    if (!(s.theta_c <= s.theta_v)) ++step_violations;
  }
  const double full_time = Seconds(start);

  // Peak position of the iws curve over independent experiments.
  ExperimentConfig light = c;
  light.compute_cond_mi = false;
  light.compute_gradient_bounds = false;
  int early_peak = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    light.train.seed = seed;
    const ExperimentResult lr = orchestrate(light);
    const auto& e = lr.report.epochs;
    const auto peak = std::max_element(e.begin(), e.end(), [](const EpochRow& a,
                                                              const EpochRow& b) {
      return a.iws < b.iws;
    });
    if (peak != e.end() - 1) ++early_peak;
  }
  const double t = Seconds(start);
  const double n = static_cast<double>(rows.size());
  const bool a = mi_order >= 0.9 * n;
  const bool b = ladder >= 0.9 * n;
  const bool cc = step_violations == 0 && !r.report.steps.empty();
  const bool d = early_peak >= 70;
  const EpochRow& last = rows.back();
  return {a && b && cc && d && t <= 1800.0,
          Fmt("(a) iws<=iwbw %d/%zu %s; (b) ladder %d/%zu %s [gap<=thm1(iws) %d, "
              "thm1(iws)<=thm1(iwbw) %d, thm1(iwbw)<=theta_c %d, theta_c<=theta_v %d]; "
              "(c) step violations %zu/%zu %s; (d) early iws peak %d/100 %s; final epoch: "
              "gap %.3g iws %.3g iwbw %.3g bound_c %.3g bound_v %.3g; %.0fs (full run %.0fs)",
              mi_order, rows.size(), a ? "ok" : "FAIL", ladder, rows.size(), b ? "ok" : "FAIL",
              rung[0], rung[1], rung[2], rung[3], step_violations, r.report.steps.size(),
              cc ? "ok" : "FAIL", early_peak, d ? "ok" : "FAIL", last.true_gap, last.iws,
              last.iwbw, last.bound_theta_c, last.bound_theta_v, t, full_time)};
}

// 9. Label noise.
Outcome RandomLabels() {
  const auto start = Clock::now();
  std::string detail;
  std::vector<double> gaps, bounds;
  bool margin = true;
  for (double rho : {0.0, 0.2, 0.4}) {
    ExperimentConfig c = ExperimentConfig::ClassificationDefaults();
    c.label_noise = rho;
    c.compute_cond_mi = false;
    const ExperimentResult r = orchestrate(c);
    const EpochRow& last = r.report.epochs.back();
    gaps.push_back(last.true_gap);
    bounds.push_back(last.bound_theta_c);
    margin = margin && last.bound_theta_c < last.bound_theta_v;
    detail += Fmt("rho=%.1f gap %.4f bound_c %.4f bound_v %.4f; ", rho, last.true_gap,
                  last.bound_theta_c, last.bound_theta_v);
  }
  const bool gaps_up = gaps[0] <= gaps[1] && gaps[1] <= gaps[2];
  const bool bounds_up = bounds[0] <= bounds[1] && bounds[1] <= bounds[2];
  const double t = Seconds(start);
  return {gaps_up && bounds_up && margin && t <= 2700.0,
          detail + Fmt("gap %s, bound %s, margin %s, %.0fs", gaps_up ? "nondecreasing" : "NOT monotone",
                       bounds_up ? "nondecreasing" : "NOT monotone", margin ? "positive" : "MISSING", t)};
}

// 10. Formats.
Outcome FormatFidelity() {
  std::vector<std::string> failures;
  const auto expect_format_error = [&](const char* what, const std::function<void()>& f) {
    try {
      f();
      failures.push_back(std::string(what) + " accepted");
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (e.code() != ErrorCode::kFormatError || msg.find("byte offset") == std::string::npos) {
        failures.push_back(std::string(what) + ": " + msg);
      }
    }
  };
  std::vector<std::uint8_t> images = {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2};
  for (int i = 0; i < 8; ++i) images.push_back(static_cast<std::uint8_t>(30 * i));
  const std::vector<std::uint8_t> labels = {0, 0, 8, 1, 0, 0, 0, 2, 3, 7};
  const Dataset parsed = ParseMnistIdx(images, labels);
  if (parsed.size() != 2 || parsed.labels[1] != 7) failures.push_back("valid IDX misread");
  auto bad = images;
  bad[0] = 0xDE;
  bad[1] = 0xAD;
  bad[2] = 0xBE;
  bad[3] = 0xEF;
  expect_format_error("bad image magic", [&] { ParseMnistIdx(bad, labels); });
  auto bad_labels = labels;
  bad_labels[3] = 3;
  expect_format_error("bad label magic", [&] { ParseMnistIdx(images, bad_labels); });
  const std::vector<std::uint8_t> cut(images.begin(), images.end() - 2);
  expect_format_error("truncated images", [&] { ParseMnistIdx(cut, labels); });
  const std::vector<std::uint8_t> cut_labels(labels.begin(), labels.end() - 1);
  expect_format_error("truncated labels", [&] { ParseMnistIdx(images, cut_labels); });

  ExperimentConfig c = ExperimentConfig::SyntheticDefaults();
  c.runs = 6;
  c.train.epochs = 4;
  c.keep_trajectories = true;
  c.hessian_probes = 4;
  const ExperimentResult a = orchestrate(c);
  const ExperimentResult b = orchestrate(c);
  const std::string csv = EpochCsv(a.report.epochs);
  if (csv != EpochCsv(b.report.epochs) || StepCsv(a.report.steps) != StepCsv(b.report.steps)) {
    failures.push_back("identical seeds gave different CSV");
  }
  if (EpochCsv(ParseEpochCsv(csv)) != csv) failures.push_back("epoch CSV round trip");
  const std::string steps = StepCsv(a.report.steps);
  if (StepCsv(ParseStepCsv(steps)) != steps) failures.push_back("step CSV round trip");
  const std::string json = ReportToJson(a.report).dump();
  if (ReportToJson(ReportFromJson(nlohmann::json::parse(json))).dump() != json) {
    failures.push_back("JSON round trip");
  }
  for (const Trajectory& t : a.trajectories) {
    const auto bytes = EncodeTrajectory(t);
    if (EncodeTrajectory(DecodeTrajectory(bytes)) != bytes) {
      failures.push_back("trajectory round trip");
      break;
    }
  }
  const auto bytes = EncodeTrajectory(a.trajectories.front());
  expect_format_error("truncated trajectory", [&] {
    DecodeTrajectory(std::span(bytes).first(bytes.size() / 2));
  });
  std::string detail = failures.empty() ? "IDX damage rejected with offsets; CSV, JSON and "
                                          "trajectory round trips lossless; CSV bytes reproducible"
                                        : "";
  for (const auto& f : failures) detail += f + "; ";
  return {failures.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {1, "gaussian_entropy_oracle", GaussianEntropyOracle},
    {2, "quadrature_consistency", QuadratureConsistency},
    {3, "partition_chain", PartitionChain},
    {4, "block_determinant", BlockDeterminant},
    {5, "mi_identities", MiIdentities},
    {6, "gradient_correctness", GradientCorrectness},
    {7, "trainer_identities", TrainerIdentities},
    {8, "synthetic_experiment", SyntheticExperiment},
    {9, "random_labels", RandomLabels},
    {10, "format_fidelity", FormatFidelity},
};

}  // namespace
}  // namespace renyigen

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : renyigen::kCriteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    renyigen::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("%s criterion %d %s: %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
