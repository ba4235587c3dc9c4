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

#include "renyigen/selftest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "renyigen/bounds.h"
#include "renyigen/data_sources.h"
#include "renyigen/entropy.h"
#include "renyigen/error.h"
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

SymMatrix RandomPsd(std::size_t d, std::size_t rank, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SampleSet g(rank, d);
  for (std::size_t r = 0; r < rank; ++r) {
    for (double& v : g.row(r)) v = normal(rng);
  }
  SymMatrix a(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < rank; ++r) s += g[r][i] * g[r][j];
      a.set(i, j, s / static_cast<double>(rank));
    }
  }
  return a;
}

Partition RandomPartition(std::size_t d, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(1, d);
  const std::size_t k = pick(rng);
  std::vector<std::size_t> label(d);
  std::uniform_int_distribution<std::size_t> which(0, k - 1);
  for (auto& l : label) l = which(rng);
  Partition p;
  for (std::size_t b = 0; b < k; ++b) {
    IndexSet block;
    for (std::size_t i = 0; i < d; ++i) {
      if (label[i] == b) block.push_back(i);
    }
    if (!block.empty()) p.push_back(block);
  }
  return p;
}

SelfTestResult Check(const std::string& name,
                     const std::function<std::string()>& body) {
  SelfTestResult r{name, false, {}};
  try {
    r.detail = body();
    r.passed = r.detail.empty();
  } catch (const std::exception& e) {
    r.detail = std::string("threw ") + e.what();
  }
  return r;
}

}  // namespace

std::vector<SelfTestResult> RunSelfTests(std::uint64_t seed) {
  std::vector<SelfTestResult> out;

  out.push_back(Check("eigen_reconstruction", [&]() -> std::string {
    Rng rng = MakeRng(seed, Stream::kAuxiliary, 1);
    const SymMatrix a = RandomPsd(12, 5, rng);
    const EigenDecomp e = sym_eigen(a);
    double worst = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
      for (std::size_t j = 0; j < 12; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 12; ++k) {
          s += e.eigenvectors[i * 12 + k] * e.eigenvalues[k] *
               e.eigenvectors[j * 12 + k];
        }
        worst = std::max(worst, std::abs(s - a(i, j)));
      }
    }
    return worst <= 1e-10 * (1.0 + a.frobenius_norm())
               ? ""
               : "reconstruction error " + FormatReal(worst);
  }));

  out.push_back(Check("vn_entropy_uniform", []() -> std::string {
    SymMatrix k = SymMatrix::Identity(7);
    k *= 1.0 / 7.0;
    const double v = vn_entropy(k);
    return std::abs(v - std::log(7.0)) <= 1e-12 ? "" : "got " + FormatReal(v);
  }));

  out.push_back(Check("theta_chain", [&]() -> std::string {
    Rng rng = MakeRng(seed, Stream::kAuxiliary, 2);
    std::uniform_int_distribution<std::size_t> dim(1, 10);
    std::uniform_real_distribution<double> ratio(1e-3, 1e3);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t d = dim(rng);
      const SymMatrix v = RandomPsd(d, 1 + trial % d, rng);
      const Partition p = RandomPartition(d, rng);
      const double c = ratio(rng);
      const double eta = 1.0, sigma2 = 1.0 / c;
      const double full = theta_c(v, eta, sigma2);
      const double part = theta_c_partitioned(v, p, eta, sigma2);
      const double tv = theta_v(v.trace(), eta, sigma2, d);
      if (!(full <= part + 1e-9 && part <= tv + 1e-9)) {
        return "violation at trial " + std::to_string(trial);
      }
    }
    return "";
  }));

  out.push_back(Check("mi_nonnegative_raw", [&]() -> std::string {
    Rng rng = MakeRng(seed, Stream::kAuxiliary, 3);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      SampleSet x(40, 2), y(40, 1);
      for (std::size_t i = 0; i < 40; ++i) {
        x.row(i)[0] = normal(rng);
        x.row(i)[1] = normal(rng);
        y.row(i)[0] = x[i][0] + 0.5 * normal(rng);
      }
      const double mi = mi_estimate(x, y, AutoGaussianKernel(x),
                                    AutoGaussianKernel(y), false);
      if (mi < -1e-9) return "negative MI " + FormatReal(mi);
    }
    SampleSet x(10, 1), y(10, 1);
    for (std::size_t i = 0; i < 10; ++i) {
      x.row(i)[0] = static_cast<double>(i);
      y.row(i)[0] = 3.0;
    }
    const double zero = mi_estimate(x, y, KernelSpec::Gaussian(1.0, 1),
                                    KernelSpec::Gaussian(1.0, 1), false);
    return zero == 0.0 ? "" : "constant Y gave " + FormatReal(zero);
  }));

  out.push_back(Check("gradient_vs_finite_difference", [&]() -> std::string {
    const MlpModel model = MlpModel::Initialized({3, 5, 2}, seed);
    Dataset data;
    data.inputs = SampleSet(4, 3);
    data.targets = SampleSet(4, 2);
    Rng rng = MakeRng(seed, Stream::kAuxiliary, 4);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
      for (double& v : data.inputs.row(i)) v = normal(rng);
      for (double& v : data.targets.row(i)) v = normal(rng);
    }
    const LossSpec loss{LossKind::kMse};
    const auto analytic = mean_gradient_at(model, model.params(), data, loss);
    std::vector<double> w = model.flatten();
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double h = 1e-6 * (1.0 + std::abs(w[k]));
      const double keep = w[k];
      w[k] = keep + h;
      const double up = mean_loss_at(model, w, data, loss);
      w[k] = keep - h;
      const double down = mean_loss_at(model, w, data, loss);
      w[k] = keep;
      worst = std::max(worst, std::abs((up - down) / (2 * h) - analytic[k]));
      scale = std::max(scale, std::abs(analytic[k]));
    }
    return worst <= 1e-5 * (1.0 + scale) ? "" : "max error " + FormatReal(worst);
  }));

  out.push_back(Check("sgld_step_reconstruction", [&]() -> std::string {
    const SyntheticTask task = MakeSyntheticTask(seed);
    const TrainTestSplit split = gen_synthetic(task, 20, seed);
    TrainConfig config;
    config.epochs = 2;
    config.batch_size = 5;
    config.seed = seed;
    const Trajectory t = run_training(InitialModel({10, 4, 1}, seed),
                                      split.train, &split.test, config);
    for (const StepRecord& s : t.steps) {
      const std::size_t d = s.params_before.size();
      for (std::size_t k = 0; k < d; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < s.grads.size(); ++i) mean += s.grads[i][k];
        mean /= static_cast<double>(s.grads.size());
        const double expect = s.params_before[k] - config.eta * mean + s.noise[k];
        if (expect != s.params_after[k]) {
          return "step " + std::to_string(s.step) + " does not reconstruct";
        }
      }
    }
    return "";
  }));

  out.push_back(Check("idx_rejects_bad_magic", []() -> std::string {
    const std::vector<std::uint8_t> images = {0xDE, 0xAD, 0xBE, 0xEF, 0, 0, 0, 0};
    const std::vector<std::uint8_t> labels = {0, 0, 8, 1, 0, 0, 0, 0};
    try {
      ParseMnistIdx(images, labels);
    } catch (const Error& e) {
      return e.code() == ErrorCode::kFormatError ? "" : "wrong error code";
    }
    return "accepted a bad magic";
  }));

  out.push_back(Check("csv_round_trip", [&]() -> std::string {
    Rng rng = MakeRng(seed, Stream::kAuxiliary, 5);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<EpochRow> rows(5);
    for (auto& r : rows) {
      for (const auto& col : EpochColumns()) r.*(col.field) = normal(rng) * 1e3;
    }
    const auto back = ParseEpochCsv(EpochCsv(rows));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (const auto& col : EpochColumns()) {
        if (back[i].*(col.field) != rows[i].*(col.field)) return "value changed";
      }
    }
    return "";
  }));

  out.push_back(Check("trajectory_round_trip", [&]() -> std::string {
    const SyntheticTask task = MakeSyntheticTask(seed);
    const TrainTestSplit split = gen_synthetic(task, 10, seed);
    TrainConfig config;
    config.algorithm = Algorithm::kSgd;
    config.sigma2 = 0.0;
    config.epochs = 2;
    config.batch_size = 5;
    config.seed = seed;
    Trajectory t = run_training(InitialModel({10, 3, 1}, seed), split.train,
                                &split.test, config);
    t = attach_auxiliary(std::move(t), 1e-3, seed);
    const auto bytes = EncodeTrajectory(t);
    return EncodeTrajectory(DecodeTrajectory(bytes)) == bytes
               ? ""
               : "re-encoding differs";
  }));

  return out;
}

}  // namespace renyigen
