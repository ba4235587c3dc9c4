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

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "renyigen/dataset.h"
#include "renyigen/error.h"
#include "renyigen/hessian.h"
#include "renyigen/mlp.h"
#include "renyigen/samples.h"
#include "test_util.h"

namespace renyigen {
namespace {

Dataset RandomRegression(std::size_t n, std::size_t in, std::size_t out,
                         std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Dataset d{SampleSet(n, in), SampleSet(n, out), {}, 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : d.inputs.row(i)) v = normal(rng);
    for (double& v : d.targets.row(i)) v = normal(rng);
  }
  return d;
}

Dataset RandomClassification(std::size_t n, std::size_t in, int classes,
                             std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> label(0, classes - 1);
  Dataset d{SampleSet(n, in), SampleSet(), {}, classes};
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : d.inputs.row(i)) v = normal(rng);
    d.labels.push_back(label(rng));
  }
  return d;
}

// Central differences of the mean loss over `batch`.
std::vector<double> NumericGradient(const MlpModel& model, const Dataset& data,
                                    LossSpec loss) {
  std::vector<double> w = model.flatten();
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(w[i]));
    const double saved = w[i];
    w[i] = saved + h;
    const double up = mean_loss_at(model, w, data, loss);
    w[i] = saved - h;
    const double down = mean_loss_at(model, w, data, loss);
    w[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double RelativeError(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    norm += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

TEST(MlpModelTest, ParameterLayout) {
  const MlpModel m({10, 10, 1});
  EXPECT_EQ(m.param_count(), 121u);
  const Partition groups = layer_groups(m);
  ASSERT_EQ(groups.size(), 4u);
  EXPECT_EQ(groups[0].size(), 100u);
  EXPECT_EQ(groups[1].size(), 10u);
  EXPECT_EQ(groups[2].size(), 10u);
  EXPECT_EQ(groups[3].size(), 1u);
  ValidatePartition(groups, m.param_count());
}

TEST(MlpModelTest, SingleLayerWithoutBiasIsOneGroup) {
  const MlpModel m({4, 3}, false);
  const Partition groups = layer_groups(m);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].size(), 12u);
}

TEST(MlpModelTest, InitializationIsScaledUniformAndSeeded) {
  const MlpModel a = MlpModel::Initialized({16, 8, 2}, 5);
  const MlpModel b = MlpModel::Initialized({16, 8, 2}, 5);
  EXPECT_EQ(a.flatten(), b.flatten());
  const auto p = a.params();
  for (std::size_t i = 0; i < 16 * 8; ++i) {
    EXPECT_LE(std::abs(p[a.weight_offset(0) + i]), 0.25);
  }
  EXPECT_NE(MlpModel::Initialized({16, 8, 2}, 6).flatten(), a.flatten());
}

TEST(MlpModelTest, UnflattenChecksLength) {
  MlpModel m({2, 2});
  const std::vector<double> wrong(5, 0.0);
  EXPECT_ERROR_CODE(m.unflatten(wrong), ErrorCode::kInvalidInput);
}

TEST(ForwardTest, IdentityNetworkFitsItsInput) {
  MlpModel m({3, 3});
  std::vector<double> w(m.param_count(), 0.0);
  for (std::size_t i = 0; i < 3; ++i) w[m.weight_offset(0) + i * 3 + i] = 1.0;
  m.unflatten(w);
  std::mt19937_64 rng(1);
  Dataset d = RandomRegression(5, 3, 3, rng);
  d.targets = d.inputs;
  const ForwardResult r = forward(m, d, {LossKind::kMse});
  EXPECT_EQ(r.mean, 0.0);
}

TEST(ForwardTest, SquaredErrorOfOneNeuron) {
  MlpModel m({1, 1});
  const std::vector<double> w = {2.0, 0.0};
  m.unflatten(w);
  const Dataset d{SampleSet::FromRows({{3.0}}), SampleSet::FromRows({{0.0}}), {}, 0};
  EXPECT_DOUBLE_EQ(forward(m, d, {LossKind::kMse}).mean, 36.0);
}

TEST(ForwardTest, EqualLogitsGiveLogK) {
  MlpModel m({2, 5});
  m.unflatten(std::vector<double>(m.param_count(), 0.0));
  std::mt19937_64 rng(2);
  const Dataset d = RandomClassification(7, 2, 5, rng);
  const ForwardResult r = forward(m, d, {LossKind::kSoftmaxCrossEntropy});
  for (double v : r.per_sample) EXPECT_NEAR(v, std::log(5.0), 1e-14);
}

TEST(ForwardTest, ShapeMismatch) {
  const MlpModel m({3, 1});
  std::mt19937_64 rng(3);
  EXPECT_ERROR_CODE(forward(m, RandomRegression(4, 2, 1, rng), {LossKind::kMse}),
                    ErrorCode::kInvalidInput);
  EXPECT_ERROR_CODE(forward(m, RandomRegression(4, 3, 1, rng),
                            {LossKind::kSoftmaxCrossEntropy}),
                    ErrorCode::kInvalidInput);
}

TEST(GradientTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const std::vector<std::vector<std::size_t>> shapes = {
      {3, 5, 1}, {4, 6, 2}, {2, 3, 3, 1}, {5, 4, 3}, {3, 8, 4}};
  for (std::size_t trial = 0; trial < 10; ++trial) {
    const auto& shape = shapes[trial % shapes.size()];
    const MlpModel m = MlpModel::Initialized(shape, 40 + trial);
    const bool classify = trial % 2 == 1 && shape.back() > 1;
    const Dataset d = classify
        ? RandomClassification(6, shape.front(), static_cast<int>(shape.back()), rng)
        : RandomRegression(6, shape.front(), shape.back(), rng);
    const LossSpec loss{classify ? LossKind::kSoftmaxCrossEntropy : LossKind::kMse};
    const std::vector<double> analytic = mean_gradient_at(m, m.params(), d, loss);
    EXPECT_LE(RelativeError(analytic, NumericGradient(m, d, loss)), 1e-5) << trial;
  }
}

TEST(GradientTest, PerSampleRowsAverageToMean) {
  std::mt19937_64 rng(5);
  const MlpModel m = MlpModel::Initialized({3, 4, 2}, 9);
  const Dataset d = RandomRegression(8, 3, 2, rng);
  const SampleSet g = per_sample_gradients(m, d, {LossKind::kMse});
  const std::vector<double> mean = mean_gradient_at(m, m.params(), d, {LossKind::kMse});
  for (std::size_t j = 0; j < m.param_count(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sum += g[i][j];
    EXPECT_NEAR(sum / 8.0, mean[j], 1e-12);
  }
}

TEST(GradientTest, DuplicateSampleGivesIdenticalRows) {
  std::mt19937_64 rng(6);
  const MlpModel m = MlpModel::Initialized({3, 4, 1}, 10);
  const Dataset d = RandomRegression(4, 3, 1, rng);
  const std::vector<std::size_t> batch = {2, 2};
  std::vector<double> losses;
  const SampleSet g = per_sample_gradients(m, d, batch, {LossKind::kMse}, &losses);
  ASSERT_EQ(g.size(), 2u);
  for (std::size_t j = 0; j < m.param_count(); ++j) EXPECT_EQ(g[0][j], g[1][j]);
  EXPECT_EQ(losses[0], losses[1]);
}

TEST(GradientTest, BadBatch) {
  std::mt19937_64 rng(7);
  const MlpModel m = MlpModel::Initialized({3, 1}, 1);
  const Dataset d = RandomRegression(4, 3, 1, rng);
  const std::vector<std::size_t> out = {9};
  EXPECT_ERROR_CODE(per_sample_gradients(m, d, out, {LossKind::kMse}),
                    ErrorCode::kInvalidInput);
}

Objective Quadratic(std::vector<double> diag) {
  return {[diag](std::span<const double> w) {
            double s = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) s += 0.5 * diag[i] * w[i] * w[i];
            return s;
          },
          [diag](std::span<const double> w) {
            std::vector<double> g(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) g[i] = diag[i] * w[i];
            return g;
          }};
}

TEST(HessianTest, QuadraticTrace) {
  const Objective q = Quadratic({1.0, 2.0, 3.0});
  const std::vector<double> w = {0.3, -0.2, 0.9};
  EXPECT_NEAR(hessian_trace_hutchinson(q, w, 512, 1), 6.0, 0.3);
  EXPECT_NEAR(hessian_trace_exact_fd(q, w), 6.0, 6e-6);
}

TEST(HessianTest, LinearAndConstantLosses) {
  const Objective linear{
      [](std::span<const double> w) { return 2.0 * w[0] - w[1]; },
      [](std::span<const double>) { return std::vector<double>{2.0, -1.0}; }};
  const std::vector<double> w = {1.0, 2.0};
  EXPECT_EQ(hessian_trace_hutchinson(linear, w, 16, 2), 0.0);
  const Objective constant{
      [](std::span<const double>) { return 4.0; },
      [](std::span<const double>) { return std::vector<double>{0.0, 0.0}; }};
  EXPECT_EQ(hessian_trace_exact_fd(constant, w), 0.0);
}

TEST(HessianTest, HutchinsonMatchesExactOnSmallNetwork) {
  std::mt19937_64 rng(8);
  const MlpModel m = MlpModel::Initialized({6, 8, 1}, 11);
  ASSERT_LE(m.param_count(), 200u);
  const Dataset d = RandomRegression(40, 6, 1, rng);
  const double exact = hessian_trace_exact_fd(m, d, {LossKind::kMse});
  const double estimate = hessian_trace_hutchinson(m, d, {LossKind::kMse}, 512, 3);
  EXPECT_NEAR(estimate, exact, 0.05 * std::abs(exact));
}

TEST(HessianTest, ExactRejectsLargeModels) {
  const Objective q = Quadratic(std::vector<double>(2001, 1.0));
  const std::vector<double> w(2001, 0.0);
  EXPECT_ERROR_CODE(hessian_trace_exact_fd(q, w), ErrorCode::kTooLarge);
}

}  // namespace
}  // namespace renyigen
