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
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "renyigen/bounds.h"
#include "renyigen/error.h"
#include "renyigen/partition.h"
#include "renyigen/samples.h"
#include "renyigen/sym_matrix.h"
#include "test_util.h"

namespace renyigen {
namespace {

const SymMatrix kWorked = SymMatrix::FromRows({{1.0, 0.9}, {0.9, 1.0}});

GradientStats StatsFor(const SymMatrix& cov, double max_sq_norm) {
  GradientStats s;
  s.cov = cov;
  s.mean.assign(cov.dim(), 0.0);
  s.scalar_var = cov.trace();
  s.max_sq_norm = max_sq_norm;
  return s;
}

SampleSet RandomVectors(std::size_t b, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  SampleSet s(b, d);
  for (std::size_t i = 0; i < b; ++i) {
    for (double& v : s.row(i)) v = normal(rng);
  }
  return s;
}

TEST(GradStatsTest, HandComputed) {
  const GradientStats s = grad_stats(SampleSet::FromRows({{1, 0}, {0, 1}}), 0.0, 4);
  EXPECT_DOUBLE_EQ(s.cov(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(s.cov(0, 1), -0.25);
  EXPECT_DOUBLE_EQ(s.scalar_var, 0.5);
  EXPECT_DOUBLE_EQ(s.max_sq_norm, 1.0);
  EXPECT_EQ(s.step, 4u);
  EXPECT_DOUBLE_EQ(grad_stats(SampleSet::FromRows({{1, 0}, {0, 1}}), 7.0).max_sq_norm,
                   7.0);
}

TEST(GradStatsTest, IdenticalGradientsHaveNoVariance) {
  const GradientStats s = grad_stats(SampleSet::FromRows({{1, 2}, {1, 2}, {1, 2}}), 0.0);
  EXPECT_EQ(s.scalar_var, 0.0);
  EXPECT_DOUBLE_EQ(s.max_sq_norm, 5.0);
}

TEST(BlockCovarianceTest, BlocksMatchFullCovariance) {
  std::mt19937_64 rng(1);
  const SampleSet v = RandomVectors(7, 6, rng);
  const SymMatrix full = sample_covariance(v, true);
  const Partition p = {{0, 3}, {1, 2, 5}, {4}};
  const std::vector<SymMatrix> blocks = block_covariance(v, p, true);
  ASSERT_EQ(blocks.size(), 3u);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const SymMatrix expected = principal_submatrix(full, p[k]);
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      for (std::size_t j = 0; j < p[k].size(); ++j) {
        EXPECT_NEAR(blocks[k](i, j), expected(i, j), 1e-14);
      }
    }
  }
  EXPECT_ERROR_CODE(block_covariance(v, {{0, 1}}, true), ErrorCode::kInvalidPartition);
}

TEST(ThetaTest, WorkedMatrix) {
  EXPECT_EQ(theta_c(SymMatrix(3), 0.1, 0.01), 0.0);
  EXPECT_NEAR(theta_c(kWorked, 1.0, 1.0), 0.5 * std::log(4.0 - 0.81), 1e-14);
  EXPECT_NEAR(theta_c(kWorked, 1.0, 1.0), 0.580010, 1e-6);
  EXPECT_NEAR(theta_v(2.0, 1.0, 1.0, 2), std::log(2.0), 1e-15);
  EXPECT_EQ(theta_v(0.0, 1.0, 1.0, 5), 0.0);
  const Partition singles = SingletonPartition(2);
  EXPECT_NEAR(theta_c_partitioned(kWorked, singles, 1.0, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(theta_c_partitioned(kWorked, WholePartition(2), 1.0, 1.0),
              theta_c(kWorked, 1.0, 1.0), 1e-15);
}

TEST(ThetaTest, DiagonalCovariance) {
  const std::vector<double> diag = {0.5, 2.0, 3.0};
  const double eta = 0.2, sigma2 = 0.01;
  double expected = 0.0;
  for (double v : diag) expected += 0.5 * std::log1p(eta * eta * v / sigma2);
  EXPECT_NEAR(theta_c(SymMatrix::Diagonal(diag), eta, sigma2), expected, 1e-13);
  EXPECT_NEAR(theta_c_partitioned(SymMatrix::Diagonal(diag), SingletonPartition(3),
                                  eta, sigma2),
              expected, 1e-13);
}

TEST(ThetaTest, MatchesDeterminantOracle) {
  std::mt19937_64 rng(2);
  const SampleSet v = RandomVectors(5, 8, rng);
  const SymMatrix cov = sample_covariance(v, true);
  Eigen::MatrixXd m(8, 8);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) m(i, j) = 4.0 * cov(i, j);
  }
  m += Eigen::MatrixXd::Identity(8, 8);
  EXPECT_NEAR(theta_c(cov, 0.2, 0.01), 0.5 * std::log(m.determinant()), 1e-9);
}

TEST(ThetaTest, ZeroNoiseIsDegenerate) {
  EXPECT_ERROR_CODE(theta_c(kWorked, 0.1, 0.0), ErrorCode::kDegenerateNoise);
  EXPECT_ERROR_CODE(theta_v(1.0, 0.1, 0.0, 2), ErrorCode::kDegenerateNoise);
}

TEST(ThetaTest, ChainOrderingOnRandomMatrices) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ratio(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 9;
    const SampleSet v = RandomVectors(2 + trial % 5, d, rng);
    const SymMatrix cov = sample_covariance(v, true);
    const double eta = 1.0, sigma2 = std::pow(10.0, ratio(rng));
    const double c = theta_c(cov, eta, sigma2);
    const double p = theta_c_partitioned(cov, RangePartition({0, d / 2, d}), eta, sigma2);
    const double tv = theta_v(cov.trace(), eta, sigma2, d);
    EXPECT_LE(c, p + 1e-9);
    EXPECT_LE(p, tv + 1e-9);
  }
}

TEST(BoundModesTest, SingleStep) {
  const std::vector<GradientStats> zero = {StatsFor(SymMatrix(2), 0.0)};
  const Partition singles = SingletonPartition(2);
  for (BoundMode mode : {BoundMode::kThm2Cov, BoundMode::kThm2Partitioned,
                         BoundMode::kThetaV, BoundMode::kLemma2Var,
                         BoundMode::kLemma1L}) {
    EXPECT_EQ(sgld_info_bound(zero, 0.1, 0.01, mode, &singles), 0.0);
  }
  const std::vector<GradientStats> worked = {StatsFor(kWorked, 4.0)};
  EXPECT_NEAR(sgld_info_bound(worked, 1.0, 1.0, BoundMode::kThm2Cov), 0.580010, 1e-6);
  EXPECT_NEAR(sgld_info_bound(worked, 1.0, 1.0, BoundMode::kLemma1L), std::log(3.0),
              1e-15);
  EXPECT_NEAR(sgld_info_bound(worked, 1.0, 1.0, BoundMode::kLemma2Var), 1.0, 1e-15);
  EXPECT_ERROR_CODE(sgld_info_bound(worked, 1.0, 1.0, BoundMode::kThm2Partitioned),
                    ErrorCode::kInvalidInput);
}

TEST(BoundModesTest, SumsOverSteps) {
  const std::vector<GradientStats> two = {StatsFor(kWorked, 4.0), StatsFor(kWorked, 4.0)};
  EXPECT_NEAR(sgld_info_bound(two, 1.0, 1.0, BoundMode::kThm2Cov),
              2.0 * theta_c(kWorked, 1.0, 1.0), 1e-15);
}

TEST(SgdBoundTest, SharesTheSgldCodePath) {
  const std::vector<GradientStats> steps = {StatsFor(kWorked, 4.0), StatsFor(kWorked, 2.0)};
  for (BoundMode mode : {BoundMode::kThm2Cov, BoundMode::kThetaV, BoundMode::kLemma1L}) {
    const SgdBound b = sgd_info_bound(steps, 0.1, 1e-3, 0.0, mode);
    EXPECT_EQ(b.info_term, sgld_info_bound(steps, 0.1, 1e-3, mode));
    EXPECT_EQ(b.hessian_term, 0.0);
  }
  EXPECT_DOUBLE_EQ(sgd_info_bound(steps, 0.1, 1e-3, 8.0, BoundMode::kThetaV).hessian_term,
                   0.5 * 2.0 * 1e-3 * 8.0);
}

TEST(SubgaussianTest, HalfRange) {
  const std::vector<double> losses = {0.2, 1.0, 0.6};
  EXPECT_DOUBLE_EQ(subgaussian_R(losses), 0.4);
  const std::vector<double> flat = {0.3, 0.3};
  EXPECT_EQ(subgaussian_R(flat), 0.0);
  EXPECT_ERROR_CODE(subgaussian_R(std::vector<double>{}), ErrorCode::kInvalidInput);
}

TEST(Thm1Test, PlugIn) {
  const Thm1Bounds b = thm1_bounds(2.0, 0.5, 100);
  EXPECT_NEAR(b.mean_bound, 0.1, 1e-15);
  EXPECT_NEAR(b.second_moment_bound, (2.0 + std::log(3.0)) / 100.0, 1e-15);
  EXPECT_NEAR(b.second_moment_bound, 0.030986, 1e-6);
  const Thm1Bounds zero = thm1_bounds(0.0, 0.5, 100);
  EXPECT_EQ(zero.mean_bound, 0.0);
  EXPECT_NEAR(zero.second_moment_bound, std::log(3.0) / 100.0, 1e-15);
  EXPECT_EQ(thm1_bounds(-0.3, 0.5, 100).mean_bound, 0.0);
  EXPECT_ERROR_CODE(thm1_bounds(1.0, 1.0, 0), ErrorCode::kDomainError);
}

TEST(StepTermsTest, BlockStorageMatchesFullStorage) {
  std::mt19937_64 rng(4);
  const SampleSet v = RandomVectors(6, 5, rng);
  const Partition p = {{0, 1}, {2, 3, 4}};
  const SymMatrix full = sample_covariance(v, true);
  const StepTerms a = ComputeStepTerms({full}, true, p, 3.0, 0.1, 0.01, 5);
  const StepTerms b =
      ComputeStepTerms(block_covariance(v, p, true), false, p, 3.0, 0.1, 0.01, 5);
  EXPECT_TRUE(std::isnan(b.theta_c));
  EXPECT_NEAR(a.theta_c_partitioned, b.theta_c_partitioned, 1e-12);
  EXPECT_NEAR(a.theta_v, b.theta_v, 1e-12);
  EXPECT_NEAR(a.lemma2, b.lemma2, 1e-12);
  EXPECT_EQ(a.lemma1, b.lemma1);
  EXPECT_LE(a.theta_c, a.theta_c_partitioned + 1e-12);
}

TEST(PartitionTest, Validation) {
  ValidatePartition(RangePartition({0, 2, 5}), 5);
  EXPECT_ERROR_CODE(ValidatePartition({{0, 1}, {1, 2}}, 3), ErrorCode::kInvalidPartition);
  EXPECT_ERROR_CODE(ValidatePartition({{0}, {2}}, 3), ErrorCode::kInvalidPartition);
  EXPECT_ERROR_CODE(ValidatePartition({{0, 3}}, 3), ErrorCode::kInvalidPartition);
  EXPECT_ERROR_CODE(ValidatePartition({{}, {0, 1, 2}}, 3), ErrorCode::kInvalidPartition);
}

}  // namespace
}  // namespace renyigen
