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

#include "renyigen/error.h"
#include "renyigen/samples.h"
#include "renyigen/sym_matrix.h"
#include "test_util.h"

namespace renyigen {
namespace {

SymMatrix RandomSymmetric(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) s.set(i, j, normal(rng));
  }
  return s;
}

SymMatrix RandomPsd(std::size_t n, std::size_t rank, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> g(n * rank);
  for (double& v : g) v = normal(rng);
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < rank; ++k) sum += g[i * rank + k] * g[j * rank + k];
      s.set(i, j, sum);
    }
  }
  return s;
}

Eigen::MatrixXd ToEigen(const SymMatrix& s) {
  const std::size_t n = s.dim();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = s(i, j);
  }
  return m;
}

TEST(SymEigenTest, DiagonalKeepsAxes) {
  const std::vector<double> diag = {1.0, 3.0};
  const EigenDecomp e = sym_eigen(SymMatrix::Diagonal(diag));
  ASSERT_EQ(e.eigenvalues.size(), 2u);
  EXPECT_DOUBLE_EQ(e.eigenvalues[0], 3.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues[1], 1.0);
  // Column 0 is the second axis, up to sign.
  EXPECT_NEAR(std::abs(e.eigenvectors[1 * 2 + 0]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.eigenvectors[0 * 2 + 1]), 1.0, 1e-15);
}

TEST(SymEigenTest, SwapMatrix) {
  const EigenDecomp e = sym_eigen(SymMatrix::FromRows({{0, 1}, {1, 0}}));
  EXPECT_NEAR(e.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], -1.0, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(e.eigenvectors[0]), r, 1e-14);
  EXPECT_NEAR(e.eigenvectors[0] * e.eigenvectors[2], r * r, 1e-14);
  EXPECT_NEAR(e.eigenvectors[1] * e.eigenvectors[3], -r * r, 1e-14);
}

TEST(SymEigenTest, ReconstructsRandomMatrices) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 8u, 30u}) {
    const SymMatrix s = RandomSymmetric(n, rng);
    const EigenDecomp e = sym_eigen(s);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          sum += e.eigenvectors[i * n + k] * e.eigenvalues[k] *
                 e.eigenvectors[j * n + k];
        }
        EXPECT_NEAR(sum, s(i, j), 1e-8) << n;
      }
    }
    for (std::size_t k = 1; k < n; ++k) {
      EXPECT_GE(e.eigenvalues[k - 1], e.eigenvalues[k]);
    }
  }
}

TEST(SymEigenTest, MatchesEigenLibrary) {
  std::mt19937_64 rng(12);
  const SymMatrix s = RandomSymmetric(40, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(ToEigen(s));
  const std::vector<double> ours = sym_eigenvalues(s);
  for (std::size_t k = 0; k < 40; ++k) {
    EXPECT_NEAR(ours[k], oracle.eigenvalues()(39 - k), 1e-10);
  }
}

TEST(SymEigenTest, ValuesOnlyAgreesWithFullDecomposition) {
  std::mt19937_64 rng(13);
  const SymMatrix s = RandomPsd(25, 25, rng);
  const std::vector<double> a = sym_eigenvalues(s);
  const std::vector<double> b = sym_eigen(s).eigenvalues;
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10);
}

TEST(SymEigenTest, RejectsNonFinite) {
  SymMatrix s(2);
  s.set(0, 1, std::nan(""));
  EXPECT_ERROR_CODE(sym_eigen(s), ErrorCode::kInvalidMatrix);
  EXPECT_ERROR_CODE(sym_eigen(SymMatrix()), ErrorCode::kInvalidMatrix);
}

TEST(VnEntropyTest, UniformSpectrum) {
  SymMatrix k = SymMatrix::Identity(2);
  k *= 0.5;
  EXPECT_NEAR(vn_entropy(k), std::log(2.0), 1e-15);
  SymMatrix k7 = SymMatrix::Identity(7);
  k7 *= 1.0 / 7.0;
  EXPECT_NEAR(vn_entropy(k7), std::log(7.0), 1e-14);
}

TEST(VnEntropyTest, RankOneIsZero) {
  EXPECT_EQ(vn_entropy(SymMatrix::FromRows({{0.5, 0.5}, {0.5, 0.5}})), 0.0);
}

TEST(VnEntropyTest, HandSolvedTwoByTwo) {
  const double expected = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  EXPECT_NEAR(vn_entropy(SymMatrix::FromRows({{0.5, 0.25}, {0.25, 0.5}})),
              expected, 1e-14);
  EXPECT_NEAR(expected, 0.562335, 1e-6);
}

TEST(VnEntropyTest, Errors) {
  EXPECT_ERROR_CODE(vn_entropy(SymMatrix::Identity(2)),
                    ErrorCode::kNotTraceNormalized);
  EXPECT_ERROR_CODE(vn_entropy(SymMatrix::FromRows({{0.5, 1.0}, {1.0, 0.5}})),
                    ErrorCode::kNotPSD);
}

TEST(VnEntropyTest, ToleratesTinyNegativeRoundoff) {
  const std::vector<double> spectrum = {0.6, 0.4 + 5e-7, -5e-7};
  EXPECT_NEAR(vn_entropy_from_spectrum(spectrum),
              -(0.6 * std::log(0.6) + 0.4 * std::log(0.4)), 1e-5);
}

TEST(LogdetShiftedTest, ZeroMatrix) {
  EXPECT_EQ(logdet_shifted(SymMatrix(4), 3.0), 0.0);
}

TEST(LogdetShiftedTest, Diagonal) {
  const std::vector<double> diag = {1.0, 3.0};
  EXPECT_NEAR(logdet_shifted(SymMatrix::Diagonal(diag), 1.0),
              0.5 * std::log(8.0), 1e-14);
  EXPECT_NEAR(0.5 * std::log(8.0), 1.039721, 1e-6);
}

TEST(LogdetShiftedTest, MatchesLuDeterminant) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix a = RandomPsd(6, 3 + trial % 4, rng);
    const double c = 0.7;
    Eigen::MatrixXd m = c * ToEigen(a) + Eigen::MatrixXd::Identity(6, 6);
    const double oracle = 0.5 * std::log(m.fullPivLu().determinant());
    EXPECT_NEAR(logdet_shifted(a, c), oracle, 1e-9);
  }
}

TEST(LogdetShiftedTest, RejectsNegativeShift) {
  EXPECT_ERROR_CODE(logdet_shifted(SymMatrix::Identity(2), -1.0),
                    ErrorCode::kDomainError);
}

TEST(PrincipalSubmatrixTest, Restrictions) {
  std::mt19937_64 rng(15);
  const SymMatrix a = RandomSymmetric(5, rng);
  const std::vector<std::size_t> all = {0, 1, 2, 3, 4};
  const SymMatrix same = principal_submatrix(a, all);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(same(i, j), a(i, j));
  }
  const std::vector<double> diag = {1, 2, 3};
  const std::vector<std::size_t> idx = {0, 2};
  const SymMatrix sub = principal_submatrix(SymMatrix::Diagonal(diag), idx);
  EXPECT_EQ(sub(0, 0), 1.0);
  EXPECT_EQ(sub(1, 1), 3.0);
  EXPECT_EQ(sub(0, 1), 0.0);
}

TEST(PrincipalSubmatrixTest, RejectsBadIndices) {
  const SymMatrix a = SymMatrix::Identity(3);
  const std::vector<std::size_t> dup = {0, 0};
  const std::vector<std::size_t> out = {3};
  EXPECT_ERROR_CODE(principal_submatrix(a, dup), ErrorCode::kInvalidPartition);
  EXPECT_ERROR_CODE(principal_submatrix(a, out), ErrorCode::kInvalidPartition);
}

TEST(SampleCovarianceTest, HandComputed) {
  const SampleSet v = SampleSet::FromRows({{1, 0}, {0, 1}});
  const SymMatrix unscaled = sample_covariance(v, false);
  EXPECT_DOUBLE_EQ(unscaled(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(unscaled(0, 1), -0.5);
  EXPECT_DOUBLE_EQ(unscaled(1, 1), 0.5);
  const SymMatrix scaled = sample_covariance(v, true);
  EXPECT_DOUBLE_EQ(scaled(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(scaled(0, 1), -0.25);
}

TEST(SampleCovarianceTest, CopiesHaveNoVariance) {
  const SampleSet v = SampleSet::FromRows({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  const SymMatrix c = sample_covariance(v, false);
  for (double x : c.values()) EXPECT_EQ(x, 0.0);
}

TEST(SampleCovarianceTest, MatchesEigenOracle) {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> normal;
  SampleSet v(9, 4);
  Eigen::MatrixXd x(9, 4);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 4; ++j) x(i, j) = v.row(i)[j] = normal(rng);
  }
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd oracle = centered.transpose() * centered / 8.0;
  const SymMatrix c = sample_covariance(v, false);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(c(i, j), oracle(i, j), 1e-12);
  }
}

TEST(SampleCovarianceTest, NeedsTwoVectors) {
  EXPECT_ERROR_CODE(sample_covariance(SampleSet::FromRows({{1, 2}}), false),
                    ErrorCode::kInsufficientSamples);
}

}  // namespace
}  // namespace renyigen
