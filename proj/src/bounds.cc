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

#include "renyigen/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "renyigen/error.h"

namespace renyigen {
namespace {

double NoiseRatio(double eta, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw Error(ErrorCode::kDegenerateNoise, "noise variance must be positive");
  }
  return eta * eta / sigma2;
}

}  // namespace

GradientStats grad_stats(const SampleSet& grads, double prev_max_sq_norm,
                         std::size_t step) {
  GradientStats stats;
  stats.step = step;
  stats.cov = sample_covariance(grads, /*scale_by_batch=*/true);
  stats.scalar_var = stats.cov.trace();
  const std::size_t d = grads.dim();
  stats.mean.assign(d, 0.0);
  double largest = prev_max_sq_norm;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const auto g = grads[k];
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      stats.mean[i] += g[i];
      sq += g[i] * g[i];
    }
    largest = std::max(largest, sq);
  }
  for (double& m : stats.mean) m /= static_cast<double>(grads.size());
  stats.max_sq_norm = largest;
  return stats;
}

std::vector<SymMatrix> block_covariance(const SampleSet& vectors,
                                        const Partition& blocks,
                                        bool scale_by_batch) {
  const std::size_t b = vectors.size();
  if (b < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "covariance needs at least 2 vectors, got " + std::to_string(b));
  }
  ValidatePartition(blocks, vectors.dim());
  const std::size_t d = vectors.dim();
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < b; ++r) {
    const auto x = vectors[r];
    for (std::size_t i = 0; i < d; ++i) mean[i] += x[i];
  }
  for (double& m : mean) m /= static_cast<double>(b);
  double divisor = static_cast<double>(b - 1);
  if (scale_by_batch) divisor *= static_cast<double>(b);

  std::vector<SymMatrix> out;
  out.reserve(blocks.size());
  std::vector<double> centered;
  for (const auto& block : blocks) {
    const std::size_t n = block.size();
    std::vector<double> upper(n * n, 0.0);
    centered.resize(n);
    for (std::size_t r = 0; r < b; ++r) {
      const auto x = vectors[r];
      for (std::size_t i = 0; i < n; ++i) centered[i] = x[block[i]] - mean[block[i]];
      for (std::size_t i = 0; i < n; ++i) {
        const double ci = centered[i];
        if (ci == 0.0) continue;
        double* row = upper.data() + i * n;
        for (std::size_t j = i; j < n; ++j) row[j] += ci * centered[j];
      }
    }
    for (double& x : upper) x /= divisor;
    out.push_back(SymMatrix::FromUpper(n, upper));
  }
  return out;
}

double theta_c(const SymMatrix& cov, double eta, double sigma2) {
  return logdet_shifted(cov, NoiseRatio(eta, sigma2));
}

double theta_v(double scalar_var, double eta, double sigma2, std::size_t d) {
  const double ratio = NoiseRatio(eta, sigma2);
  if (d < 1) throw Error(ErrorCode::kDomainError, "dimension must be >= 1");
  if (!(scalar_var >= 0.0)) {
    throw Error(ErrorCode::kDomainError, "variance must be nonnegative");
  }
  const double dim = static_cast<double>(d);
  return 0.5 * dim * std::log1p(ratio * scalar_var / dim);
}

double theta_c_partitioned(const SymMatrix& cov, const Partition& partition,
                           double eta, double sigma2) {
  ValidatePartition(partition, cov.dim());
  double sum = 0.0;
  for (const auto& block : partition) {
    sum += theta_c(principal_submatrix(cov, block), eta, sigma2);
  }
  return sum;
}

double lemma2_term(double scalar_var, double eta, double sigma2) {
  return 0.5 * NoiseRatio(eta, sigma2) * scalar_var;
}

double step_bound_term(const GradientStats& stats, double eta, double sigma2,
                       BoundMode mode, const Partition* partition) {
  const std::size_t d = stats.mean.size();
  switch (mode) {
    case BoundMode::kThm2Cov:
      if (stats.cov.dim() == 0) {
        throw Error(ErrorCode::kInvalidInput,
                    "full-covariance bound needs a stored covariance");
      }
      return theta_c(stats.cov, eta, sigma2);
    case BoundMode::kThm2Partitioned:
      if (partition == nullptr || stats.cov.dim() == 0) {
        throw Error(ErrorCode::kInvalidInput,
                    "partitioned bound needs a partition and a covariance");
      }
      return theta_c_partitioned(stats.cov, *partition, eta, sigma2);
    case BoundMode::kThetaV:
      return theta_v(stats.scalar_var, eta, sigma2, d);
    case BoundMode::kLemma2Var:
      return lemma2_term(stats.scalar_var, eta, sigma2);
    case BoundMode::kLemma1L:
      return theta_v(stats.max_sq_norm, eta, sigma2, d);
  }
  throw Error(ErrorCode::kInvalidInput, "unknown bound mode");
}

double sgld_info_bound(std::span<const GradientStats> stats, double eta,
                       double sigma2, BoundMode mode,
                       const Partition* partition) {
  if (stats.empty()) throw Error(ErrorCode::kInvalidInput, "no steps");
  double sum = 0.0;
  for (const auto& s : stats) {
    sum += step_bound_term(s, eta, sigma2, mode, partition);
  }
  return sum;
}

SgdBound sgd_info_bound(std::span<const GradientStats> stats, double eta,
                        double virtual_sigma2, double hessian_trace,
                        BoundMode mode, const Partition* partition) {
  SgdBound out;
  out.info_term = sgld_info_bound(stats, eta, virtual_sigma2, mode, partition);
  out.hessian_term = 0.5 * static_cast<double>(stats.size()) *
                     virtual_sigma2 * hessian_trace;
  return out;
}

double subgaussian_R(std::span<const double> batch_losses) {
  if (batch_losses.empty()) {
    throw Error(ErrorCode::kInvalidInput, "no batch losses recorded");
  }
  const auto [lo, hi] =
      std::minmax_element(batch_losses.begin(), batch_losses.end());
  return 0.5 * (*hi - *lo);
}

Thm1Bounds thm1_bounds(double info, double R, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::kDomainError, "n must be at least 1");
  const double clamped = std::max(0.0, info);
  const double nd = static_cast<double>(n);
  return {std::sqrt(2.0 * R * R * clamped / nd),
          4.0 * R * R * (clamped + std::log(3.0)) / nd};
}

StepTerms ComputeStepTerms(const std::vector<SymMatrix>& storage_blocks,
                           bool full_storage, const Partition& partition,
                           double max_sq_norm, double eta, double sigma2,
                           std::size_t d) {
  StepTerms t;
  if (full_storage) {
    const SymMatrix& full = storage_blocks.front();
    t.theta_c = theta_c(full, eta, sigma2);
    t.theta_c_partitioned = theta_c_partitioned(full, partition, eta, sigma2);
    t.scalar_var = full.trace();
  } else {
    t.theta_c = std::numeric_limits<double>::quiet_NaN();
    for (const auto& block : storage_blocks) {
      t.theta_c_partitioned += theta_c(block, eta, sigma2);
      t.scalar_var += block.trace();
    }
  }
  t.theta_v = theta_v(t.scalar_var, eta, sigma2, d);
  t.lemma2 = lemma2_term(t.scalar_var, eta, sigma2);
  t.lemma1 = theta_v(max_sq_norm, eta, sigma2, d);
  return t;
}

}  // namespace renyigen
