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

#ifndef RENYIGEN_BOUNDS_H_
#define RENYIGEN_BOUNDS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "renyigen/partition.h"
#include "renyigen/samples.h"
#include "renyigen/sym_matrix.h"

namespace renyigen {

// Statistics of one step's per-sample gradients.
struct GradientStats {
  std::size_t step = 0;
  std::vector<double> mean;
  SymMatrix cov;            // covariance of the batch-mean gradient
  double scalar_var = 0.0;  // trace(cov)
  double max_sq_norm = 0.0; // running max of |g_i|^2
};

// cov = sample_covariance(grads, scale_by_batch = true); max_sq_norm is the
// larger of prev_max_sq_norm and the largest squared per-sample norm.
GradientStats grad_stats(const SampleSet& grads, double prev_max_sq_norm,
                         std::size_t step = 0);

// Sample covariance restricted to the diagonal blocks of `blocks`. With
// WholePartition(d) this equals sample_covariance.
std::vector<SymMatrix> block_covariance(const SampleSet& vectors,
                                        const Partition& blocks,
                                        bool scale_by_batch);

// 1/2 log|eta^2 / sigma2 * cov + I|.
double theta_c(const SymMatrix& cov, double eta, double sigma2);

// d/2 log(eta^2 V / (d sigma2) + 1).
double theta_v(double scalar_var, double eta, double sigma2, std::size_t d);

// Sum of theta_c over the principal submatrices of `partition`.
double theta_c_partitioned(const SymMatrix& cov, const Partition& partition,
                           double eta, double sigma2);

// eta^2 V / (2 sigma2), the dimension-free variance baseline.
double lemma2_term(double scalar_var, double eta, double sigma2);

enum class BoundMode {
  kThm2Cov,          // theta_c(V_t)
  kThm2Partitioned,  // sum_i theta_c(V_t^i)
  kThetaV,           // theta_v(tr V_t)
  kLemma2Var,        // eta^2 tr V_t / (2 sigma2)
  kLemma1L,          // theta_v(L)
};

// Per-step term of the selected bound. kThm2Partitioned needs `partition`;
// kThm2Cov needs a populated covariance.
double step_bound_term(const GradientStats& stats, double eta, double sigma2,
                       BoundMode mode, const Partition* partition = nullptr);

// Sum over steps of step_bound_term.
double sgld_info_bound(std::span<const GradientStats> stats, double eta,
                       double sigma2, BoundMode mode,
                       const Partition* partition = nullptr);

struct SgdBound {
  double info_term = 0.0;
  double hessian_term = 0.0;  // 1/2 * T * virtual_sigma2 * trace(H)
};

SgdBound sgd_info_bound(std::span<const GradientStats> stats, double eta,
                        double virtual_sigma2, double hessian_trace,
                        BoundMode mode, const Partition* partition = nullptr);

// Half the range of the recorded batch losses.
double subgaussian_R(std::span<const double> batch_losses);

struct Thm1Bounds {
  double mean_bound = 0.0;           // sqrt(2 R^2 I / n)
  double second_moment_bound = 0.0;  // 4 R^2 (I + log 3) / n
};

// Negative information values are clamped to 0 first.
Thm1Bounds thm1_bounds(double info, double R, std::size_t n);

// Per-step bound terms from a covariance held either in full (storage is one
// block over [0, d)) or only as the blocks of `partition`.
struct StepTerms {
  double theta_c = 0.0;  // NaN when only blocks are stored
  double theta_c_partitioned = 0.0;
  double theta_v = 0.0;
  double lemma2 = 0.0;
  double lemma1 = 0.0;
  double scalar_var = 0.0;
};

StepTerms ComputeStepTerms(const std::vector<SymMatrix>& storage_blocks,
                           bool full_storage, const Partition& partition,
                           double max_sq_norm, double eta, double sigma2,
                           std::size_t d);

}  // namespace renyigen

#endif  // RENYIGEN_BOUNDS_H_
