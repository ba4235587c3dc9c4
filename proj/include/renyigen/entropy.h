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

#ifndef RENYIGEN_ENTROPY_H_
#define RENYIGEN_ENTROPY_H_

#include <cstddef>
#include <functional>

#include "renyigen/kernel.h"
#include "renyigen/samples.h"
#include "renyigen/sym_matrix.h"

namespace renyigen {

struct EntropyEstimate {
  double value = 0.0;  // nats
  std::size_t m = 0;
  bool log_normalizer_applied = false;
  double concentration_radius_at_95 = 0.0;
};

// -tr(K log K) of the Gram matrix, without C.
double raw_entropy(const GramMatrix& g);

// raw_entropy(g), times C when apply_normalizer is set.
double gram_entropy(const GramMatrix& g, bool apply_normalizer);

EntropyEstimate entropy_estimate(const SampleSet& samples,
                                 const KernelSpec& kernel,
                                 bool apply_normalizer);

// S(X) + S(Y) - S(X, Y) over paired samples.
double mi_estimate(const SampleSet& x, const SampleSet& y,
                   const KernelSpec& kx, const KernelSpec& ky,
                   bool apply_normalizer);

struct TripleKernels {
  KernelSpec x;
  KernelSpec y;
  KernelSpec z;
};

// I(X; Y | Z) = S(X, Z) + S(Y, Z) - S(Z) - S(X, Y, Z).
double cond_mi_estimate(const SampleSet& x, const SampleSet& y,
                        const SampleSet& z, const TripleKernels& kernels,
                        bool apply_normalizer = false);

// 9 C sqrt(2 log(2 / delta)) / m^(1/3): deviation bound of the finite-sample
// estimate, holding with probability 1 - delta.
double concentration_radius(std::size_t m, double delta, double c_kappa);

// Kernelized entropy of N(0, cov) under a Gaussian kernel of width
// sigma_kappa: d/2 log(2 pi e) + 1/2 log|cov| + sigma_kappa^2 / 4 tr(cov^-1).
double gaussian_closed_form(const SymMatrix& cov, double sigma_kappa);

struct Interval {
  double lo;
  double hi;
};

// -C * double integral of p(x) log p(x') kappa^2(x, x') over support^2 by
// composite Simpson on `points` nodes per axis (odd, at least 2001).
double quadrature_entropy_1d(const std::function<double(double)>& pdf,
                             const KernelSpec& kernel, Interval support,
                             std::size_t points = 2001);

}  // namespace renyigen

#endif  // RENYIGEN_ENTROPY_H_
