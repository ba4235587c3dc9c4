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

#ifndef RENYIGEN_KERNEL_H_
#define RENYIGEN_KERNEL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "renyigen/samples.h"
#include "renyigen/sym_matrix.h"

namespace renyigen {

enum class KernelFamily { kGaussian, kBox };

// A normalized, shift-invariant kernel (kappa(x, x) = 1) together with the
// log of the constant C that makes C * kappa^2 integrate to one.
struct KernelSpec {
  KernelFamily family = KernelFamily::kGaussian;
  double width = 1.0;  // Gaussian sigma, or box radius.
  std::size_t input_dim = 1;
  double log_normalizer = 0.0;

  // kappa(x, x') = exp(-|x - x'|^2 / (2 width^2)); log C = -(d/2) log(pi w^2).
  static KernelSpec Gaussian(double width, std::size_t input_dim);
  // kappa(x, x') = 1 if |x - x'| < radius; log C = -log(ball volume).
  static KernelSpec Box(double radius, std::size_t input_dim);

  double FromSquaredDistance(double squared_distance) const;
  double operator()(std::span<const double> x, std::span<const double> y) const;
};

// Pairwise kernel matrix of m samples. `kernel_values` holds kappa(x_i, x_j)
// with unit diagonal and `base` holds kappa / m, which is trace one.
struct GramMatrix {
  SymMatrix kernel_values;
  SymMatrix base;
  std::size_t m = 0;
  // Factor kernels; a joint Gram built by hadamard_joint lists every factor.
  std::vector<KernelSpec> kernels;

  double log_normalizer() const;
  // True when every kernel value equals 1 exactly (all samples coincide under
  // the kernel). The spectrum is then {1, 0, ..., 0}.
  bool is_constant() const;
};

// Mean of the largest `quantile` fraction of pairwise Euclidean distances.
double select_width(const SampleSet& samples, double quantile = 0.15);

// Gaussian kernel over the samples' dimension with width from select_width.
KernelSpec AutoGaussianKernel(const SampleSet& samples, double quantile = 0.15);

GramMatrix gram(const SampleSet& samples, const KernelSpec& kernel);

// Gram matrix of the product kernel kappa_a * kappa_b over paired samples.
GramMatrix hadamard_joint(const GramMatrix& a, const GramMatrix& b);

}  // namespace renyigen

#endif  // RENYIGEN_KERNEL_H_
