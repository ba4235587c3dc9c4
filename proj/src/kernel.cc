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

#include "renyigen/kernel.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "renyigen/error.h"

namespace renyigen {
namespace {

double SquaredDistance(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    sum += diff * diff;
  }
  return sum;
}

void CheckWidth(double width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw Error(ErrorCode::kDomainError,
                "kernel width must be positive and finite");
  }
}

}  // namespace

KernelSpec KernelSpec::Gaussian(double width, std::size_t input_dim) {
  CheckWidth(width);
  const double d = static_cast<double>(input_dim);
  return {KernelFamily::kGaussian, width, input_dim,
          -0.5 * d * std::log(std::numbers::pi * width * width)};
}

KernelSpec KernelSpec::Box(double radius, std::size_t input_dim) {
  CheckWidth(radius);
  const double d = static_cast<double>(input_dim);
  const double log_volume = 0.5 * d * std::log(std::numbers::pi) -
                            std::lgamma(0.5 * d + 1.0) + d * std::log(radius);
  return {KernelFamily::kBox, radius, input_dim, -log_volume};
}

double KernelSpec::FromSquaredDistance(double squared_distance) const {
  if (family == KernelFamily::kGaussian) {
    return std::exp(-squared_distance / (2.0 * width * width));
  }
  return squared_distance < width * width ? 1.0 : 0.0;
}

double KernelSpec::operator()(std::span<const double> x,
                              std::span<const double> y) const {
  return FromSquaredDistance(SquaredDistance(x, y));
}

double GramMatrix::log_normalizer() const {
  double sum = 0.0;
  for (const auto& k : kernels) sum += k.log_normalizer;
  return sum;
}

bool GramMatrix::is_constant() const {
  const auto v = kernel_values.values();
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 1.0; });
}

double select_width(const SampleSet& samples, double quantile) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "width selection needs at least 2 samples");
  }
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw Error(ErrorCode::kDomainError, "quantile must lie in (0, 1)");
  }
  const std::size_t m = samples.size();
  std::vector<double> distances;
  distances.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      distances.push_back(std::sqrt(SquaredDistance(samples[i], samples[j])));
    }
  }
  const std::size_t n = distances.size();
  const auto top = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(quantile * n - 1e-9)));
  const auto cut = distances.begin() + static_cast<std::ptrdiff_t>(n - top);
  std::nth_element(distances.begin(), cut, distances.end());
  std::sort(cut, distances.end());
  double sum = 0.0;
  for (auto it = cut; it != distances.end(); ++it) sum += *it;
  const double width = sum / static_cast<double>(top);
  if (!(width > 0.0)) {
    throw Error(ErrorCode::kDegenerateSamples, "all pairwise distances are 0");
  }
  return width;
}

KernelSpec AutoGaussianKernel(const SampleSet& samples, double quantile) {
  return KernelSpec::Gaussian(select_width(samples, quantile), samples.dim());
}

GramMatrix gram(const SampleSet& samples, const KernelSpec& kernel) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidInput, "Gram matrix of zero samples");
  }
  if (samples.dim() != kernel.input_dim) {
    throw Error(ErrorCode::kInvalidInput,
                "sample dimension " + std::to_string(samples.dim()) +
                    " does not match kernel dimension " +
                    std::to_string(kernel.input_dim));
  }
  const std::size_t m = samples.size();
  const double inv_m = 1.0 / static_cast<double>(m);
  GramMatrix g{SymMatrix(m), SymMatrix(m), m, {kernel}};
  for (std::size_t i = 0; i < m; ++i) {
    g.kernel_values.set(i, i, 1.0);
    g.base.set(i, i, inv_m);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double k = kernel(samples[i], samples[j]);
      g.kernel_values.set(i, j, k);
      g.base.set(i, j, k * inv_m);
    }
  }
  return g;
}

GramMatrix hadamard_joint(const GramMatrix& a, const GramMatrix& b) {
  if (a.m != b.m) {
    throw Error(ErrorCode::kInvalidInput,
                "joint Gram of " + std::to_string(a.m) + " and " +
                    std::to_string(b.m) + " samples");
  }
  const std::size_t m = a.m;
  const double inv_m = 1.0 / static_cast<double>(m);
  GramMatrix g{SymMatrix(m), SymMatrix(m), m, a.kernels};
  g.kernels.insert(g.kernels.end(), b.kernels.begin(), b.kernels.end());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double k = a.kernel_values(i, j) * b.kernel_values(i, j);
      g.kernel_values.set(i, j, k);
      g.base.set(i, j, k * inv_m);
    }
  }
  return g;
}

}  // namespace renyigen
