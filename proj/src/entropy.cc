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

#include "renyigen/entropy.h"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "renyigen/error.h"

namespace renyigen {
namespace {

void CheckPaired(const SampleSet& a, const SampleSet& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "paired sample counts differ: " + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()));
  }
  if (a.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "information estimates need at least 2 samples");
  }
}

// Gram matrices of smooth kernels on low-dimensional samples are numerically
// low rank. From this size on, the spectrum is taken from a pivoted partial
// Cholesky factor K = L L^T + E, whose nonzero eigenvalues are those of the
// small matrix L^T L. Factoring stops once tr(E) is below kLowRankResidual.
constexpr std::size_t kLowRankMinSize = 256;
constexpr double kLowRankResidual = 1e-12;

// Returns nothing when the factor would exceed a quarter of the full rank; a
// full eigensolve is then cheaper.
std::optional<std::vector<double>> LowRankSpectrum(const SymMatrix& k) {
  const std::size_t m = k.dim();
  const std::size_t max_rank = m / 4;
  std::vector<double> residual(m);
  for (std::size_t i = 0; i < m; ++i) residual[i] = k(i, i);
  std::vector<bool> used(m, false);
  std::vector<std::vector<double>> columns;
  while (true) {
    double left = 0.0;
    std::size_t pivot = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i] || residual[i] <= 0.0) continue;
      left += residual[i];
      if (pivot == m || residual[i] > residual[pivot]) pivot = i;
    }
    if (pivot == m || left <= kLowRankResidual) break;
    if (columns.size() == max_rank) return std::nullopt;
    const double root = std::sqrt(residual[pivot]);
    std::vector<double> col(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      double v = k(pivot, i);
      for (const auto& c : columns) v -= c[i] * c[pivot];
      col[i] = v / root;
    }
    col[pivot] = root;
    used[pivot] = true;
    residual[pivot] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!used[i]) residual[i] -= col[i] * col[i];
    }
    columns.push_back(std::move(col));
  }
  const std::size_t r = columns.size();
  if (r == 0) return std::vector<double>{};
  SymMatrix small(r);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a; b < r; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < m; ++i) dot += columns[a][i] * columns[b][i];
      small.set(a, b, dot);
    }
  }
  return sym_eigenvalues(small);
}

}  // namespace

double raw_entropy(const GramMatrix& g) {
  if (g.is_constant()) return 0.0;
  if (g.m >= kLowRankMinSize) {
    if (auto spectrum = LowRankSpectrum(g.base)) {
      return vn_entropy_from_spectrum(std::move(*spectrum));
    }
  }
  return vn_entropy(g.base);
}

double gram_entropy(const GramMatrix& g, bool apply_normalizer) {
  const double raw = raw_entropy(g);
  return apply_normalizer ? std::exp(g.log_normalizer()) * raw : raw;
}

EntropyEstimate entropy_estimate(const SampleSet& samples,
                                 const KernelSpec& kernel,
                                 bool apply_normalizer) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "entropy estimate needs at least 2 samples");
  }
  const GramMatrix g = gram(samples, kernel);
  EntropyEstimate est;
  est.m = samples.size();
  est.log_normalizer_applied = apply_normalizer;
  est.value = gram_entropy(g, apply_normalizer);
  est.concentration_radius_at_95 = concentration_radius(
      est.m, 0.05, apply_normalizer ? std::exp(kernel.log_normalizer) : 1.0);
  return est;
}

double mi_estimate(const SampleSet& x, const SampleSet& y,
                   const KernelSpec& kx, const KernelSpec& ky,
                   bool apply_normalizer) {
  CheckPaired(x, y);
  const GramMatrix gx = gram(x, kx);
  const GramMatrix gy = gram(y, ky);
  const GramMatrix gxy = hadamard_joint(gx, gy);
  return gram_entropy(gx, apply_normalizer) +
         gram_entropy(gy, apply_normalizer) -
         gram_entropy(gxy, apply_normalizer);
}

double cond_mi_estimate(const SampleSet& x, const SampleSet& y,
                        const SampleSet& z, const TripleKernels& kernels,
                        bool apply_normalizer) {
  CheckPaired(x, y);
  CheckPaired(x, z);
  const GramMatrix gx = gram(x, kernels.x);
  const GramMatrix gy = gram(y, kernels.y);
  const GramMatrix gz = gram(z, kernels.z);
  const GramMatrix gxz = hadamard_joint(gx, gz);
  const GramMatrix gyz = hadamard_joint(gy, gz);
  const GramMatrix gxyz = hadamard_joint(gxz, gy);
  // Grouped so that a constant Y cancels exactly.
  return (gram_entropy(gxz, apply_normalizer) -
          gram_entropy(gxyz, apply_normalizer)) +
         (gram_entropy(gyz, apply_normalizer) -
          gram_entropy(gz, apply_normalizer));
}

double concentration_radius(std::size_t m, double delta, double c_kappa) {
  if (m < 1) throw Error(ErrorCode::kDomainError, "m must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kDomainError, "delta must lie in (0, 1)");
  }
  if (!(c_kappa > 0.0)) {
    throw Error(ErrorCode::kDomainError, "C must be positive");
  }
  return 9.0 * c_kappa * std::sqrt(2.0 * std::log(2.0 / delta)) /
         std::cbrt(static_cast<double>(m));
}

double gaussian_closed_form(const SymMatrix& cov, double sigma_kappa) {
  if (!(sigma_kappa >= 0.0)) {
    throw Error(ErrorCode::kDomainError, "kernel width must be nonnegative");
  }
  const auto lambda = sym_eigenvalues(cov);
  const double largest = lambda.front();
  const double smallest = lambda.back();
  if (!(smallest > 1e-12 * std::max(1.0, largest))) {
    throw Error(ErrorCode::kNotInvertible,
                "covariance is not positive definite");
  }
  const double d = static_cast<double>(cov.dim());
  double log_det = 0.0;
  double trace_inv = 0.0;
  for (double l : lambda) {
    log_det += std::log(l);
    trace_inv += 1.0 / l;
  }
  return 0.5 * d * std::log(2.0 * std::numbers::pi * std::numbers::e) +
         0.5 * log_det + 0.25 * sigma_kappa * sigma_kappa * trace_inv;
}

double quadrature_entropy_1d(const std::function<double(double)>& pdf,
                             const KernelSpec& kernel, Interval support,
                             std::size_t points) {
  if (kernel.input_dim != 1) {
    throw Error(ErrorCode::kInvalidInput, "quadrature is one-dimensional");
  }
  if (points < 2001 || points % 2 == 0) {
    throw Error(ErrorCode::kDomainError,
                "Simpson grid needs an odd node count of at least 2001");
  }
  if (!(support.hi > support.lo)) {
    throw Error(ErrorCode::kDomainError, "empty support interval");
  }
  const std::size_t n = points;
  const double h = (support.hi - support.lo) / static_cast<double>(n - 1);
  std::vector<double> x(n), w(n), p(n), log_p(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = support.lo + h * static_cast<double>(i);
    w[i] = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] *= h / 3.0;
    p[i] = pdf(x[i]);
    log_p[i] = std::log(p[i]);
    if (!std::isfinite(p[i]) || !std::isfinite(log_p[i])) {
      throw Error(ErrorCode::kQuadratureFailure,
                  "non-finite integrand at x = " + std::to_string(x[i]));
    }
  }
  double outer = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = x[i] - x[j];
      const double k = kernel.FromSquaredDistance(diff * diff);
      inner += w[i] * p[i] * k * k;
    }
    outer += w[j] * log_p[j] * inner;
  }
  const double result = -std::exp(kernel.log_normalizer) * outer;
  if (!std::isfinite(result)) {
    throw Error(ErrorCode::kQuadratureFailure, "integral is not finite");
  }
  return result;
}

}  // namespace renyigen
