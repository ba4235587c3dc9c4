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

#include "renyigen/sym_matrix.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "renyigen/error.h"

namespace renyigen {
namespace {

constexpr int kMaxSweeps = 100;
constexpr double kRelativeOffDiagonalTolerance = 1e-12;
constexpr double kNegativeEigenTolerance = 1e-6;

double OffDiagonalNorm(const std::vector<double>& a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum += a[i * n + j] * a[i * n + j];
  }
  return std::sqrt(2.0 * sum);
}

// Runs cyclic Jacobi sweeps on the full row-major buffer `a` in place. When
// `v` is non-null it accumulates the rotations (starting from identity).
int JacobiSweeps(std::vector<double>& a, std::size_t n,
                 std::vector<double>* v) {
  double norm = 0.0;
  for (double x : a) norm += x * x;
  norm = std::sqrt(norm);
  const double threshold = kRelativeOffDiagonalTolerance * norm;

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (OffDiagonalNorm(a, n) <= threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // Rows p and q mirror columns p and q, and rows are contiguous.
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a[p * n + k];
          const double akq = a[q * n + k];
          const double new_kp = c * akp - s * akq;
          const double new_kq = s * akp + c * akq;
          a[k * n + p] = new_kp;
          a[p * n + k] = new_kp;
          a[k * n + q] = new_kq;
          a[q * n + k] = new_kq;
        }
        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;

        if (v != nullptr) {
          // `v` holds the transpose while sweeping so columns are rows here.
          double* vp = v->data() + p * n;
          double* vq = v->data() + q * n;
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = vp[k];
            const double vkq = vq[k];
            vp[k] = c * vkp - s * vkq;
            vq[k] = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  if (v != nullptr) {
    auto& vv = *v;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) std::swap(vv[i * n + j], vv[j * n + i]);
    }
  }
  return sweep;
}

void CheckEigenInput(const SymMatrix& s) {
  if (s.dim() == 0) {
    throw Error(ErrorCode::kInvalidMatrix, "matrix has dimension 0");
  }
  if (!s.all_finite()) {
    throw Error(ErrorCode::kInvalidMatrix, "matrix has non-finite entries");
  }
}

}  // namespace

SymMatrix SymMatrix::FromUpper(std::size_t dim,
                               std::span<const double> values) {
  if (values.size() != dim * dim) {
    throw Error(ErrorCode::kInvalidMatrix,
                "expected " + std::to_string(dim * dim) + " values, got " +
                    std::to_string(values.size()));
  }
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) m.set(i, j, values[i * dim + j]);
  }
  return m;
}

SymMatrix SymMatrix::FromRows(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.size()) {
      throw Error(ErrorCode::kInvalidMatrix, "rows must form a square matrix");
    }
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return FromUpper(rows.size(), flat);
}

SymMatrix SymMatrix::Identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::Diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (double x : data_) sum += x * x;
  return std::sqrt(sum);
}

bool SymMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (other.dim_ != dim_) {
    throw Error(ErrorCode::kInvalidMatrix, "dimension mismatch in +=");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double factor) {
  for (double& x : data_) x *= factor;
  return *this;
}

EigenDecomp sym_eigen(const SymMatrix& s) {
  CheckEigenInput(s);
  const std::size_t n = s.dim();
  std::vector<double> a(s.values().begin(), s.values().end());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  const int sweeps = JacobiSweeps(a, n, &v);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x * n + x] > a[y * n + y];
  });

  EigenDecomp out;
  out.dim = n;
  out.sweeps = sweeps;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = a[src * n + src];
    for (std::size_t i = 0; i < n; ++i) {
      out.eigenvectors[i * n + k] = v[i * n + src];
    }
  }
  return out;
}

std::vector<double> sym_eigenvalues(const SymMatrix& s) {
  CheckEigenInput(s);
  const std::size_t n = s.dim();
  std::vector<double> a(s.values().begin(), s.values().end());
  JacobiSweeps(a, n, nullptr);
  std::vector<double> lambda(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = a[i * n + i];
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return lambda;
}

void ClampPsdSpectrum(std::vector<double>& eigenvalues) {
  if (eigenvalues.empty()) return;
  const double largest =
      *std::max_element(eigenvalues.begin(), eigenvalues.end());
  const double floor = -kNegativeEigenTolerance * std::max(1.0, largest);
  for (double& l : eigenvalues) {
    if (l < floor) {
      throw Error(ErrorCode::kNotPSD,
                  "eigenvalue " + std::to_string(l) + " below tolerance");
    }
    if (l < 0.0) l = 0.0;
  }
}

double vn_entropy_from_spectrum(std::vector<double> eigenvalues) {
  ClampPsdSpectrum(eigenvalues);
  double h = 0.0;
  for (double l : eigenvalues) {
    l = std::min(l, 1.0);
    if (l > 0.0) h -= l * std::log(l);
  }
  return h;
}

double vn_entropy(const SymMatrix& k) {
  const double tr = k.trace();
  if (!(std::abs(tr - 1.0) <= 1e-6)) {
    throw Error(ErrorCode::kNotTraceNormalized,
                "trace " + std::to_string(tr) + " is not 1");
  }
  return vn_entropy_from_spectrum(sym_eigenvalues(k));
}

double logdet_shifted(const SymMatrix& a, double c) {
  if (!(c >= 0.0)) {
    throw Error(ErrorCode::kDomainError, "shift scale must be nonnegative");
  }
  auto lambda = sym_eigenvalues(a);
  ClampPsdSpectrum(lambda);
  double sum = 0.0;
  for (double l : lambda) sum += std::log1p(c * l);
  return 0.5 * sum;
}

SymMatrix principal_submatrix(const SymMatrix& a,
                              std::span<const std::size_t> idx) {
  if (idx.empty()) {
    throw Error(ErrorCode::kInvalidPartition, "empty index set");
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= a.dim()) {
      throw Error(ErrorCode::kInvalidPartition,
                  "index " + std::to_string(idx[k]) + " out of range");
    }
    if (k > 0 && idx[k] <= idx[k - 1]) {
      throw Error(ErrorCode::kInvalidPartition,
                  "indices must be strictly increasing (duplicate or unsorted "
                  "at position " + std::to_string(k) + ")");
    }
  }
  SymMatrix sub(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i; j < idx.size(); ++j) {
      sub.set(i, j, a(idx[i], idx[j]));
    }
  }
  return sub;
}

SymMatrix sample_covariance(const SampleSet& vectors, bool scale_by_batch) {
  const std::size_t b = vectors.size();
  if (b < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "covariance needs at least 2 vectors, got " + std::to_string(b));
  }
  const std::size_t d = vectors.dim();
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < b; ++r) {
    const auto x = vectors[r];
    for (std::size_t i = 0; i < d; ++i) mean[i] += x[i];
  }
  for (double& m : mean) m /= static_cast<double>(b);

  std::vector<double> upper(d * d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t r = 0; r < b; ++r) {
    const auto x = vectors[r];
    for (std::size_t i = 0; i < d; ++i) centered[i] = x[i] - mean[i];
    for (std::size_t i = 0; i < d; ++i) {
      const double ci = centered[i];
      if (ci == 0.0) continue;
      double* row = upper.data() + i * d;
      for (std::size_t j = i; j < d; ++j) row[j] += ci * centered[j];
    }
  }
  double divisor = static_cast<double>(b - 1);
  if (scale_by_batch) divisor *= static_cast<double>(b);
  for (double& x : upper) x /= divisor;
  return SymMatrix::FromUpper(d, upper);
}

}  // namespace renyigen
