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

#ifndef RENYIGEN_SYM_MATRIX_H_
#define RENYIGEN_SYM_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

#include "renyigen/samples.h"

namespace renyigen {

// Dense symmetric matrix. Writes go through set(), which mirrors the value, so
// entries(i, j) == entries(j, i) holds bit-for-bit at all times.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  // Builds from a row-major dim*dim buffer. Only the upper triangle is read.
  static SymMatrix FromUpper(std::size_t dim, std::span<const double> values);
  static SymMatrix FromRows(const std::vector<std::vector<double>>& rows);
  static SymMatrix Identity(std::size_t dim);
  static SymMatrix Diagonal(std::span<const double> diag);

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * dim_ + j];
  }
  void set(std::size_t i, std::size_t j, double value) {
    data_[i * dim_ + j] = value;
    data_[j * dim_ + i] = value;
  }
  void add(std::size_t i, std::size_t j, double value) {
    data_[i * dim_ + j] += value;
    if (i != j) data_[j * dim_ + i] += value;
  }

  // Row-major view of the full (mirrored) storage.
  std::span<const double> values() const { return data_; }

  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator*=(double factor);

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct EigenDecomp {
  std::vector<double> eigenvalues;  // descending
  // Column k (eigenvectors[i * dim + k]) pairs with eigenvalues[k].
  std::vector<double> eigenvectors;
  std::size_t dim = 0;
  int sweeps = 0;
};

// Cyclic Jacobi eigensolver. Stops once the off-diagonal Frobenius norm drops
// to 1e-12 * ||S||_F, or after 100 sweeps.
EigenDecomp sym_eigen(const SymMatrix& s);

// Same rotations as sym_eigen without accumulating eigenvectors.
std::vector<double> sym_eigenvalues(const SymMatrix& s);

// Applies the PSD clamping policy to a descending spectrum in place: values in
// [-1e-6 * max(1, lambda_max), 0) become 0; anything lower throws NotPSD.
void ClampPsdSpectrum(std::vector<double>& eigenvalues);

// Von Neumann entropy -sum(l log l) of a trace-one PSD matrix, in nats.
double vn_entropy(const SymMatrix& k);
double vn_entropy_from_spectrum(std::vector<double> eigenvalues);

// 1/2 * sum(log(1 + c * lambda_i(a))), eigenvalues clamped at 0.
double logdet_shifted(const SymMatrix& a, double c);

// idx must be strictly increasing and within [0, dim).
SymMatrix principal_submatrix(const SymMatrix& a,
                              std::span<const std::size_t> idx);

// Unbiased sample covariance (divisor b - 1). With scale_by_batch the result
// is further divided by b, i.e. the covariance of the mean of b draws.
SymMatrix sample_covariance(const SampleSet& vectors, bool scale_by_batch);

}  // namespace renyigen

#endif  // RENYIGEN_SYM_MATRIX_H_
