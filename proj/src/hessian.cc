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

#include "renyigen/hessian.h"

#include <cmath>
#include <string>

#include "renyigen/error.h"
#include "renyigen/rng.h"

namespace renyigen {
namespace {

constexpr std::size_t kMaxExactDim = 2000;

double Norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

Objective MakeObjective(const MlpModel& model, const Dataset& data,
                        LossSpec loss) {
  return {
      [&model, &data, loss](std::span<const double> w) {
        return mean_loss_at(model, w, data, loss);
      },
      [&model, &data, loss](std::span<const double> w) {
        return mean_gradient_at(model, w, data, loss);
      },
  };
}

double hessian_trace_hutchinson(const Objective& objective,
                                std::span<const double> w, int probes,
                                std::uint64_t seed) {
  if (probes < 1) {
    throw Error(ErrorCode::kDomainError, "Hutchinson needs at least 1 probe");
  }
  const std::size_t d = w.size();
  // Small enough that a probe rarely moves a ReLU pre-activation across 0;
  // gradient differences stay accurate at this scale.
  const double h = 1e-6 * (1.0 + Norm(w));
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> v(d), plus(d), minus(d);
  double total = 0.0;
  for (int p = 0; p < probes; ++p) {
    for (std::size_t i = 0; i < d; ++i) {
      v[i] = coin(rng) ? 1.0 : -1.0;
      plus[i] = w[i] + h * v[i];
      minus[i] = w[i] - h * v[i];
    }
    const auto g_plus = objective.gradient(plus);
    const auto g_minus = objective.gradient(minus);
    double quad = 0.0;
    for (std::size_t i = 0; i < d; ++i) quad += v[i] * (g_plus[i] - g_minus[i]);
    total += quad / (2.0 * h);
  }
  return total / static_cast<double>(probes);
}

double hessian_trace_hutchinson(const MlpModel& model, const Dataset& data,
                                LossSpec loss, int probes, std::uint64_t seed) {
  return hessian_trace_hutchinson(MakeObjective(model, data, loss),
                                  model.params(), probes, seed);
}

double hessian_trace_exact_fd(const Objective& objective,
                              std::span<const double> w) {
  const std::size_t d = w.size();
  if (d > kMaxExactDim) {
    throw Error(ErrorCode::kTooLarge,
                "exact Hessian trace limited to d <= 2000, got " +
                    std::to_string(d));
  }
  std::vector<double> x(w.begin(), w.end());
  const double center = objective.value(x);
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double h = 1e-4 * (1.0 + std::abs(w[i]));
    x[i] = w[i] + h;
    const double up = objective.value(x);
    x[i] = w[i] - h;
    const double down = objective.value(x);
    x[i] = w[i];
    trace += (up - 2.0 * center + down) / (h * h);
  }
  return trace;
}

double hessian_trace_exact_fd(const MlpModel& model, const Dataset& data,
                              LossSpec loss) {
  return hessian_trace_exact_fd(MakeObjective(model, data, loss),
                                model.params());
}

}  // namespace renyigen
