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

#ifndef RENYIGEN_HESSIAN_H_
#define RENYIGEN_HESSIAN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "renyigen/dataset.h"
#include "renyigen/mlp.h"

namespace renyigen {

// A scalar objective with its gradient, used for Hessian traces.
struct Objective {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
};

// Mean loss of `model`'s architecture over `data`, as a function of params.
Objective MakeObjective(const MlpModel& model, const Dataset& data,
                        LossSpec loss);

// Hutchinson estimate (1/probes) sum v^T H v with Rademacher v. Hv is a
// central difference of gradients with step 1e-4 * (1 + |w|).
double hessian_trace_hutchinson(const Objective& objective,
                                std::span<const double> w, int probes,
                                std::uint64_t seed);
double hessian_trace_hutchinson(const MlpModel& model, const Dataset& data,
                                LossSpec loss, int probes, std::uint64_t seed);

// Sum of second central differences along each coordinate, step
// 1e-4 * (1 + |w_i|). Refuses d > 2000 with TooLarge.
double hessian_trace_exact_fd(const Objective& objective,
                              std::span<const double> w);
double hessian_trace_exact_fd(const MlpModel& model, const Dataset& data,
                              LossSpec loss);

}  // namespace renyigen

#endif  // RENYIGEN_HESSIAN_H_
