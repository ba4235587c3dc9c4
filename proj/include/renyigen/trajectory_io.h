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

#ifndef RENYIGEN_TRAJECTORY_IO_H_
#define RENYIGEN_TRAJECTORY_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "renyigen/trainer.h"

namespace renyigen {

// Binary trajectory layout. All integers are u64 and all reals f64, both
// little-endian; a "vector" is a u64 count followed by its elements.
//
//   magic      8 bytes "RGTRAJ\0\1" (last byte is the format version)
//   header     u64 byte length, then:
//                algorithm, eta, sigma2, epochs, batch_size, seed,
//                record_every, loss kind, bias flag,
//                layer_sizes (vector of u64), has_auxiliary flag,
//                virtual_sigma2, aux_seed,
//                initial_params, final_params, train_loss, test_loss,
//                final_aux_offset (vectors of f64)
//   steps      u64 count, then per step a u64 byte length followed by:
//                step, epoch, batch (vector of u64), batch_loss,
//                params_before, params_after,
//                grads (u64 rows, u64 cols, rows*cols f64),
//                noise, aux_noise, aux_offset
//
// Decoding errors are FormatError naming the byte offset.
std::vector<std::uint8_t> EncodeTrajectory(const Trajectory& trajectory);
Trajectory DecodeTrajectory(std::span<const std::uint8_t> bytes);

// Writes `path` and a JSON sidecar `path` + ".json" holding the config.
// IoError when a file cannot be written.
void WriteTrajectory(const Trajectory& trajectory,
                     const std::filesystem::path& path);
Trajectory ReadTrajectory(const std::filesystem::path& path);

nlohmann::json TrainConfigToJson(const TrainConfig& config);
// Missing keys keep the values already in `config`.
void TrainConfigFromJson(const nlohmann::json& j, TrainConfig& config);
nlohmann::json TrajectorySidecar(const Trajectory& trajectory);

}  // namespace renyigen

#endif  // RENYIGEN_TRAJECTORY_IO_H_
