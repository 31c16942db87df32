// Copyright 2026 The connshift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Binary parameter files: a magic line, a JSON header describing the model
// and every tensor, then the tensor values as little-endian doubles in
// header order.

#ifndef CONNSHIFT_NN_CHECKPOINT_H_
#define CONNSHIFT_NN_CHECKPOINT_H_

#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "connshift/nn/tape.h"

namespace connshift::nn {

inline constexpr int kCheckpointVersion = 1;

// Writes `header` (augmented with "version" and "tensors") and the values
// of `params`. Throws IoError.
void SaveCheckpoint(const std::filesystem::path& path, nlohmann::json header,
                    std::span<const Parameter* const> params);

// Reads only the JSON header.
nlohmann::json ReadCheckpointHeader(const std::filesystem::path& path);

// Reads tensor values into `params`, which must match the stored names and
// shapes exactly. Returns the header. Throws IoError or DataError.
nlohmann::json LoadCheckpoint(const std::filesystem::path& path,
                              std::span<Parameter* const> params);

}  // namespace connshift::nn

#endif  // CONNSHIFT_NN_CHECKPOINT_H_
