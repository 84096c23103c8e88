// Copyright 2026 The qsalab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "qsalab/model.hpp"

namespace qsalab {

/// Versioned JSON checkpoint:
/// {"version": 1, "model_kind", "config_hash", "seed", "architecture": {...},
///  "params": {name: {"shape": [...], "data": [...]}}}.
/// Complex arrays carry a trailing dimension of 2 (real, imaginary) and are
/// stored row-major.
struct Checkpoint {
    static constexpr int kVersion = 1;

    ModelParams params;
    std::string config_hash;
    std::uint64_t seed = 0;
};

[[nodiscard]] std::string checkpoint_to_json(const Checkpoint &checkpoint);

/// Throws ParseError for malformed or truncated text, UnsupportedVersionError
/// for another version, and ModelMismatchError when `expected` is given and
/// differs from the stored model kind.
[[nodiscard]] Checkpoint checkpoint_from_json(std::string_view text,
                                              std::optional<ModelKind> expected = std::nullopt);

void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path);
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path &path,
                                         std::optional<ModelKind> expected = std::nullopt);

} // namespace qsalab
