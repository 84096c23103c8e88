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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qsalab::cli {

/// Lower-case hex SHA-256 of a file's bytes.
[[nodiscard]] std::string sha256_file(const std::filesystem::path &path);

/// Record of one command invocation, written next to its outputs once the
/// outputs are in place.
struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;
    double wall_seconds = 0.0;

    /// Digests are computed from the files as they are on disk now.
    [[nodiscard]] nlohmann::json to_json() const;
    void write(const std::filesystem::path &path) const;
};

} // namespace qsalab::cli
