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
#include <string_view>

#include "qsalab/sequence_data.hpp"

namespace qsalab {

/// JSON Lines form of a dataset: a header line
/// {"kind","D","T","seed","generator"} followed by one record per line,
/// {"id","words"} for classical data or {"id","steps":[[[re,im],...],...]}
/// for quantum data. Doubles are written in shortest round-trip form, so
/// reading the text back reproduces every amplitude bit for bit.
[[nodiscard]] std::string dataset_to_jsonl(const SequenceDataset &dataset);

/// Throws ParseError on malformed or truncated input and ConfigurationError
/// when the records disagree with the header.
[[nodiscard]] SequenceDataset dataset_from_jsonl(std::string_view text);

void save_dataset(const SequenceDataset &dataset, const std::filesystem::path &path);
[[nodiscard]] SequenceDataset load_dataset(const std::filesystem::path &path);

[[nodiscard]] std::string read_text_file(const std::filesystem::path &path);

/// Writes `contents` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
void write_file_atomically(const std::filesystem::path &path, std::string_view contents);

} // namespace qsalab
