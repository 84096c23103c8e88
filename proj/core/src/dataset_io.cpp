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

#include "qsalab/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "qsalab/errors.hpp"

namespace qsalab {

namespace {

using nlohmann::json;

json header_json(const SequenceDataset &ds)
{
    json h;
    h["kind"] = to_string(ds.kind);
    h["D"] = ds.vocab_size;
    h["T"] = ds.steps;
    h["seed"] = ds.seed;
    h["generator"] = ds.generator;
    return h;
}

template <typename T>
T field(const json &object, const char *key, std::size_t line)
{
    if (!object.is_object() || !object.contains(key)) {
        throw ParseError("line " + std::to_string(line) + ": missing field '" + key + "'");
    }
    try {
        return object.at(key).get<T>();
    } catch (const json::exception &e) {
        throw ParseError("line " + std::to_string(line) + ": field '" + key + "': " + e.what());
    }
}

CVector parse_amplitudes(const json &step, std::size_t line)
{
    if (!step.is_array()) {
        throw ParseError("line " + std::to_string(line) + ": step is not an array");
    }
    CVector out(static_cast<Eigen::Index>(step.size()));
    for (std::size_t k = 0; k < step.size(); ++k) {
        const json &pair = step[k];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw ParseError("line " + std::to_string(line) + ": amplitude must be [re, im]");
        }
        out[static_cast<Eigen::Index>(k)] = Complex{pair[0].get<double>(), pair[1].get<double>()};
    }
    return out;
}

} // namespace

std::string dataset_to_jsonl(const SequenceDataset &dataset)
{
    dataset.validate();
    std::string out = header_json(dataset).dump();
    out += '\n';
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        json rec;
        rec["id"] = dataset.ids[r];
        if (dataset.kind == DatasetKind::classical) {
            rec["words"] = dataset.words[r];
        } else {
            json steps = json::array();
            for (const CVector &v : dataset.amplitudes[r]) {
                json step = json::array();
                for (Eigen::Index k = 0; k < v.size(); ++k) {
                    step.push_back(json::array({v[k].real(), v[k].imag()}));
                }
                steps.push_back(std::move(step));
            }
            rec["steps"] = std::move(steps);
        }
        out += rec.dump();
        out += '\n';
    }
    return out;
}

SequenceDataset dataset_from_jsonl(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    SequenceDataset ds;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json value;
        try {
            value = json::parse(line);
        } catch (const json::parse_error &e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!have_header) {
            ds.kind = dataset_kind_from_string(field<std::string>(value, "kind", line_no));
            ds.vocab_size = field<int>(value, "D", line_no);
            ds.steps = field<int>(value, "T", line_no);
            ds.seed = field<std::uint64_t>(value, "seed", line_no);
            ds.generator = value.value("generator", json::object());
            have_header = true;
            continue;
        }
        ds.ids.push_back(field<std::int64_t>(value, "id", line_no));
        if (ds.kind == DatasetKind::classical) {
            ds.words.push_back(field<std::vector<int>>(value, "words", line_no));
        } else {
            const json steps = field<json>(value, "steps", line_no);
            if (!steps.is_array()) {
                throw ParseError("line " + std::to_string(line_no) + ": steps is not an array");
            }
            std::vector<CVector> record;
            for (const json &step : steps) {
                record.push_back(parse_amplitudes(step, line_no));
            }
            ds.amplitudes.push_back(std::move(record));
        }
    }
    if (!have_header) {
        throw ParseError("dataset has no header line");
    }
    ds.validate();
    return ds;
}

void save_dataset(const SequenceDataset &dataset, const std::filesystem::path &path)
{
    write_file_atomically(path, dataset_to_jsonl(dataset));
}

SequenceDataset load_dataset(const std::filesystem::path &path)
{
    return dataset_from_jsonl(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigurationError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file_atomically(const std::filesystem::path &path, std::string_view contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigurationError("cannot write '" + tmp.string() + "'");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw ConfigurationError("short write to '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ConfigurationError("cannot move output into place at '" + path.string() + "'");
    }
}

} // namespace qsalab
