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

#include "qsalab/checkpoint.hpp"

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsalab/dataset_io.hpp"
#include "qsalab/errors.hpp"

namespace qsalab {

namespace {

using nlohmann::json;

json real_array(const std::vector<double> &values, std::vector<std::int64_t> shape)
{
    return {{"shape", std::move(shape)}, {"data", values}};
}

template <typename Derived>
json complex_array(const Eigen::MatrixBase<Derived> &m)
{
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()) * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            data.push_back(m(r, c).real());
            data.push_back(m(r, c).imag());
        }
    }
    if (m.cols() == 1) {
        return {{"shape", {m.rows(), 2}}, {"data", std::move(data)}};
    }
    return {{"shape", {m.rows(), m.cols(), 2}}, {"data", std::move(data)}};
}

struct Array {
    std::vector<std::int64_t> shape;
    std::vector<double> data;
};

Array read_array(const json &params, const std::string &name)
{
    if (!params.contains(name)) {
        throw ParseError("checkpoint lacks parameter '" + name + "'");
    }
    const json &entry = params.at(name);
    Array a;
    try {
        a.shape = entry.at("shape").get<std::vector<std::int64_t>>();
        a.data = entry.at("data").get<std::vector<double>>();
    } catch (const json::exception &e) {
        throw ParseError("parameter '" + name + "': " + e.what());
    }
    std::int64_t count = 1;
    for (std::int64_t s : a.shape) {
        if (s < 0) {
            throw ParseError("parameter '" + name + "' has a negative dimension");
        }
        count *= s;
    }
    if (count != static_cast<std::int64_t>(a.data.size())) {
        throw ParseError("parameter '" + name + "' has " + std::to_string(a.data.size()) +
                         " values for its shape");
    }
    return a;
}

CMatrix read_complex_matrix(const json &params, const std::string &name)
{
    const Array a = read_array(params, name);
    if (a.shape.size() != 3 || a.shape[2] != 2) {
        throw ParseError("parameter '" + name + "' is not a complex matrix");
    }
    CMatrix m(a.shape[0], a.shape[1]);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c, k += 2) {
            m(r, c) = Complex{a.data[k], a.data[k + 1]};
        }
    }
    return m;
}

CVector read_complex_vector(const json &params, const std::string &name)
{
    const Array a = read_array(params, name);
    if (a.shape.size() != 2 || a.shape[1] != 2) {
        throw ParseError("parameter '" + name + "' is not a complex vector");
    }
    CVector v(a.shape[0]);
    for (Eigen::Index r = 0; r < v.size(); ++r) {
        v[r] = Complex{a.data[static_cast<std::size_t>(2 * r)],
                       a.data[static_cast<std::size_t>(2 * r + 1)]};
    }
    return v;
}

AnsatzParams read_ansatz(const json &params, const std::string &name)
{
    const Array a = read_array(params, name);
    if (a.shape.size() != 3 || a.shape[2] != 2 || a.shape[0] < 1) {
        throw ParseError("parameter '" + name + "' is not an ansatz angle array");
    }
    AnsatzParams p;
    p.num_layers = static_cast<int>(a.shape[0] - 1);
    p.num_qubits = static_cast<int>(a.shape[1]);
    p.angles = a.data;
    return p;
}

} // namespace

std::string checkpoint_to_json(const Checkpoint &checkpoint)
{
    const ModelParams &p = checkpoint.params;
    p.validate();
    json params = json::object();
    params["embedding.matrix"] = complex_array(p.embedding.matrix);
    CMatrix shifts(p.embedding.positions(), p.embedding.token_dim());
    for (int i = 0; i < p.embedding.positions(); ++i) {
        shifts.row(i) = p.embedding.shifts[static_cast<std::size_t>(i)].transpose();
    }
    params["embedding.shifts"] = complex_array(shifts);
    params["embedding.gamma"] = real_array({p.embedding.gamma}, {1});
    switch (p.shape.kind) {
    case ModelKind::qsa:
        for (const auto &[name, a] : {std::pair{"circuit.v", &p.circuit.v}, std::pair{"circuit.w", &p.circuit.w}}) {
            params[name] = real_array(a->angles, {a->num_layers + 1, a->num_qubits, 2});
        }
        params["circuit.r"] = real_array(p.circuit.r.angles,
                                         {static_cast<std::int64_t>(p.circuit.r.angles.size())});
        break;
    case ModelKind::scsa:
        params["scsa.query"] = complex_array(p.scsa.query);
        params["scsa.key"] = complex_array(p.scsa.key);
        params["scsa.value"] = complex_array(p.scsa.value);
        params["scsa.ffn_in"] = complex_array(p.scsa.ffn_in);
        params["scsa.ffn_in_bias"] = complex_array(p.scsa.ffn_in_bias);
        params["scsa.ffn_out"] = complex_array(p.scsa.ffn_out);
        params["scsa.ffn_out_bias"] = complex_array(p.scsa.ffn_out_bias);
        params["scsa.anti_embed"] = complex_array(p.scsa.anti_embed);
        params["scsa.key_dim"] = real_array({static_cast<double>(p.scsa.key_dim)}, {1});
        break;
    case ModelKind::lcsa:
        params["lcsa.value_map"] = complex_array(p.lcsa.value_map);
        params["lcsa.affinity_map"] = complex_array(p.lcsa.affinity_map);
        break;
    }
    json doc = {{"version", Checkpoint::kVersion},
                {"model_kind", to_string(p.shape.kind)},
                {"config_hash", checkpoint.config_hash},
                {"seed", checkpoint.seed},
                {"architecture", p.shape.to_json()},
                {"params", std::move(params)}};
    return doc.dump() + "\n";
}

Checkpoint checkpoint_from_json(std::string_view text, std::optional<ModelKind> expected)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("checkpoint: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("version") || !doc.at("version").is_number_integer()) {
        throw ParseError("checkpoint has no integer version field");
    }
    const int version = doc.at("version").get<int>();
    if (version != Checkpoint::kVersion) {
        throw UnsupportedVersionError("checkpoint version " + std::to_string(version) +
                                      " is not supported");
    }

    Checkpoint cp;
    ModelKind kind{};
    try {
        kind = model_kind_from_string(doc.at("model_kind").get<std::string>());
        cp.config_hash = doc.at("config_hash").get<std::string>();
        cp.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const json::exception &e) {
        throw ParseError(std::string("checkpoint: ") + e.what());
    } catch (const ConfigurationError &e) {
        throw ParseError(std::string("checkpoint: ") + e.what());
    }
    if (expected && *expected != kind) {
        throw ModelMismatchError("checkpoint holds a " + to_string(kind) + " model, expected " +
                                 to_string(*expected));
    }
    if (!doc.contains("architecture") || !doc.contains("params") || !doc.at("params").is_object()) {
        throw ParseError("checkpoint lacks architecture or params");
    }
    ModelParams &p = cp.params;
    p.shape = ModelShape::from_json(doc.at("architecture"));
    if (p.shape.kind != kind) {
        throw ParseError("checkpoint architecture disagrees with model_kind");
    }
    const json &params = doc.at("params");
    p.embedding.matrix = read_complex_matrix(params, "embedding.matrix");
    const CMatrix shifts = read_complex_matrix(params, "embedding.shifts");
    for (Eigen::Index i = 0; i < shifts.rows(); ++i) {
        p.embedding.shifts.push_back(shifts.row(i).transpose());
    }
    const Array gamma = read_array(params, "embedding.gamma");
    if (gamma.data.size() != 1) {
        throw ParseError("embedding.gamma must hold one value");
    }
    p.embedding.gamma = gamma.data[0];

    switch (kind) {
    case ModelKind::qsa: {
        p.circuit.v = read_ansatz(params, "circuit.v");
        p.circuit.w = read_ansatz(params, "circuit.w");
        p.circuit.r.angles = read_array(params, "circuit.r").data;
        break;
    }
    case ModelKind::scsa: {
        p.scsa.query = read_complex_matrix(params, "scsa.query");
        p.scsa.key = read_complex_matrix(params, "scsa.key");
        p.scsa.value = read_complex_matrix(params, "scsa.value");
        p.scsa.ffn_in = read_complex_matrix(params, "scsa.ffn_in");
        p.scsa.ffn_in_bias = read_complex_vector(params, "scsa.ffn_in_bias");
        p.scsa.ffn_out = read_complex_matrix(params, "scsa.ffn_out");
        p.scsa.ffn_out_bias = read_complex_vector(params, "scsa.ffn_out_bias");
        p.scsa.anti_embed = read_complex_matrix(params, "scsa.anti_embed");
        const Array key_dim = read_array(params, "scsa.key_dim");
        if (key_dim.data.size() != 1) {
            throw ParseError("scsa.key_dim must hold one value");
        }
        p.scsa.key_dim = static_cast<int>(key_dim.data[0]);
        break;
    }
    case ModelKind::lcsa:
        p.lcsa.value_map = read_complex_matrix(params, "lcsa.value_map");
        p.lcsa.affinity_map = read_complex_matrix(params, "lcsa.affinity_map");
        break;
    }
    try {
        p.validate();
    } catch (const ConfigurationError &e) {
        throw ParseError(std::string("checkpoint parameters are inconsistent: ") + e.what());
    }
    return cp;
}

void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path)
{
    write_file_atomically(path, checkpoint_to_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path &path, std::optional<ModelKind> expected)
{
    return checkpoint_from_json(read_text_file(path), expected);
}

} // namespace qsalab
