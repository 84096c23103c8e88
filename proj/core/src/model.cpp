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

#include "qsalab/model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "qsalab/encodings.hpp"
#include "qsalab/errors.hpp"

namespace qsalab {

namespace {

template <typename C>
auto *complex_parts(C &z)
{
    if constexpr (std::is_const_v<C>) {
        return reinterpret_cast<const double *>(&z);
    } else {
        return reinterpret_cast<double *>(&z);
    }
}

// Calls f(value, slot) for every trainable coordinate in the canonical order.
template <typename Params, typename F>
void visit_trainables(Params &params, bool embedding_trainable, F &&f)
{
    const bool cplx = params.shape.complex_valued;
    auto visit_matrix = [&](auto &m, ParamGroup group, bool record_column) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                auto *parts = complex_parts(m(r, c));
                const ParamSlot slot{group, false, record_column ? static_cast<int>(c) : -1};
                f(parts[0], slot);
                if (cplx) {
                    f(parts[1], slot);
                }
            }
        }
    };

    if (embedding_trainable) {
        visit_matrix(params.embedding.matrix, ParamGroup::embedding, true);
    }
    switch (params.shape.kind) {
    case ModelKind::qsa: {
        const ParamSlot slot{ParamGroup::circuit, true, -1};
        for (auto *ansatz : {&params.circuit.v, &params.circuit.w}) {
            for (std::size_t k = 0; k < ansatz->angles.size(); ++k) {
                if (params.shape.phase_layer || k % 2 == 0) {
                    f(ansatz->angles[k], slot);
                }
            }
        }
        if (params.shape.phase_layer) {
            for (auto &alpha : params.circuit.r.angles) {
                f(alpha, slot);
            }
        }
        break;
    }
    case ModelKind::scsa:
        visit_matrix(params.scsa.query, ParamGroup::weights, false);
        visit_matrix(params.scsa.key, ParamGroup::weights, false);
        visit_matrix(params.scsa.value, ParamGroup::weights, false);
        visit_matrix(params.scsa.ffn_in, ParamGroup::weights, false);
        visit_matrix(params.scsa.ffn_in_bias, ParamGroup::weights, false);
        visit_matrix(params.scsa.ffn_out, ParamGroup::weights, false);
        visit_matrix(params.scsa.ffn_out_bias, ParamGroup::weights, false);
        visit_matrix(params.scsa.anti_embed, ParamGroup::weights, false);
        break;
    case ModelKind::lcsa:
        visit_matrix(params.lcsa.value_map, ParamGroup::weights, false);
        visit_matrix(params.lcsa.affinity_map, ParamGroup::weights, false);
        break;
    }
}

std::vector<double> normalized_scores(const CMatrix &embedding, const CVector &prediction)
{
    std::vector<double> out(static_cast<std::size_t>(embedding.cols()), 0.0);
    const double pn = prediction.norm();
    if (!(pn > 1e-12)) {
        return out;
    }
    for (Eigen::Index l = 0; l < embedding.cols(); ++l) {
        const double cn = embedding.col(l).norm();
        out[static_cast<std::size_t>(l)] =
            std::norm(embedding.col(l).dot(prediction)) / (cn * cn * pn * pn);
    }
    return out;
}

void check_inputs(const ModelParams &params, std::span<const CVector> inputs)
{
    if (static_cast<int>(inputs.size()) != params.shape.steps + 1) {
        throw ConfigurationError("sequence has " + std::to_string(inputs.size()) +
                                 " entries, model expects T + 1 = " +
                                 std::to_string(params.shape.steps + 1));
    }
}

LossValue renyi_half_of(std::vector<double> probabilities)
{
    // Overflowing weights surface as a NaN loss for the trainer to report,
    // not as a malformed-input error.
    for (double p : probabilities) {
        if (!std::isfinite(p)) {
            return {std::numeric_limits<double>::quiet_NaN(), false};
        }
    }
    return renyi_alpha_loss(StepProbabilities::normalized(std::move(probabilities)), 0.5);
}

std::vector<double> lcsa_probabilities(const ModelParams &params, std::span<const CVector> inputs)
{
    const EmbeddedSequence seq = embed_sequence(inputs, params.embedding);
    const auto tokens = std::span<const CVector>(seq.tokens).first(inputs.size() - 1);
    const auto targets = std::span<const CVector>(seq.shifted).subspan(1);
    std::vector<double> out;
    for (int j = 1; j <= params.shape.steps; ++j) {
        try {
            out.push_back(lcsa_step_probability(tokens, targets, params.lcsa, j));
        } catch (const DegeneratePredictionError &) {
            out.push_back(0.0);
        }
    }
    return out;
}

} // namespace

std::string to_string(ModelKind kind)
{
    switch (kind) {
    case ModelKind::qsa:
        return "qsa";
    case ModelKind::scsa:
        return "scsa";
    case ModelKind::lcsa:
        return "lcsa";
    }
    return "qsa";
}

ModelKind model_kind_from_string(const std::string &text)
{
    if (text == "qsa") {
        return ModelKind::qsa;
    }
    if (text == "scsa") {
        return ModelKind::scsa;
    }
    if (text == "lcsa") {
        return ModelKind::lcsa;
    }
    throw ConfigurationError("unknown model kind '" + text + "'");
}

std::string to_string(ParamGroup group)
{
    switch (group) {
    case ParamGroup::circuit:
        return "circuit";
    case ParamGroup::embedding:
        return "embedding";
    case ParamGroup::weights:
        return "weights";
    }
    return "weights";
}

void ModelShape::validate() const
{
    if (vocab_size < 2) {
        throw ConfigurationError("vocabulary size must be at least 2");
    }
    if (steps < 2) {
        throw ConfigurationError("T must be at least 2");
    }
    if (token_dim < 1 || token_dim >= vocab_size) {
        throw ConfigurationError("token dimension d must satisfy 1 <= d < D");
    }
    if (kind == ModelKind::qsa) {
        if (exact_log2(token_dim) < 1 || exact_log2(steps) < 1) {
            throw ConfigurationError("QSA needs d and T to be powers of two, at least 2");
        }
        if (layers < 0) {
            throw ConfigurationError("layer count must be non-negative");
        }
    }
    if (key_dim < 0 || hidden < 0) {
        throw ConfigurationError("key_dim and hidden must be non-negative");
    }
    if (!std::isfinite(gamma)) {
        throw ConfigurationError("gamma must be finite");
    }
}

nlohmann::json ModelShape::to_json() const
{
    return {{"kind", to_string(kind)},     {"vocab_size", vocab_size},
            {"steps", steps},              {"token_dim", token_dim},
            {"layers", layers},            {"complex_valued", complex_valued},
            {"phase_layer", phase_layer},  {"key_dim", key_dim},
            {"hidden", hidden},            {"gamma", gamma}};
}

ModelShape ModelShape::from_json(const nlohmann::json &j)
{
    try {
        ModelShape s;
        s.kind = model_kind_from_string(j.at("kind").get<std::string>());
        s.vocab_size = j.at("vocab_size").get<int>();
        s.steps = j.at("steps").get<int>();
        s.token_dim = j.at("token_dim").get<int>();
        s.layers = j.at("layers").get<int>();
        s.complex_valued = j.at("complex_valued").get<bool>();
        s.phase_layer = j.at("phase_layer").get<bool>();
        s.key_dim = j.at("key_dim").get<int>();
        s.hidden = j.at("hidden").get<int>();
        s.gamma = j.at("gamma").get<double>();
        s.validate();
        return s;
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("model shape: ") + e.what());
    }
}

void ModelParams::validate() const
{
    shape.validate();
    embedding.validate();
    if (embedding.token_dim() != shape.token_dim || embedding.vocab_size() != shape.vocab_size ||
        embedding.positions() < shape.steps + 1) {
        throw ConfigurationError("embedding does not match the model shape");
    }
    switch (shape.kind) {
    case ModelKind::qsa: {
        const int n = exact_log2(shape.token_dim);
        circuit.v.validate();
        circuit.w.validate();
        circuit.r.validate();
        if (circuit.v.num_qubits != n || circuit.w.num_qubits != n ||
            static_cast<int>(circuit.r.angles.size()) != exact_log2(shape.steps)) {
            throw ConfigurationError("circuit parameters do not match the model shape");
        }
        break;
    }
    case ModelKind::scsa:
        scsa.validate();
        if (scsa.token_dim() != shape.token_dim || scsa.vocab_size() != shape.vocab_size) {
            throw ConfigurationError("S-CSA weights do not match the model shape");
        }
        break;
    case ModelKind::lcsa:
        lcsa.validate();
        if (lcsa.value_map.rows() != shape.token_dim) {
            throw ConfigurationError("L-CSA weights do not match the model shape");
        }
        break;
    }
}

ModelParams init_model(const ModelShape &shape, std::uint64_t seed)
{
    shape.validate();
    std::mt19937_64 rng(seed);
    ModelParams p;
    p.shape = shape;
    p.embedding = EmbeddingMap::random(shape.token_dim, shape.vocab_size, shape.steps + 1,
                                       shape.complex_valued, shape.gamma, rng);
    switch (shape.kind) {
    case ModelKind::qsa: {
        const int n = exact_log2(shape.token_dim);
        p.circuit.v = AnsatzParams::random(n, shape.layers, rng);
        p.circuit.w = AnsatzParams::random(n, shape.layers, rng);
        p.circuit.r = PhaseLayerParams::zeros(exact_log2(shape.steps));
        std::uniform_real_distribution<double> dist(-0.1, 0.1);
        for (double &alpha : p.circuit.r.angles) {
            alpha = dist(rng);
        }
        if (!shape.phase_layer) {
            for (auto *ansatz : {&p.circuit.v, &p.circuit.w}) {
                for (std::size_t k = 1; k < ansatz->angles.size(); k += 2) {
                    ansatz->angles[k] = 0.0;
                }
            }
            std::fill(p.circuit.r.angles.begin(), p.circuit.r.angles.end(), 0.0);
        }
        break;
    }
    case ModelKind::scsa:
        p.scsa = ScsaParams::random(shape.token_dim, shape.vocab_size, shape.resolved_key_dim(),
                                    shape.resolved_hidden(), shape.complex_valued, rng);
        break;
    case ModelKind::lcsa:
        p.lcsa = LcsaParams::random(shape.token_dim, shape.complex_valued, rng);
        break;
    }
    p.validate();
    return p;
}

std::vector<ParamSlot> trainable_slots(const ModelParams &params, bool embedding_trainable)
{
    std::vector<ParamSlot> out;
    visit_trainables(params, embedding_trainable,
                     [&](const double &, const ParamSlot &slot) { out.push_back(slot); });
    return out;
}

std::vector<double> get_trainables(const ModelParams &params, bool embedding_trainable)
{
    std::vector<double> out;
    visit_trainables(params, embedding_trainable,
                     [&](const double &x, const ParamSlot &) { out.push_back(x); });
    return out;
}

void set_trainables(ModelParams &params, bool embedding_trainable, std::span<const double> values)
{
    std::size_t k = 0;
    visit_trainables(params, embedding_trainable, [&](double &x, const ParamSlot &) {
        if (k >= values.size()) {
            throw ConfigurationError("too few trainable values");
        }
        x = values[k++];
    });
    if (k != values.size()) {
        throw ConfigurationError("too many trainable values");
    }
}

CircuitMatrices circuit_matrices(const ModelParams &params)
{
    return {ansatz_matrix(params.circuit.v), ansatz_matrix(params.circuit.w),
            phase_layer_matrix(params.circuit.r)};
}

QsaInstance make_qsa_instance(const ModelParams &params, std::span<const CVector> inputs)
{
    check_inputs(params, inputs);
    const EmbeddedSequence seq = embed_sequence(inputs, params.embedding);
    const int n = exact_log2(params.shape.token_dim);
    QsaInstance inst;
    inst.layout = RegisterLayout::for_sizes(params.shape.token_dim, params.shape.steps);
    for (const CVector &x : seq.tokens) {
        inst.tokens.push_back(amplitude_encode(x, n));
    }
    for (std::size_t i = 1; i < seq.shifted.size(); ++i) {
        inst.shifted_targets.push_back(amplitude_encode(seq.shifted[i], n));
    }
    inst.params_v = params.circuit.v;
    inst.params_w = params.circuit.w;
    inst.params_r = params.circuit.r;
    return inst;
}

LossValue sequence_loss(const ModelParams &params, std::span<const CVector> inputs)
{
    check_inputs(params, inputs);
    switch (params.shape.kind) {
    case ModelKind::qsa:
        return qsa_renyi_half_loss(make_qsa_instance(params, inputs));
    case ModelKind::scsa:
        return renyi_half_of(scsa_forward(inputs, params.embedding, params.scsa));
    case ModelKind::lcsa:
        return renyi_half_of(lcsa_probabilities(params, inputs));
    }
    return {};
}

std::vector<double> step_probabilities(const ModelParams &params, std::span<const CVector> inputs)
{
    check_inputs(params, inputs);
    switch (params.shape.kind) {
    case ModelKind::qsa:
        return postselected_branch_probabilities(make_qsa_instance(params, inputs));
    case ModelKind::scsa:
        return scsa_forward(inputs, params.embedding, params.scsa);
    case ModelKind::lcsa:
        return lcsa_probabilities(params, inputs);
    }
    return {};
}

std::vector<std::vector<double>> word_scores(const ModelParams &params,
                                             std::span<const CVector> inputs)
{
    check_inputs(params, inputs);
    std::vector<std::vector<double>> out;
    const int T = params.shape.steps;
    switch (params.shape.kind) {
    case ModelKind::qsa: {
        const QsaInstance inst = make_qsa_instance(params, inputs);
        for (int j = 1; j <= T; ++j) {
            try {
                const TokenPrediction pred = predict_token_state(inst, j);
                out.push_back(normalized_scores(params.embedding.matrix, pred.state.to_vector()));
            } catch (const DegeneratePredictionError &) {
                out.emplace_back(static_cast<std::size_t>(params.shape.vocab_size), 0.0);
            }
        }
        break;
    }
    case ModelKind::scsa: {
        const EmbeddedSequence seq = embed_sequence(inputs, params.embedding);
        const auto tokens = std::span<const CVector>(seq.tokens).first(inputs.size() - 1);
        for (int j = 1; j <= T; ++j) {
            out.push_back(scsa_step_distribution(tokens, params.scsa, j));
        }
        break;
    }
    case ModelKind::lcsa: {
        const EmbeddedSequence seq = embed_sequence(inputs, params.embedding);
        const auto tokens = std::span<const CVector>(seq.tokens).first(inputs.size() - 1);
        for (int j = 1; j <= T; ++j) {
            out.push_back(normalized_scores(params.embedding.matrix,
                                            linear_attention_layer(tokens, params.lcsa, j)));
        }
        break;
    }
    }
    return out;
}

} // namespace qsalab
