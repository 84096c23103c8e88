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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsalab/ansatz.hpp"
#include "qsalab/classical_attention.hpp"
#include "qsalab/objectives.hpp"
#include "qsalab/qsa_engine.hpp"
#include "qsalab/sequence_data.hpp"

namespace qsalab {

enum class ModelKind { qsa, scsa, lcsa };

[[nodiscard]] std::string to_string(ModelKind kind);
[[nodiscard]] ModelKind model_kind_from_string(const std::string &text);

/// Sizes and structural switches that fix the parameter layout of a model.
struct ModelShape {
    ModelKind kind = ModelKind::qsa;
    int vocab_size = 0; ///< D
    int steps = 0;      ///< T
    int token_dim = 4;  ///< d
    int layers = 5;     ///< L, QSA only
    bool complex_valued = false;
    /// QSA: train the R layer on the step register. When false the ansatz is
    /// the real-valued variant (Rz angles pinned at zero, no R layer).
    bool phase_layer = true;
    int key_dim = 0; ///< S-CSA d_K; 0 means d
    int hidden = 0;  ///< S-CSA feed-forward width; 0 means 4d
    double gamma = 0.1;

    [[nodiscard]] int resolved_key_dim() const noexcept { return key_dim > 0 ? key_dim : token_dim; }
    [[nodiscard]] int resolved_hidden() const noexcept { return hidden > 0 ? hidden : 4 * token_dim; }
    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
    static ModelShape from_json(const nlohmann::json &j);
};

struct QsaCircuit {
    AnsatzParams v;
    AnsatzParams w;
    PhaseLayerParams r;
};

/// Full trainable state. Only the block matching `shape.kind` is populated.
struct ModelParams {
    ModelShape shape;
    EmbeddingMap embedding;
    QsaCircuit circuit;
    ScsaParams scsa;
    LcsaParams lcsa;

    void validate() const;
};

/// Seeded initialization: embedding entries uniform in [-1, 1], QSA angles
/// uniform in [-0.1, 0.1], S-CSA Glorot weights, L-CSA identity plus noise.
[[nodiscard]] ModelParams init_model(const ModelShape &shape, std::uint64_t seed);

enum class ParamGroup { circuit, embedding, weights };

[[nodiscard]] std::string to_string(ParamGroup group);

/// One trainable real coordinate.
struct ParamSlot {
    ParamGroup group = ParamGroup::weights;
    bool shift_rule = false; ///< enters only through a rotation gate
    int column = -1;         ///< embedding column (vocabulary entry), else -1
};

/// Trainable coordinates in a fixed order: embedding (when trainable), then
/// the model block. Complex entries contribute their real part and, for
/// complex models, their imaginary part.
[[nodiscard]] std::vector<ParamSlot> trainable_slots(const ModelParams &params,
                                                     bool embedding_trainable);
[[nodiscard]] std::vector<double> get_trainables(const ModelParams &params,
                                                 bool embedding_trainable);
void set_trainables(ModelParams &params, bool embedding_trainable, std::span<const double> values);

/// Dense matrices of V, W, R for the current angles.
struct CircuitMatrices {
    CMatrix v;
    CMatrix w;
    CMatrix r;
};

[[nodiscard]] CircuitMatrices circuit_matrices(const ModelParams &params);

/// The attention-circuit instance for one sequence w_1..w_{T+1}.
[[nodiscard]] QsaInstance make_qsa_instance(const ModelParams &params,
                                            std::span<const CVector> inputs);

/// Rényi-½ cross-entropy of one sequence. For QSA this is -log of the circuit
/// expectation; for the baselines it is computed from the per-step
/// probabilities of the true next datum.
[[nodiscard]] LossValue sequence_loss(const ModelParams &params, std::span<const CVector> inputs);

/// Per-step probabilities of the true next datum (normalized, in [0, 1]).
/// For QSA these are the post-selected branch probabilities.
[[nodiscard]] std::vector<double> step_probabilities(const ModelParams &params,
                                                     std::span<const CVector> inputs);

/// Vocabulary scores after each step j = 1..T. QSA and L-CSA score word ℓ by
/// the squared overlap of the normalized prediction with the normalized
/// embedded word E e_ℓ; S-CSA returns its softmax distribution. A vanishing
/// prediction yields all-zero scores for that step.
[[nodiscard]] std::vector<std::vector<double>> word_scores(const ModelParams &params,
                                                           std::span<const CVector> inputs);

} // namespace qsalab
