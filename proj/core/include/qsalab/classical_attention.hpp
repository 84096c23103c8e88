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

#include <random>
#include <span>
#include <vector>

#include "qsalab/types.hpp"

namespace qsalab {

struct EmbeddingMap;

/// Weights of the standard softmax self-attention baseline: one attention
/// layer, residual, one-hidden-layer feed-forward network with split ReLU,
/// anti-embedding F and a softmax over the vocabulary.
///
/// Everything is stored as complex matrices. For real data the imaginary
/// parts stay zero and the layer reduces to the ordinary real transformer
/// block; for complex data query-key scores use Re(q^† k) and the ReLU is
/// applied to real and imaginary parts separately.
struct ScsaParams {
    CMatrix query;        ///< key_dim x d
    CMatrix key;          ///< key_dim x d
    CMatrix value;        ///< d x d
    CMatrix ffn_in;       ///< h x d
    CVector ffn_in_bias;  ///< h
    CMatrix ffn_out;      ///< d x h
    CVector ffn_out_bias; ///< d
    CMatrix anti_embed;   ///< D x d
    int key_dim = 0;

    /// Glorot-uniform weights, zero biases.
    static ScsaParams random(int d, int vocab, int key_dim, int hidden, bool complex_valued,
                             std::mt19937_64 &rng);

    [[nodiscard]] int token_dim() const noexcept { return static_cast<int>(value.rows()); }
    [[nodiscard]] int vocab_size() const noexcept { return static_cast<int>(anti_embed.rows()); }
    void validate() const;
};

/// Value map V and bilinear affinity W of the linearized attention layer.
struct LcsaParams {
    CMatrix value_map;
    CMatrix affinity_map;

    static LcsaParams identity(int d);
    /// Identity plus uniform noise in [-scale, scale] (real, or real and imaginary parts).
    static LcsaParams random(int d, bool complex_valued, std::mt19937_64 &rng, double scale = 0.1);
    void validate() const;
};

/// z_j = Σ_{i<=j} softmax_i(Re(q_j^† k_i) / √d_K) v_i, with 1 <= step <= tokens.size().
[[nodiscard]] CVector softmax_attention_layer(std::span<const CVector> tokens,
                                              const ScsaParams &params, int step);

/// Softmax attention weights used by softmax_attention_layer (length `step`).
[[nodiscard]] std::vector<double> softmax_attention_weights(std::span<const CVector> tokens,
                                                            const ScsaParams &params, int step);

/// Vocabulary distribution predicted after step j: attention, residual +x_j,
/// feed-forward, anti-embedding, softmax.
[[nodiscard]] std::vector<double> scsa_step_distribution(std::span<const CVector> tokens,
                                                         const ScsaParams &params, int step);

/// Probability of the true next datum for j = 1..T given tokens x_1..x_T and
/// next inputs w_2..w_{T+1}. The score is the classical fidelity
/// (Σ_ℓ √(P_ℓ |w_ℓ|²))², which is P_ℓ for a one-hot w = e_ℓ.
[[nodiscard]] std::vector<double> scsa_forward(std::span<const CVector> tokens,
                                               std::span<const CVector> next_inputs,
                                               const ScsaParams &params);

/// Embeds `inputs` (w_1..w_{T+1}) with `embedding` and runs scsa_forward.
[[nodiscard]] std::vector<double> scsa_forward(std::span<const CVector> inputs,
                                               const EmbeddingMap &embedding,
                                               const ScsaParams &params);

/// z̃_j = Σ_{i<=j} (x_j^† W x_i) V x_i, unnormalized.
[[nodiscard]] CVector linear_attention_layer(std::span<const CVector> tokens,
                                             const LcsaParams &params, int step);

/// |<x̃_{j+1}|z̃_j>|² / (||x̃_{j+1}||² ||z̃_j||²); `shifted_targets[step - 1]` is x̃_{j+1}.
/// Throws DegeneratePredictionError when z̃_j vanishes.
[[nodiscard]] double lcsa_step_probability(std::span<const CVector> tokens,
                                           std::span<const CVector> shifted_targets,
                                           const LcsaParams &params, int step);

/// lcsa_step_probability for every step 1..shifted_targets.size().
[[nodiscard]] std::vector<double> lcsa_forward(std::span<const CVector> tokens,
                                               std::span<const CVector> shifted_targets,
                                               const LcsaParams &params);

} // namespace qsalab
