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

#include "qsalab/classical_attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsalab/errors.hpp"
#include "qsalab/sequence_data.hpp"

namespace qsalab {

namespace {

constexpr double kPredictionNormFloor = 1e-12;

void check_step(std::size_t count, int step)
{
    if (step < 1 || static_cast<std::size_t>(step) > count) {
        throw ConfigurationError("attention step " + std::to_string(step) + " outside [1, " +
                                 std::to_string(count) + "]");
    }
}

void fill_uniform(CMatrix &m, double bound, bool complex_valued, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const double re = dist(rng);
            const double im = complex_valued ? dist(rng) : 0.0;
            m(r, c) = Complex{re, im};
        }
    }
}

CMatrix glorot(Eigen::Index rows, Eigen::Index cols, bool complex_valued, std::mt19937_64 &rng)
{
    CMatrix m(rows, cols);
    fill_uniform(m, std::sqrt(6.0 / static_cast<double>(rows + cols)), complex_valued, rng);
    return m;
}

std::vector<double> softmax(const std::vector<double> &scores)
{
    const double top = *std::max_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - top);
        total += out[i];
    }
    for (double &p : out) {
        p /= total;
    }
    return out;
}

Complex split_relu(Complex z)
{
    return {std::max(z.real(), 0.0), std::max(z.imag(), 0.0)};
}

} // namespace

ScsaParams ScsaParams::random(int d, int vocab, int key_dim, int hidden, bool complex_valued,
                              std::mt19937_64 &rng)
{
    if (d < 1 || vocab < 1 || key_dim < 1 || hidden < 1) {
        throw ConfigurationError("S-CSA dimensions must be positive");
    }
    ScsaParams p;
    p.key_dim = key_dim;
    p.query = glorot(key_dim, d, complex_valued, rng);
    p.key = glorot(key_dim, d, complex_valued, rng);
    p.value = glorot(d, d, complex_valued, rng);
    p.ffn_in = glorot(hidden, d, complex_valued, rng);
    p.ffn_in_bias = CVector::Zero(hidden);
    p.ffn_out = glorot(d, hidden, complex_valued, rng);
    p.ffn_out_bias = CVector::Zero(d);
    p.anti_embed = glorot(vocab, d, complex_valued, rng);
    return p;
}

void ScsaParams::validate() const
{
    const Eigen::Index d = value.rows();
    const Eigen::Index h = ffn_in.rows();
    const bool ok = d >= 1 && h >= 1 && key_dim >= 1 && value.cols() == d &&
                    query.rows() == key_dim && query.cols() == d && key.rows() == key_dim &&
                    key.cols() == d && ffn_in.cols() == d && ffn_in_bias.size() == h &&
                    ffn_out.rows() == d && ffn_out.cols() == h && ffn_out_bias.size() == d &&
                    anti_embed.cols() == d && anti_embed.rows() >= 1;
    if (!ok) {
        throw ConfigurationError("inconsistent S-CSA parameter shapes");
    }
}

LcsaParams LcsaParams::identity(int d)
{
    return {CMatrix::Identity(d, d), CMatrix::Identity(d, d)};
}

LcsaParams LcsaParams::random(int d, bool complex_valued, std::mt19937_64 &rng, double scale)
{
    LcsaParams p = identity(d);
    CMatrix noise(d, d);
    fill_uniform(noise, scale, complex_valued, rng);
    p.value_map += noise;
    fill_uniform(noise, scale, complex_valued, rng);
    p.affinity_map += noise;
    return p;
}

void LcsaParams::validate() const
{
    const Eigen::Index d = value_map.rows();
    if (d < 1 || value_map.cols() != d || affinity_map.rows() != d || affinity_map.cols() != d) {
        throw ConfigurationError("L-CSA maps must be square and of equal size");
    }
}

std::vector<double> softmax_attention_weights(std::span<const CVector> tokens,
                                              const ScsaParams &params, int step)
{
    check_step(tokens.size(), step);
    const CVector q = params.query * tokens[static_cast<std::size_t>(step - 1)];
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.key_dim));
    std::vector<double> scores(static_cast<std::size_t>(step));
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = q.dot(params.key * tokens[i]).real() * scale;
    }
    return softmax(scores);
}

CVector softmax_attention_layer(std::span<const CVector> tokens, const ScsaParams &params,
                                int step)
{
    const std::vector<double> weights = softmax_attention_weights(tokens, params, step);
    CVector z = CVector::Zero(params.value.rows());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        z += weights[i] * (params.value * tokens[i]);
    }
    return z;
}

std::vector<double> scsa_step_distribution(std::span<const CVector> tokens,
                                           const ScsaParams &params, int step)
{
    const CVector residual =
        softmax_attention_layer(tokens, params, step) + tokens[static_cast<std::size_t>(step - 1)];
    const CVector hidden = (params.ffn_in * residual + params.ffn_in_bias).unaryExpr(&split_relu);
    const CVector out = params.ffn_out * hidden + params.ffn_out_bias;
    const CVector logits = params.anti_embed * out;
    std::vector<double> scores(static_cast<std::size_t>(logits.size()));
    for (Eigen::Index l = 0; l < logits.size(); ++l) {
        scores[static_cast<std::size_t>(l)] = logits[l].real();
    }
    return softmax(scores);
}

std::vector<double> scsa_forward(std::span<const CVector> tokens,
                                 std::span<const CVector> next_inputs, const ScsaParams &params)
{
    params.validate();
    if (next_inputs.size() > tokens.size()) {
        throw ConfigurationError("more next inputs than tokens");
    }
    std::vector<double> out;
    out.reserve(next_inputs.size());
    for (std::size_t j = 0; j < next_inputs.size(); ++j) {
        const std::vector<double> dist = scsa_step_distribution(tokens, params, static_cast<int>(j + 1));
        const CVector &w = next_inputs[j];
        if (w.size() != static_cast<Eigen::Index>(dist.size())) {
            throw ConfigurationError("next input dimension does not match the vocabulary");
        }
        const double mass = w.squaredNorm();
        if (!(mass > 0.0)) {
            throw DegenerateInputError("next input has zero norm");
        }
        double overlap = 0.0;
        for (std::size_t l = 0; l < dist.size(); ++l) {
            overlap += std::sqrt(dist[l] * std::norm(w[static_cast<Eigen::Index>(l)]) / mass);
        }
        out.push_back(overlap * overlap);
    }
    return out;
}

std::vector<double> scsa_forward(std::span<const CVector> inputs, const EmbeddingMap &embedding,
                                 const ScsaParams &params)
{
    const EmbeddedSequence seq = embed_sequence(inputs, embedding);
    return scsa_forward(std::span<const CVector>(seq.tokens).first(inputs.size() - 1),
                        inputs.subspan(1), params);
}

CVector linear_attention_layer(std::span<const CVector> tokens, const LcsaParams &params,
                               int step)
{
    check_step(tokens.size(), step);
    const CVector &current = tokens[static_cast<std::size_t>(step - 1)];
    const CVector query = params.affinity_map.adjoint() * current; // (x_j^† W)^†
    CVector z = CVector::Zero(params.value_map.rows());
    for (std::size_t i = 0; i < static_cast<std::size_t>(step); ++i) {
        z += query.dot(tokens[i]) * (params.value_map * tokens[i]);
    }
    return z;
}

double lcsa_step_probability(std::span<const CVector> tokens,
                             std::span<const CVector> shifted_targets, const LcsaParams &params,
                             int step)
{
    check_step(shifted_targets.size(), step);
    const CVector z = linear_attention_layer(tokens, params, step);
    const CVector &target = shifted_targets[static_cast<std::size_t>(step - 1)];
    const double z_norm = z.norm();
    const double t_norm = target.norm();
    if (!(z_norm > kPredictionNormFloor)) {
        throw DegeneratePredictionError("linear attention output vanishes at step " +
                                        std::to_string(step));
    }
    if (!(t_norm > kPredictionNormFloor)) {
        throw DegenerateInputError("zero target vector at step " + std::to_string(step));
    }
    return std::norm(target.dot(z)) / (z_norm * z_norm * t_norm * t_norm);
}

std::vector<double> lcsa_forward(std::span<const CVector> tokens,
                                 std::span<const CVector> shifted_targets,
                                 const LcsaParams &params)
{
    params.validate();
    std::vector<double> out;
    out.reserve(shifted_targets.size());
    for (std::size_t j = 1; j <= shifted_targets.size(); ++j) {
        out.push_back(lcsa_step_probability(tokens, shifted_targets, params, static_cast<int>(j)));
    }
    return out;
}

} // namespace qsalab
