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

#include "qsalab/qsa_engine.hpp"

#include <cmath>
#include <string>

#include "qsalab/errors.hpp"

namespace qsalab {

namespace {

constexpr double kPredictionWeightFloor = 1e-12;

const QsaInstance &validated(const QsaInstance &instance)
{
    instance.validate();
    return instance;
}

void check_tokens(const std::vector<EncodedToken> &tokens, int n, const char *what)
{
    for (const EncodedToken &token : tokens) {
        if (token.state.num_qubits() != n) {
            throw ConfigurationError(std::string(what) + " are not encoded on n qubits");
        }
    }
}

ControlledBlocks projection_blocks(const std::vector<EncodedToken> &tokens, std::int64_t T,
                                   QubitRange targets)
{
    ControlledBlocks blocks;
    for (std::int64_t c = 0; c < T; ++c) {
        const CMatrix u = complete_unitary(tokens[static_cast<std::size_t>(c)].state.to_vector());
        blocks.emplace(static_cast<std::uint64_t>(c), UnitaryBlock(u.adjoint(), targets.indices()));
    }
    return blocks;
}

} // namespace

void QsaInstance::validate() const
{
    const std::int64_t T = steps();
    if (layout.n < 1 || layout.t < 1) {
        throw ConfigurationError("instance layout needs n >= 1 and t >= 1");
    }
    if (static_cast<std::int64_t>(tokens.size()) != T + 1) {
        throw ConfigurationError("instance needs T + 1 = " + std::to_string(T + 1) +
                                 " tokens, got " + std::to_string(tokens.size()));
    }
    if (static_cast<std::int64_t>(shifted_targets.size()) != T) {
        throw ConfigurationError("instance needs T = " + std::to_string(T) +
                                 " shifted targets, got " + std::to_string(shifted_targets.size()));
    }
    check_tokens(tokens, layout.n, "tokens");
    check_tokens(shifted_targets, layout.n, "shifted targets");
    params_v.validate();
    params_w.validate();
    params_r.validate();
    if (params_v.num_qubits != layout.n || params_w.num_qubits != layout.n) {
        throw ConfigurationError("ansatz width does not match the token register");
    }
    if (static_cast<int>(params_r.angles.size()) != layout.t) {
        throw ConfigurationError("phase layer needs one angle per step qubit");
    }
}

PreparedCircuit::PreparedCircuit(const QsaInstance &instance, BlockTally *tally)
    : layout_(validated(instance).layout),
      input_(prepare_input_superposition(instance.tokens, instance.steps(), instance.layout, tally))
{
    const std::int64_t T = instance.steps();
    target_projections_ = projection_blocks(instance.shifted_targets, T, layout_.a());
    token_projections_ = projection_blocks(instance.tokens, T, layout_.b());
}

StateVector PreparedCircuit::inference_state(const CMatrix &v, const CMatrix &w) const
{
    StateVector state = apply_unitary(input_, UnitaryBlock(v, layout_.a().indices()));
    state = apply_unitary(state, UnitaryBlock(w, layout_.b().indices()));
    return apply_controlled_by_register(state, layout_.c(), token_projections_);
}

StateVector PreparedCircuit::projected_state(const CMatrix &v, const CMatrix &w,
                                             BlockTally *tally) const
{
    StateVector state = apply_unitary(input_, UnitaryBlock(v, layout_.a().indices()), tally);
    state = apply_unitary(state, UnitaryBlock(w, layout_.b().indices()), tally);
    state = apply_controlled_by_register(state, layout_.c(), target_projections_, tally);
    return apply_controlled_by_register(state, layout_.c(), token_projections_, tally);
}

StateVector PreparedCircuit::final_state(const CMatrix &v, const CMatrix &w, const CMatrix &r,
                                         BlockTally *tally) const
{
    StateVector state = projected_state(v, w, tally);
    state = apply_unitary(state, UnitaryBlock(r, layout_.c().indices()), tally);
    const UnitaryBlock h(hadamard(), {0});
    for (int q : layout_.c().indices()) {
        state = apply_unitary(state, h.retargeted({q}), tally);
    }
    return state;
}

double PreparedCircuit::expectation(const CMatrix &v, const CMatrix &w, const CMatrix &r,
                                    BlockTally *tally) const
{
    return all_zeros_expectation(final_state(v, w, r, tally));
}

double circuit_expectation(const QsaInstance &instance, BlockTally *tally)
{
    const PreparedCircuit prepared(instance, tally);
    return prepared.expectation(ansatz_matrix(instance.params_v), ansatz_matrix(instance.params_w),
                                phase_layer_matrix(instance.params_r), tally);
}

BranchTerms branch_terms(const QsaInstance &instance)
{
    instance.validate();
    const std::int64_t T = instance.steps();
    const CMatrix v = ansatz_matrix(instance.params_v);
    const CMatrix w = ansatz_matrix(instance.params_w);

    std::vector<CVector> x(instance.tokens.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = instance.tokens[i].state.to_vector();
    }

    BranchTerms terms;
    for (std::int64_t j = 1; j <= T; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const CVector target = instance.shifted_targets[ju - 1].state.to_vector();
        Complex a{0.0, 0.0};
        for (std::size_t i = 0; i < ju; ++i) {
            a += target.dot(v * x[i]) * x[ju - 1].dot(w * x[i]);
        }
        // ||Σ_i x_i ⊗ x_i||^2 = Σ_{i,i'} <x_i|x_i'>^2
        Complex m{0.0, 0.0};
        for (std::size_t i = 0; i < ju; ++i) {
            for (std::size_t k = 0; k < ju; ++k) {
                const Complex g = x[i].dot(x[k]);
                m += g * g;
            }
        }
        double phase = 0.0;
        for (std::size_t k = 0; k < instance.params_r.angles.size(); ++k) {
            const double half = instance.params_r.angles[k] / 2;
            phase += (((j - 1) >> k) & 1) ? half : -half;
        }
        terms.amplitudes.push_back(a);
        terms.prefix_norms.push_back(m.real());
        terms.phases.push_back(phase);
    }
    return terms;
}

double analytic_expectation(const QsaInstance &instance)
{
    const BranchTerms terms = branch_terms(instance);
    const auto T = static_cast<double>(instance.steps());
    Complex sum{0.0, 0.0};
    for (std::size_t j = 0; j < terms.amplitudes.size(); ++j) {
        sum += std::polar(1.0, terms.phases[j]) * terms.amplitudes[j] /
               std::sqrt(terms.prefix_norms[j]);
    }
    return std::norm(sum / T);
}

LossValue qsa_loss(const QsaInstance &instance)
{
    return renyi_half_from_expectation(circuit_expectation(instance), instance.steps());
}

LossValue qsa_renyi_half_loss(const QsaInstance &instance)
{
    const double T = static_cast<double>(instance.steps());
    const double expectation = circuit_expectation(instance);
    if (std::isnan(expectation)) {
        return {expectation, false};
    }
    return renyi_half_from_expectation(T * expectation, instance.steps());
}

TokenPrediction predict_token_state(const QsaInstance &instance, int step)
{
    const std::int64_t T = instance.steps();
    if (step < 1 || step > T) {
        throw ConfigurationError("prediction step " + std::to_string(step) + " outside [1, T]");
    }
    const PreparedCircuit prepared(instance);
    const StateVector state = prepared.inference_state(ansatz_matrix(instance.params_v),
                                                       ansatz_matrix(instance.params_w));
    const RegisterLayout &layout = instance.layout;
    const std::uint64_t d = static_cast<std::uint64_t>(layout.token_dim());
    const std::uint64_t branch = static_cast<std::uint64_t>(step - 1) << layout.c().first;

    CVector a(static_cast<Eigen::Index>(d));
    for (std::uint64_t k = 0; k < d; ++k) {
        a[static_cast<Eigen::Index>(k)] = state[branch | k]; // B = |0>
    }
    // The branch carries 1/√T from the input superposition and 1/√M_j from
    // the prefix normalization.
    const PrefixEncoding prefix = entangled_prefix_encoding(instance.tokens, step);
    const double weight = a.norm() * std::sqrt(static_cast<double>(T) * prefix.squared_norm);
    if (!(weight > kPredictionWeightFloor)) {
        throw DegeneratePredictionError("prediction branch " + std::to_string(step) +
                                        " has zero weight");
    }
    return TokenPrediction{StateVector::from_vector(a / a.norm()), weight};
}

std::vector<double> postselected_branch_probabilities(const QsaInstance &instance)
{
    const PreparedCircuit prepared(instance);
    const StateVector state = prepared.projected_state(ansatz_matrix(instance.params_v),
                                                       ansatz_matrix(instance.params_w));
    const RegisterLayout &layout = instance.layout;
    const std::uint64_t d = static_cast<std::uint64_t>(layout.token_dim());
    std::vector<double> out;
    for (std::int64_t c = 0; c < instance.steps(); ++c) {
        const std::uint64_t branch = static_cast<std::uint64_t>(c) << layout.c().first;
        double b_success = 0.0;
        for (std::uint64_t k = 0; k < d; ++k) {
            b_success += std::norm(state[branch | k]);
        }
        if (!(b_success > 0.0)) {
            throw DegeneratePredictionError("branch " + std::to_string(c + 1) +
                                            " never passes the B projection");
        }
        out.push_back(std::norm(state[branch]) / b_success);
    }
    return out;
}

} // namespace qsalab
