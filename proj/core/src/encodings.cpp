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

#include "qsalab/encodings.hpp"

#include <cmath>
#include <string>

#include "qsalab/errors.hpp"

namespace qsalab {

EncodedToken amplitude_encode(const CVector &x, int num_qubits)
{
    if (num_qubits < 0 || x.size() != (Eigen::Index{1} << num_qubits)) {
        throw ConfigurationError("vector of dimension " + std::to_string(x.size()) +
                                 " cannot be encoded on " + std::to_string(num_qubits) +
                                 " qubits");
    }
    const double norm = x.norm();
    if (!(norm > kEncodingNormFloor)) {
        throw DegenerateInputError("cannot amplitude-encode a vector of norm " +
                                   std::to_string(norm));
    }
    CVector unit = x / norm;
    return EncodedToken{x, StateVector::from_vector(unit), norm};
}

CMatrix complete_unitary(const CVector &first_column)
{
    const Eigen::Index dim = first_column.size();
    CMatrix u(dim, dim);
    u.col(0) = first_column;
    Eigen::Index filled = 1;
    for (Eigen::Index e = 0; e < dim && filled < dim; ++e) {
        CVector candidate = CVector::Unit(dim, e);
        // Two passes of modified Gram-Schmidt keep the columns orthogonal to
        // machine precision.
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index c = 0; c < filled; ++c) {
                candidate -= u.col(c) * u.col(c).dot(candidate);
            }
        }
        const double norm = candidate.norm();
        if (norm < 1e-8) {
            continue;
        }
        u.col(filled++) = candidate / norm;
    }
    return u;
}

PrefixEncoding entangled_prefix_encoding(std::span<const EncodedToken> tokens,
                                         int prefix_length)
{
    if (prefix_length < 1 || static_cast<std::size_t>(prefix_length) > tokens.size()) {
        throw ConfigurationError("prefix length " + std::to_string(prefix_length) +
                                 " outside [1, " + std::to_string(tokens.size()) + "]");
    }
    const Eigen::Index d = tokens.front().state.to_vector().size();
    CVector sum = CVector::Zero(d * d);
    for (int i = 0; i < prefix_length; ++i) {
        const StateVector &x = tokens[static_cast<std::size_t>(i)].state;
        if (static_cast<Eigen::Index>(x.size()) != d) {
            throw ConfigurationError("tokens have inconsistent dimensions");
        }
        for (Eigen::Index b = 0; b < d; ++b) {
            for (Eigen::Index a = 0; a < d; ++a) {
                sum[a + d * b] += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(b)];
            }
        }
    }
    const double squared_norm = sum.squaredNorm();
    if (!(squared_norm > 0.0)) {
        throw DegenerateInputError("entangled prefix sum vanishes");
    }
    return PrefixEncoding{StateVector::from_vector(sum / std::sqrt(squared_norm)),
                          squared_norm};
}

CMatrix hadamard()
{
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix h(2, 2);
    h << s, s, s, -s;
    return h;
}

StateVector prepare_input_superposition(std::span<const EncodedToken> tokens, std::int64_t T,
                                        const RegisterLayout &layout, BlockTally *tally)
{
    if (exact_log2(T) < 1) {
        throw ConfigurationError("T must be a power of two >= 2, got " + std::to_string(T));
    }
    if (T != layout.steps()) {
        throw ConfigurationError("T does not match the layout's step register");
    }
    if (static_cast<std::int64_t>(tokens.size()) < T) {
        throw ConfigurationError("need at least T tokens");
    }
    for (const EncodedToken &token : tokens) {
        if (token.state.num_qubits() != layout.n) {
            throw ConfigurationError("token qubit count does not match the layout");
        }
    }

    StateVector state(layout.total_qubits());
    const UnitaryBlock h(hadamard(), {0});
    for (int q : layout.c().indices()) {
        state = apply_unitary(state, h.retargeted({q}), tally);
    }

    std::vector<int> ab(static_cast<std::size_t>(2 * layout.n));
    for (int q = 0; q < 2 * layout.n; ++q) {
        ab[static_cast<std::size_t>(q)] = q;
    }
    ControlledBlocks blocks;
    for (std::int64_t c = 0; c < T; ++c) {
        const PrefixEncoding prefix = entangled_prefix_encoding(tokens, static_cast<int>(c + 1));
        blocks.emplace(static_cast<std::uint64_t>(c),
                       UnitaryBlock(complete_unitary(prefix.state.to_vector()), ab));
    }
    return apply_controlled_by_register(state, layout.c(), blocks, tally);
}

StateVector basis_encode(std::uint64_t word_index, int num_qubits)
{
    if (num_qubits < 1 || num_qubits > 30 || word_index >= (std::uint64_t{1} << num_qubits)) {
        throw ConfigurationError("word index " + std::to_string(word_index) +
                                 " does not fit on " + std::to_string(num_qubits) + " qubits");
    }
    return StateVector::basis(num_qubits, word_index);
}

} // namespace qsalab
