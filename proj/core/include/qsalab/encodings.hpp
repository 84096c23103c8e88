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

#include "qsalab/statevector.hpp"
#include "qsalab/types.hpp"

namespace qsalab {

/// Amplitude encoding |x> = x / ||x|| of a classical vector.
struct EncodedToken {
    CVector raw;
    StateVector state;
    double norm = 0.0; ///< ||raw|| before normalization
};

/// Vectors with ||x|| at or below this are rejected rather than encoded.
inline constexpr double kEncodingNormFloor = 1e-12;

[[nodiscard]] EncodedToken amplitude_encode(const CVector &x, int num_qubits);

/// Unitary whose first column is `first_column` (unit norm), completed by
/// Gram-Schmidt over the standard basis e_0, e_1, ...
[[nodiscard]] CMatrix complete_unitary(const CVector &first_column);

struct PrefixEncoding {
    StateVector state;         ///< on 2n qubits, register A = low n qubits
    double squared_norm = 0.0; ///< || Σ_{i<=j} |x_i>|x_i> ||^2 before normalization
};

/// Normalized Σ_{i=1}^{j} |x_i>_A ⊗ |x_i>_B for 1 <= prefix_length <= tokens.size().
[[nodiscard]] PrefixEncoding entangled_prefix_encoding(std::span<const EncodedToken> tokens,
                                                       int prefix_length);

/// (1/√T) Σ_j |ψ_j>_{AB} ⊗ |j-1>_C, built as Hadamards on C followed by the
/// C-controlled preparations U_{ψ_j}. Branch c = j - 1 of register C holds the
/// prefix state of length j.
[[nodiscard]] StateVector prepare_input_superposition(std::span<const EncodedToken> tokens,
                                                      std::int64_t T,
                                                      const RegisterLayout &layout,
                                                      BlockTally *tally = nullptr);

/// Computational basis state |word_index> on `num_qubits` qubits.
[[nodiscard]] StateVector basis_encode(std::uint64_t word_index, int num_qubits);

/// Single-qubit Hadamard matrix.
[[nodiscard]] CMatrix hadamard();

} // namespace qsalab
