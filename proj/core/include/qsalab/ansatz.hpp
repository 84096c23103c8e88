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

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "qsalab/statevector.hpp"
#include "qsalab/types.hpp"

namespace qsalab {

/// Angles of the layered two-body ansatz.
///
/// Layout is [layer][qubit][axis] with axis 0 the Ry angle and axis 1 the Rz
/// angle. There are `num_layers` entangling layers plus one trailing
/// rotation-only layer, so (num_layers + 1) * num_qubits * 2 angles in total.
struct AnsatzParams {
    int num_qubits = 1;
    int num_layers = 0;
    std::vector<double> angles;

    static AnsatzParams zeros(int num_qubits, int num_layers);
    /// Angles drawn uniformly from [-scale, scale].
    static AnsatzParams random(int num_qubits, int num_layers, std::mt19937_64 &rng,
                               double scale = 0.1);

    [[nodiscard]] static std::size_t angle_count(int num_qubits, int num_layers) noexcept
    {
        return static_cast<std::size_t>(num_layers + 1) * static_cast<std::size_t>(num_qubits) * 2;
    }
    [[nodiscard]] std::size_t index(int layer, int qubit, int axis) const noexcept
    {
        return (static_cast<std::size_t>(layer) * static_cast<std::size_t>(num_qubits) +
                static_cast<std::size_t>(qubit)) * 2 + static_cast<std::size_t>(axis);
    }
    /// Throws ConfigurationError on a wrong angle count or non-finite angle.
    void validate() const;
};

/// One Rz angle per qubit of the step register.
struct PhaseLayerParams {
    std::vector<double> angles;

    static PhaseLayerParams zeros(int num_qubits) { return {std::vector<double>(static_cast<std::size_t>(num_qubits), 0.0)}; }
    void validate() const;
};

[[nodiscard]] CMatrix ry(double theta);
[[nodiscard]] CMatrix rz(double phi);

/// Dense 2^n x 2^n matrix of the ansatz: per layer Ry(θ)·Rz(φ) on every qubit
/// followed by CNOT(q -> q+1) for q = 0..n-2, then a final rotation layer.
[[nodiscard]] CMatrix ansatz_matrix(const AnsatzParams &params);

/// The ansatz as a block on qubits [first_qubit, first_qubit + n).
[[nodiscard]] UnitaryBlock build_ansatz_unitary(const AnsatzParams &params, int first_qubit = 0);

/// Diagonal matrix of ⊗_k Rz(α_k), qubit k = bit k of the index.
[[nodiscard]] CMatrix phase_layer_matrix(const PhaseLayerParams &params);

[[nodiscard]] UnitaryBlock build_phase_layer(const PhaseLayerParams &params, int first_qubit = 0);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Two-point shift rule [f(θ + π/2 e_k) - f(θ - π/2 e_k)] / 2, exact when
/// parameter k enters f through a single rotation exp(-iθG/2) with G² = 1.
[[nodiscard]] double parameter_shift_gradient(const ScalarFunction &f,
                                              std::span<const double> params,
                                              std::size_t index);

} // namespace qsalab
