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
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qsalab/types.hpp"

namespace qsalab {

/// Dense amplitude vector over `num_qubits` qubits.
///
/// Qubit ordering is little-endian throughout the library: qubit 0 is the
/// least-significant bit of the basis index. Values are immutable once
/// constructed; gate application returns a new state.
class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(int num_qubits);
    /// Takes ownership of `amplitudes`, whose length must be 2^num_qubits.
    StateVector(int num_qubits, std::vector<Complex> amplitudes);

    static StateVector basis(int num_qubits, std::uint64_t index);
    /// Copies an Eigen vector; its length must be a power of two.
    static StateVector from_vector(const CVector &amplitudes);

    [[nodiscard]] int num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] Complex operator[](std::size_t index) const { return amplitudes_[index]; }

    [[nodiscard]] double squared_norm() const noexcept;
    /// Throws DegenerateInputError for the zero vector.
    [[nodiscard]] StateVector normalized() const;
    [[nodiscard]] CVector to_vector() const;

  private:
    int num_qubits_;
    std::vector<Complex> amplitudes_;
};

/// Contiguous block of qubit indices [first, first + count).
struct QubitRange {
    int first = 0;
    int count = 0;

    [[nodiscard]] int end() const noexcept { return first + count; }
    [[nodiscard]] std::uint64_t mask() const noexcept
    {
        return ((std::uint64_t{1} << count) - 1) << first;
    }
    [[nodiscard]] std::vector<int> indices() const;
};

/// Qubit registers of the attention circuit: A and B carry tokens (n qubits
/// each, n = log2 d), C indexes the prediction step (t qubits, t = log2 T).
/// A occupies the low qubits, then B, then C.
struct RegisterLayout {
    int n = 0;
    int t = 0;

    /// Throws ConfigurationError unless d and T are powers of two, d >= 2, T >= 2.
    static RegisterLayout for_sizes(std::int64_t d, std::int64_t T);

    [[nodiscard]] QubitRange a() const noexcept { return {0, n}; }
    [[nodiscard]] QubitRange b() const noexcept { return {n, n}; }
    [[nodiscard]] QubitRange c() const noexcept { return {2 * n, t}; }
    [[nodiscard]] int total_qubits() const noexcept { return 2 * n + t; }
    [[nodiscard]] std::int64_t token_dim() const noexcept { return std::int64_t{1} << n; }
    [[nodiscard]] std::int64_t steps() const noexcept { return std::int64_t{1} << t; }
};

/// A 2^k x 2^k unitary acting on k target qubits. Bit b of the matrix index
/// corresponds to `targets[b]`. Unitarity is verified on construction.
class UnitaryBlock {
  public:
    static constexpr double kUnitarityTolerance = 1e-10;

    UnitaryBlock(CMatrix matrix, std::vector<int> targets);

    static UnitaryBlock identity(std::vector<int> targets);

    [[nodiscard]] const CMatrix &matrix() const noexcept { return matrix_; }
    [[nodiscard]] const std::vector<int> &targets() const noexcept { return targets_; }
    [[nodiscard]] int num_targets() const noexcept { return static_cast<int>(targets_.size()); }
    [[nodiscard]] UnitaryBlock adjoint() const;
    /// Same matrix on a different set of targets.
    [[nodiscard]] UnitaryBlock retargeted(std::vector<int> targets) const;

  private:
    CMatrix matrix_;
    std::vector<int> targets_;
};

/// Running count of block applications. `weighted` adds the dense dimension
/// 2^k of every k-qubit block applied, once per control branch it acts on.
struct BlockTally {
    std::int64_t applications = 0;
    std::int64_t weighted = 0;
};

/// Blocks keyed by the basis value of the control register.
using ControlledBlocks = std::map<std::uint64_t, UnitaryBlock>;

/// (U ⊗ I_rest)|state>.
[[nodiscard]] StateVector apply_unitary(const StateVector &state, const UnitaryBlock &block,
                                        BlockTally *tally = nullptr);

/// Σ_j U_j ⊗ |j><j| with j the basis value of `controls`. A control value
/// without a block is allowed only if the state has no support on it.
[[nodiscard]] StateVector apply_controlled_by_register(const StateVector &state,
                                                       QubitRange controls,
                                                       const ControlledBlocks &blocks,
                                                       BlockTally *tally = nullptr);

/// <0...0|ρ|0...0>, i.e. the expectation of ((Z + 1)/2)^{⊗m}.
[[nodiscard]] double all_zeros_expectation(const StateVector &state);

/// Fraction of `shots` Bernoulli draws that land on |0...0>. Deterministic in
/// `seed` and independent of the standard library's distribution code.
[[nodiscard]] double sample_expectation(const StateVector &state, std::int64_t shots,
                                        std::uint64_t seed);

/// <a|b>, conjugate-linear in the first argument.
[[nodiscard]] Complex inner_product(const StateVector &a, const StateVector &b);

/// In-place kernels backing the value API. `amplitudes` must be 2^m long.
namespace kernels {
void apply_block(std::span<Complex> amplitudes, const CMatrix &matrix,
                 std::span<const int> targets, std::uint64_t fixed_mask = 0,
                 std::uint64_t fixed_value = 0);
} // namespace kernels

} // namespace qsalab
