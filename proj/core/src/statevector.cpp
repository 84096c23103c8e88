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

#include "qsalab/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qsalab/errors.hpp"

namespace qsalab {

namespace {

std::size_t dimension_for(int num_qubits)
{
    if (num_qubits < 0 || num_qubits > 30) {
        throw ConfigurationError("qubit count out of range: " + std::to_string(num_qubits));
    }
    return std::size_t{1} << num_qubits;
}

std::uint64_t target_mask(std::span<const int> targets)
{
    std::uint64_t mask = 0;
    for (int q : targets) {
        mask |= std::uint64_t{1} << q;
    }
    return mask;
}

void check_targets(const UnitaryBlock &block, int num_qubits)
{
    for (int q : block.targets()) {
        if (q >= num_qubits) {
            throw ConfigurationError("target qubit " + std::to_string(q) +
                                     " outside a " + std::to_string(num_qubits) +
                                     "-qubit state");
        }
    }
}

} // namespace

std::vector<int> QubitRange::indices() const
{
    std::vector<int> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = first + i;
    }
    return out;
}

StateVector::StateVector(int num_qubits)
    : num_qubits_(num_qubits), amplitudes_(dimension_for(num_qubits), Complex{0.0, 0.0})
{
    amplitudes_[0] = 1.0;
}

StateVector::StateVector(int num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes))
{
    if (amplitudes_.size() != dimension_for(num_qubits)) {
        throw ConfigurationError("amplitude count " + std::to_string(amplitudes_.size()) +
                                 " does not match 2^" + std::to_string(num_qubits));
    }
}

StateVector StateVector::basis(int num_qubits, std::uint64_t index)
{
    const std::size_t dim = dimension_for(num_qubits);
    if (index >= dim) {
        throw ConfigurationError("basis index " + std::to_string(index) + " out of range");
    }
    std::vector<Complex> amps(dim, Complex{0.0, 0.0});
    amps[index] = 1.0;
    return StateVector(num_qubits, std::move(amps));
}

StateVector StateVector::from_vector(const CVector &amplitudes)
{
    const int qubits = exact_log2(amplitudes.size());
    if (qubits < 0) {
        throw ConfigurationError("vector length " + std::to_string(amplitudes.size()) +
                                 " is not a power of two");
    }
    return StateVector(qubits, std::vector<Complex>(amplitudes.data(),
                                                    amplitudes.data() + amplitudes.size()));
}

double StateVector::squared_norm() const noexcept
{
    double acc = 0.0;
    for (const Complex &a : amplitudes_) {
        acc += std::norm(a);
    }
    return acc;
}

StateVector StateVector::normalized() const
{
    const double norm = std::sqrt(squared_norm());
    if (norm == 0.0) {
        throw DegenerateInputError("cannot normalize the zero vector");
    }
    std::vector<Complex> amps(amplitudes_);
    for (Complex &a : amps) {
        a /= norm;
    }
    return StateVector(num_qubits_, std::move(amps));
}

CVector StateVector::to_vector() const
{
    return Eigen::Map<const CVector>(amplitudes_.data(),
                                     static_cast<Eigen::Index>(amplitudes_.size()));
}

RegisterLayout RegisterLayout::for_sizes(std::int64_t d, std::int64_t T)
{
    const int n = exact_log2(d);
    const int t = exact_log2(T);
    if (n < 1) {
        throw ConfigurationError("token dimension must be a power of two >= 2, got " +
                                 std::to_string(d));
    }
    if (t < 1) {
        throw ConfigurationError("sequence length T must be a power of two >= 2, got " +
                                 std::to_string(T));
    }
    return {n, t};
}

UnitaryBlock::UnitaryBlock(CMatrix matrix, std::vector<int> targets)
    : matrix_(std::move(matrix)), targets_(std::move(targets))
{
    const auto k = targets_.size();
    if (k == 0 || k > 24) {
        throw ConfigurationError("unitary block needs between 1 and 24 targets");
    }
    const Eigen::Index dim = Eigen::Index{1} << k;
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
        throw ConfigurationError("matrix of size " + std::to_string(matrix_.rows()) + "x" +
                                 std::to_string(matrix_.cols()) + " does not act on " +
                                 std::to_string(k) + " target qubits");
    }
    std::vector<int> sorted(targets_);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigurationError("target qubits must be distinct non-negative indices");
    }
    const double defect =
        (matrix_ * matrix_.adjoint() - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (!(defect <= kUnitarityTolerance)) {
        throw ConfigurationError("matrix is not unitary (max |UU^† - I| = " +
                                 std::to_string(defect) + ")");
    }
}

UnitaryBlock UnitaryBlock::identity(std::vector<int> targets)
{
    const Eigen::Index dim = Eigen::Index{1} << targets.size();
    return UnitaryBlock(CMatrix::Identity(dim, dim), std::move(targets));
}

UnitaryBlock UnitaryBlock::adjoint() const
{
    return UnitaryBlock(matrix_.adjoint(), targets_);
}

UnitaryBlock UnitaryBlock::retargeted(std::vector<int> targets) const
{
    return UnitaryBlock(matrix_, std::move(targets));
}

namespace kernels {

void apply_block(std::span<Complex> amplitudes, const CMatrix &matrix,
                 std::span<const int> targets, std::uint64_t fixed_mask,
                 std::uint64_t fixed_value)
{
    const std::size_t k = targets.size();
    const std::size_t dim = std::size_t{1} << k;
    std::vector<std::uint64_t> offsets(dim, 0);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t b = 0; b < k; ++b) {
            if ((r >> b) & 1U) {
                offsets[r] |= std::uint64_t{1} << targets[b];
            }
        }
    }
    const std::uint64_t busy = target_mask(targets) | fixed_mask;
    std::vector<Complex> in(dim);
    const Complex *m = matrix.data(); // column-major
    for (std::uint64_t base = 0; base < amplitudes.size(); ++base) {
        if ((base & busy) != 0) {
            continue;
        }
        const std::uint64_t origin = base | fixed_value;
        for (std::size_t r = 0; r < dim; ++r) {
            in[r] = amplitudes[origin | offsets[r]];
        }
        for (std::size_t r = 0; r < dim; ++r) {
            Complex acc{0.0, 0.0};
            for (std::size_t c = 0; c < dim; ++c) {
                acc += m[c * dim + r] * in[c];
            }
            amplitudes[origin | offsets[r]] = acc;
        }
    }
}

} // namespace kernels

StateVector apply_unitary(const StateVector &state, const UnitaryBlock &block, BlockTally *tally)
{
    check_targets(block, state.num_qubits());
    std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
    kernels::apply_block(amps, block.matrix(), block.targets());
    if (tally != nullptr) {
        ++tally->applications;
        tally->weighted += block.matrix().rows();
    }
    return StateVector(state.num_qubits(), std::move(amps));
}

StateVector apply_controlled_by_register(const StateVector &state, QubitRange controls,
                                         const ControlledBlocks &blocks, BlockTally *tally)
{
    if (controls.count < 1 || controls.first < 0 || controls.end() > state.num_qubits()) {
        throw ConfigurationError("control register outside the state");
    }
    const std::uint64_t control_mask = controls.mask();
    const std::uint64_t values = std::uint64_t{1} << controls.count;
    std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());

    for (std::uint64_t j = 0; j < values; ++j) {
        const std::uint64_t fixed = j << controls.first;
        const auto it = blocks.find(j);
        if (it == blocks.end()) {
            for (std::uint64_t i = 0; i < amps.size(); ++i) {
                if ((i & control_mask) == fixed && amps[i] != Complex{0.0, 0.0}) {
                    throw ConfigurationError("no block for reachable control value " +
                                             std::to_string(j));
                }
            }
            continue;
        }
        const UnitaryBlock &block = it->second;
        check_targets(block, state.num_qubits());
        if ((target_mask(block.targets()) & control_mask) != 0) {
            throw ConfigurationError("controlled block overlaps the control register");
        }
        kernels::apply_block(amps, block.matrix(), block.targets(), control_mask, fixed);
        if (tally != nullptr) {
            ++tally->applications;
            tally->weighted += block.matrix().rows();
        }
    }
    for (const auto &[j, block] : blocks) {
        if (j >= values) {
            throw ConfigurationError("control value " + std::to_string(j) +
                                     " exceeds the control register");
        }
    }
    return StateVector(state.num_qubits(), std::move(amps));
}

double all_zeros_expectation(const StateVector &state)
{
    return std::norm(state[0]);
}

double sample_expectation(const StateVector &state, std::int64_t shots, std::uint64_t seed)
{
    if (shots < 1) {
        throw ConfigurationError("shots must be >= 1");
    }
    const double p = all_zeros_expectation(state);
    std::mt19937_64 engine(seed);
    std::int64_t hits = 0;
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        if (u < p) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(shots);
}

Complex inner_product(const StateVector &a, const StateVector &b)
{
    if (a.num_qubits() != b.num_qubits()) {
        throw ConfigurationError("inner product of states with different qubit counts");
    }
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

} // namespace qsalab
