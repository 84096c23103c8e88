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
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsalab/types.hpp"

namespace qsalab {

/// One-hot vocabulary of size D >= 2. Word indices are 0-based.
class Vocabulary {
  public:
    explicit Vocabulary(int size);

    [[nodiscard]] int size() const noexcept { return size_; }
    [[nodiscard]] CVector one_hot(int word) const;

  private:
    int size_;
};

/// Linear embedding x_i = E w_i + γ c_i with fixed sinusoidal shifts c_i.
struct EmbeddingMap {
    CMatrix matrix;              ///< d x D
    std::vector<CVector> shifts; ///< c_1..c_P, each of dimension d
    double gamma = 0.1;

    /// c_i[2k] = sin(i ω_k), c_i[2k+1] = cos(i ω_k), ω_k = 10000^{-2k/d}, i = 1..positions.
    static std::vector<CVector> sinusoidal_shifts(int d, int positions);
    /// Entries uniform in [-1, 1] (real and imaginary part for complex maps).
    static EmbeddingMap random(int d, int vocab, int positions, bool complex_valued,
                               double gamma, std::mt19937_64 &rng);

    [[nodiscard]] int token_dim() const noexcept { return static_cast<int>(matrix.rows()); }
    [[nodiscard]] int vocab_size() const noexcept { return static_cast<int>(matrix.cols()); }
    [[nodiscard]] int positions() const noexcept { return static_cast<int>(shifts.size()); }
    void validate() const;
};

struct EmbeddedSequence {
    std::vector<CVector> tokens;  ///< x_i = E w_i + γ c_i
    std::vector<CVector> shifted; ///< x̃_i = E w_i
};

/// Embeds w_1..w_L (one-hot or amplitude vectors of dimension D). Throws
/// DegenerateInputError if any x_i or x̃_i vanishes.
[[nodiscard]] EmbeddedSequence embed_sequence(std::span<const CVector> inputs,
                                              const EmbeddingMap &map);

enum class DatasetKind { classical, quantum };

[[nodiscard]] std::string to_string(DatasetKind kind);
[[nodiscard]] DatasetKind dataset_kind_from_string(const std::string &text);

/// Sequences of T + 1 words (classical) or T + 1 amplitude vectors (quantum).
struct SequenceDataset {
    DatasetKind kind = DatasetKind::classical;
    int vocab_size = 0; ///< D
    int steps = 0;      ///< T; records hold T + 1 entries
    std::uint64_t seed = 0;
    nlohmann::json generator = nlohmann::json::object();
    std::vector<std::int64_t> ids;
    std::vector<std::vector<int>> words;
    std::vector<std::vector<CVector>> amplitudes;

    [[nodiscard]] std::size_t size() const noexcept { return ids.size(); }
    [[nodiscard]] int sequence_length() const noexcept { return steps + 1; }
    /// w_1..w_{T+1} of one record as vectors of dimension D.
    [[nodiscard]] std::vector<CVector> inputs(std::size_t record) const;
    void validate() const;
};

/// Random sparse Markov chain: each row of the transition matrix has `order`
/// non-zero entries drawn uniformly and normalized. The chain comes from
/// `chain_seed`, the sampled sequences from `seed`; the first word of every
/// sequence is uniform over the vocabulary.
[[nodiscard]] SequenceDataset generate_classical_dataset(int vocab, int steps, int count,
                                                         std::uint64_t seed, int order,
                                                         std::uint64_t chain_seed);

/// Transition matrix stored in a classical dataset's generator metadata.
[[nodiscard]] RMatrix markov_transitions(const SequenceDataset &dataset);

/// Transverse-field Ising model H = Σ_i X_i + Σ_{i<j} J_ij Z_i Z_j on q qubits.
struct IsingModel {
    int qubits = 0;
    RMatrix couplings;        ///< symmetric, zero diagonal, entries in [0, 1]
    CMatrix hamiltonian;      ///< 2^q x 2^q
    Eigen::VectorXd energies; ///< eigenvalues of H
    CMatrix eigenvectors;     ///< columns are eigenvectors of H

    /// e^{-iHt} from the eigendecomposition.
    [[nodiscard]] CMatrix evolution(double time) const;
};

/// Builds H from explicit couplings (q x q, symmetric, zero diagonal).
[[nodiscard]] IsingModel make_ising(const RMatrix &couplings);

/// Couplings J_ij uniform in [0, 1], 1 <= q <= 10.
[[nodiscard]] IsingModel build_ising(int qubits, std::uint64_t seed);

/// Haar-random |ψ_1> per record, |ψ_j> = e^{-iH(j-1)}|ψ_1> for j = 2..T+1.
[[nodiscard]] SequenceDataset generate_quantum_dataset(const IsingModel &model, int steps,
                                                       int count, std::uint64_t seed,
                                                       std::uint64_t model_seed);

/// Seed for record `index` of a dataset seeded with `seed`.
[[nodiscard]] std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index);

} // namespace qsalab
