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

#include "qsalab/sequence_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "qsalab/errors.hpp"

namespace qsalab {

namespace {

constexpr double kEmbeddedNormFloor = 1e-12;

} // namespace

std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index)
{
    // splitmix64 over the pair
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Vocabulary::Vocabulary(int size) : size_(size)
{
    if (size < 2) {
        throw ConfigurationError("vocabulary needs at least two words");
    }
}

CVector Vocabulary::one_hot(int word) const
{
    if (word < 0 || word >= size_) {
        throw ConfigurationError("word index " + std::to_string(word) + " out of range");
    }
    CVector w = CVector::Zero(size_);
    w[word] = 1.0;
    return w;
}

std::vector<CVector> EmbeddingMap::sinusoidal_shifts(int d, int positions)
{
    std::vector<CVector> out;
    out.reserve(static_cast<std::size_t>(positions));
    for (int i = 1; i <= positions; ++i) {
        CVector c(d);
        for (int k = 0; k < d; ++k) {
            const int pair = k / 2;
            const double omega = std::pow(10000.0, -2.0 * pair / d);
            c[k] = (k % 2 == 0) ? std::sin(i * omega) : std::cos(i * omega);
        }
        out.push_back(std::move(c));
    }
    return out;
}

EmbeddingMap EmbeddingMap::random(int d, int vocab, int positions, bool complex_valued,
                                  double gamma, std::mt19937_64 &rng)
{
    EmbeddingMap map;
    map.matrix.resize(d, vocab);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index c = 0; c < map.matrix.cols(); ++c) {
        for (Eigen::Index r = 0; r < map.matrix.rows(); ++r) {
            const double re = dist(rng);
            const double im = complex_valued ? dist(rng) : 0.0;
            map.matrix(r, c) = Complex{re, im};
        }
    }
    map.shifts = sinusoidal_shifts(d, positions);
    map.gamma = gamma;
    map.validate();
    return map;
}

void EmbeddingMap::validate() const
{
    const Eigen::Index d = matrix.rows();
    if (d < 1 || matrix.cols() <= d) {
        throw ConfigurationError("embedding must map D words to d < D features");
    }
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
        const double norm = matrix.col(c).norm();
        if (!std::isfinite(norm) || !(norm > 0.0)) {
            throw ConfigurationError("embedding column " + std::to_string(c) +
                                     " has zero or non-finite norm");
        }
    }
    for (const CVector &c : shifts) {
        if (c.size() != d || !c.allFinite()) {
            throw ConfigurationError("positional shifts must be finite d-vectors");
        }
    }
    if (!std::isfinite(gamma)) {
        throw ConfigurationError("positional scale must be finite");
    }
}

EmbeddedSequence embed_sequence(std::span<const CVector> inputs, const EmbeddingMap &map)
{
    if (inputs.size() > map.shifts.size()) {
        throw ConfigurationError("sequence longer than the positional table");
    }
    EmbeddedSequence out;
    out.tokens.reserve(inputs.size());
    out.shifted.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].size() != map.matrix.cols()) {
            throw ConfigurationError("input dimension " + std::to_string(inputs[i].size()) +
                                     " does not match vocabulary size " +
                                     std::to_string(map.matrix.cols()));
        }
        CVector shifted = map.matrix * inputs[i];
        CVector token = shifted + map.gamma * map.shifts[i];
        if (!(shifted.norm() > kEmbeddedNormFloor) || !(token.norm() > kEmbeddedNormFloor)) {
            throw DegenerateInputError("embedded vector at position " + std::to_string(i + 1) +
                                       " vanishes");
        }
        out.tokens.push_back(std::move(token));
        out.shifted.push_back(std::move(shifted));
    }
    return out;
}

std::string to_string(DatasetKind kind)
{
    return kind == DatasetKind::classical ? "classical" : "quantum";
}

DatasetKind dataset_kind_from_string(const std::string &text)
{
    if (text == "classical") {
        return DatasetKind::classical;
    }
    if (text == "quantum") {
        return DatasetKind::quantum;
    }
    throw ConfigurationError("unknown dataset kind '" + text + "'");
}

std::vector<CVector> SequenceDataset::inputs(std::size_t record) const
{
    std::vector<CVector> out;
    if (kind == DatasetKind::classical) {
        const Vocabulary vocab(vocab_size);
        for (int w : words.at(record)) {
            out.push_back(vocab.one_hot(w));
        }
    } else {
        out = amplitudes.at(record);
    }
    return out;
}

void SequenceDataset::validate() const
{
    if (vocab_size < 2 || steps < 1) {
        throw ConfigurationError("dataset needs D >= 2 and T >= 1");
    }
    const auto length = static_cast<std::size_t>(steps + 1);
    if (kind == DatasetKind::classical) {
        if (words.size() != ids.size() || !amplitudes.empty()) {
            throw ConfigurationError("classical dataset records are inconsistent");
        }
        for (const auto &record : words) {
            if (record.size() != length) {
                throw ConfigurationError("classical record has the wrong length");
            }
            for (int w : record) {
                if (w < 0 || w >= vocab_size) {
                    throw ConfigurationError("word index out of range");
                }
            }
        }
    } else {
        if (amplitudes.size() != ids.size() || !words.empty()) {
            throw ConfigurationError("quantum dataset records are inconsistent");
        }
        for (const auto &record : amplitudes) {
            if (record.size() != length) {
                throw ConfigurationError("quantum record has the wrong length");
            }
            for (const CVector &step : record) {
                if (step.size() != vocab_size || std::abs(step.norm() - 1.0) > 1e-10) {
                    throw ConfigurationError("quantum step must be a unit vector of dimension D");
                }
            }
        }
    }
}

SequenceDataset generate_classical_dataset(int vocab, int steps, int count, std::uint64_t seed,
                                           int order, std::uint64_t chain_seed)
{
    if (vocab < 2 || steps < 1 || count < 1) {
        throw ConfigurationError("classical dataset needs D >= 2, T >= 1, count >= 1");
    }
    if (order < 1 || order > vocab) {
        throw ConfigurationError("Markov order must lie in [1, D]");
    }

    std::mt19937_64 chain_rng(chain_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RMatrix transitions = RMatrix::Zero(vocab, vocab);
    std::vector<int> columns(static_cast<std::size_t>(vocab));
    for (int row = 0; row < vocab; ++row) {
        std::iota(columns.begin(), columns.end(), 0);
        std::shuffle(columns.begin(), columns.end(), chain_rng);
        double total = 0.0;
        for (int k = 0; k < order; ++k) {
            const double weight = unit(chain_rng) + 1e-3;
            transitions(row, columns[static_cast<std::size_t>(k)]) = weight;
            total += weight;
        }
        transitions.row(row) /= total;
    }

    SequenceDataset ds;
    ds.kind = DatasetKind::classical;
    ds.vocab_size = vocab;
    ds.steps = steps;
    ds.seed = seed;
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < vocab; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < vocab; ++c) {
            row.push_back(transitions(r, c));
        }
        rows.push_back(std::move(row));
    }
    ds.generator = {{"name", "markov"}, {"order", order}, {"chain_seed", chain_seed},
                    {"transitions", std::move(rows)}};

    for (int s = 0; s < count; ++s) {
        std::mt19937_64 rng(record_seed(seed, static_cast<std::uint64_t>(s)));
        std::vector<int> record;
        record.reserve(static_cast<std::size_t>(steps + 1));
        record.push_back(std::uniform_int_distribution<int>(0, vocab - 1)(rng));
        for (int j = 0; j < steps; ++j) {
            const double u = unit(rng);
            double cumulative = 0.0;
            int next = vocab - 1;
            for (int c = 0; c < vocab; ++c) {
                cumulative += transitions(record.back(), c);
                if (u < cumulative && transitions(record.back(), c) > 0.0) {
                    next = c;
                    break;
                }
            }
            while (transitions(record.back(), next) == 0.0) {
                --next; // u landed in the rounding gap at the top of the row
            }
            record.push_back(next);
        }
        ds.ids.push_back(s);
        ds.words.push_back(std::move(record));
    }
    return ds;
}

RMatrix markov_transitions(const SequenceDataset &dataset)
{
    if (dataset.kind != DatasetKind::classical || !dataset.generator.contains("transitions")) {
        throw ConfigurationError("dataset carries no Markov transition matrix");
    }
    const auto &rows = dataset.generator.at("transitions");
    RMatrix out(dataset.vocab_size, dataset.vocab_size);
    for (int r = 0; r < dataset.vocab_size; ++r) {
        for (int c = 0; c < dataset.vocab_size; ++c) {
            out(r, c) = rows.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
        }
    }
    return out;
}

IsingModel make_ising(const RMatrix &couplings)
{
    const auto q = static_cast<int>(couplings.rows());
    if (q < 1 || q > 10 || couplings.cols() != q) {
        throw ConfigurationError("Ising model needs a square coupling matrix on 1..10 qubits");
    }
    const Eigen::Index dim = Eigen::Index{1} << q;
    IsingModel model;
    model.qubits = q;
    model.couplings = couplings;
    model.hamiltonian = CMatrix::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int i = 0; i < q; ++i) {
            const double zi = ((s >> i) & 1) ? -1.0 : 1.0;
            for (int j = i + 1; j < q; ++j) {
                const double zj = ((s >> j) & 1) ? -1.0 : 1.0;
                diag += couplings(i, j) * zi * zj;
            }
            model.hamiltonian(s ^ (Eigen::Index{1} << i), s) += 1.0;
        }
        model.hamiltonian(s, s) += diag;
    }
    const Eigen::SelfAdjointEigenSolver<CMatrix> solver(model.hamiltonian);
    model.energies = solver.eigenvalues();
    model.eigenvectors = solver.eigenvectors();
    return model;
}

IsingModel build_ising(int qubits, std::uint64_t seed)
{
    if (qubits < 1 || qubits > 10) {
        throw ConfigurationError("Ising model supports 1..10 qubits");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    RMatrix j = RMatrix::Zero(qubits, qubits);
    for (int a = 0; a < qubits; ++a) {
        for (int b = a + 1; b < qubits; ++b) {
            j(a, b) = dist(rng);
            j(b, a) = j(a, b);
        }
    }
    return make_ising(j);
}

CMatrix IsingModel::evolution(double time) const
{
    CVector phases(energies.size());
    for (Eigen::Index k = 0; k < energies.size(); ++k) {
        phases[k] = std::polar(1.0, -energies[k] * time);
    }
    return eigenvectors * phases.asDiagonal() * eigenvectors.adjoint();
}

SequenceDataset generate_quantum_dataset(const IsingModel &model, int steps, int count,
                                         std::uint64_t seed, std::uint64_t model_seed)
{
    if (steps < 1 || count < 1) {
        throw ConfigurationError("quantum dataset needs T >= 1 and count >= 1");
    }
    const Eigen::Index dim = model.hamiltonian.rows();
    std::vector<CMatrix> propagators;
    for (int j = 0; j <= steps; ++j) {
        propagators.push_back(model.evolution(static_cast<double>(j)));
    }

    SequenceDataset ds;
    ds.kind = DatasetKind::quantum;
    ds.vocab_size = static_cast<int>(dim);
    ds.steps = steps;
    ds.seed = seed;
    nlohmann::json couplings = nlohmann::json::array();
    for (int a = 0; a < model.qubits; ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (int b = 0; b < model.qubits; ++b) {
            row.push_back(model.couplings(a, b));
        }
        couplings.push_back(std::move(row));
    }
    ds.generator = {{"name", "tfim"}, {"qubits", model.qubits}, {"model_seed", model_seed},
                    {"couplings", std::move(couplings)}};

    for (int s = 0; s < count; ++s) {
        std::mt19937_64 rng(record_seed(seed, static_cast<std::uint64_t>(s)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        CVector psi(dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            psi[k] = Complex{re, im};
        }
        psi.normalize();
        std::vector<CVector> record;
        for (int j = 0; j <= steps; ++j) {
            record.push_back(propagators[static_cast<std::size_t>(j)] * psi);
        }
        ds.ids.push_back(s);
        ds.amplitudes.push_back(std::move(record));
    }
    return ds;
}

} // namespace qsalab
