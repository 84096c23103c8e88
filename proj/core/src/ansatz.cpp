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

#include "qsalab/ansatz.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsalab/errors.hpp"

namespace qsalab {

namespace {

CMatrix cnot()
{
    // bit 0 = control, bit 1 = target
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m(2, 2) = 1.0;
    m(3, 1) = 1.0;
    m(1, 3) = 1.0;
    return m;
}

} // namespace

AnsatzParams AnsatzParams::zeros(int num_qubits, int num_layers)
{
    if (num_qubits < 1 || num_layers < 0) {
        throw ConfigurationError("ansatz needs >= 1 qubit and >= 0 layers");
    }
    return {num_qubits, num_layers,
            std::vector<double>(angle_count(num_qubits, num_layers), 0.0)};
}

AnsatzParams AnsatzParams::random(int num_qubits, int num_layers, std::mt19937_64 &rng,
                                  double scale)
{
    AnsatzParams params = zeros(num_qubits, num_layers);
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (double &a : params.angles) {
        a = dist(rng);
    }
    return params;
}

void AnsatzParams::validate() const
{
    if (num_qubits < 1 || num_layers < 0) {
        throw ConfigurationError("ansatz needs >= 1 qubit and >= 0 layers");
    }
    if (angles.size() != angle_count(num_qubits, num_layers)) {
        throw ConfigurationError("ansatz expects " +
                                 std::to_string(angle_count(num_qubits, num_layers)) +
                                 " angles, got " + std::to_string(angles.size()));
    }
    for (double a : angles) {
        if (!std::isfinite(a)) {
            throw ConfigurationError("non-finite ansatz angle");
        }
    }
}

void PhaseLayerParams::validate() const
{
    for (double a : angles) {
        if (!std::isfinite(a)) {
            throw ConfigurationError("non-finite phase-layer angle");
        }
    }
}

CMatrix ry(double theta)
{
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    CMatrix m(2, 2);
    m << c, -s, s, c;
    return m;
}

CMatrix rz(double phi)
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = std::polar(1.0, -phi / 2);
    m(1, 1) = std::polar(1.0, phi / 2);
    return m;
}

CMatrix ansatz_matrix(const AnsatzParams &params)
{
    params.validate();
    const int n = params.num_qubits;
    const Eigen::Index dim = Eigen::Index{1} << n;
    const CMatrix entangler = cnot();

    auto rotation = [&](int layer, int q) {
        return CMatrix(ry(params.angles[params.index(layer, q, 0)]) *
                       rz(params.angles[params.index(layer, q, 1)]));
    };

    CMatrix u = CMatrix::Identity(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        std::span<Complex> column(u.col(col).data(), static_cast<std::size_t>(dim));
        for (int layer = 0; layer <= params.num_layers; ++layer) {
            for (int q = 0; q < n; ++q) {
                const int target[] = {q};
                kernels::apply_block(column, rotation(layer, q), target);
            }
            if (layer == params.num_layers) {
                break;
            }
            for (int q = 0; q + 1 < n; ++q) {
                const int pair[] = {q, q + 1};
                kernels::apply_block(column, entangler, pair);
            }
        }
    }
    return u;
}

UnitaryBlock build_ansatz_unitary(const AnsatzParams &params, int first_qubit)
{
    return UnitaryBlock(ansatz_matrix(params), QubitRange{first_qubit, params.num_qubits}.indices());
}

CMatrix phase_layer_matrix(const PhaseLayerParams &params)
{
    params.validate();
    const auto t = params.angles.size();
    const Eigen::Index dim = Eigen::Index{1} << t;
    CMatrix m = CMatrix::Zero(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        double phase = 0.0;
        for (std::size_t k = 0; k < t; ++k) {
            phase += ((c >> k) & 1) ? params.angles[k] / 2 : -params.angles[k] / 2;
        }
        m(c, c) = std::polar(1.0, phase);
    }
    return m;
}

UnitaryBlock build_phase_layer(const PhaseLayerParams &params, int first_qubit)
{
    if (params.angles.empty()) {
        throw ConfigurationError("phase layer needs at least one qubit");
    }
    return UnitaryBlock(phase_layer_matrix(params),
                        QubitRange{first_qubit, static_cast<int>(params.angles.size())}.indices());
}

double parameter_shift_gradient(const ScalarFunction &f, std::span<const double> params,
                                std::size_t index)
{
    if (index >= params.size()) {
        throw ConfigurationError("parameter index out of range");
    }
    std::vector<double> shifted(params.begin(), params.end());
    shifted[index] = params[index] + std::numbers::pi / 2;
    const double plus = f(shifted);
    shifted[index] = params[index] - std::numbers::pi / 2;
    const double minus = f(shifted);
    return (plus - minus) / 2;
}

} // namespace qsalab
