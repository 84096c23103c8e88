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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qsalab/ansatz.hpp"
#include "qsalab/errors.hpp"
#include "qsalab/qsa_engine.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace qsalab;
using testing::Gen;

namespace {

/// Ansatz rebuilt from Kronecker-expanded single-qubit rotations and CNOT
/// permutation matrices.
CMatrix dense_ansatz(const AnsatzParams &p)
{
    const int n = p.num_qubits;
    const Eigen::Index dim = Eigen::Index{1} << n;
    CMatrix u = CMatrix::Identity(dim, dim);
    for (int layer = 0; layer <= p.num_layers; ++layer) {
        for (int q = 0; q < n; ++q) {
            const CMatrix rot = testing::ry_matrix(p.angles[p.index(layer, q, 0)]) *
                                testing::rz_matrix(p.angles[p.index(layer, q, 1)]);
            u = testing::expand(rot, {q}, n) * u;
        }
        if (layer == p.num_layers) {
            break;
        }
        for (int q = 0; q + 1 < n; ++q) {
            u = testing::cnot_matrix(q, q + 1, n) * u;
        }
    }
    return u;
}

double unitarity_defect(const CMatrix &u)
{
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("ansatz examples")
{
    const CMatrix id = ansatz_matrix(AnsatzParams::zeros(1, 1));
    CHECK((id - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);

    AnsatzParams flip = AnsatzParams::zeros(1, 0);
    flip.angles[flip.index(0, 0, 0)] = std::numbers::pi;
    const CMatrix u = ansatz_matrix(flip);
    CMatrix expected(2, 2);
    expected << 0, -1, 1, 0;
    CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-15);

    Gen g(3);
    CHECK(unitarity_defect(ansatz_matrix(g.ansatz(2, 2))) < 1e-12);
}

TEST_CASE("ansatz parameter layout and validation")
{
    CHECK(AnsatzParams::angle_count(2, 5) == 24);
    AnsatzParams p = AnsatzParams::zeros(2, 5);
    CHECK(p.angles.size() == 24);
    CHECK(p.index(1, 1, 1) == 7);
    p.angles.pop_back();
    CHECK_THROWS_AS(p.validate(), ConfigurationError);
    AnsatzParams nan = AnsatzParams::zeros(1, 1);
    nan.angles[0] = std::nan("");
    CHECK_THROWS_AS(nan.validate(), ConfigurationError);
    PhaseLayerParams r{{0.0, std::numeric_limits<double>::infinity()}};
    CHECK_THROWS_AS(r.validate(), ConfigurationError);
}

TEST_CASE("random ansatz initialisation stays in the requested interval")
{
    std::mt19937_64 rng(9);
    const AnsatzParams p = AnsatzParams::random(3, 4, rng);
    double largest = 0.0;
    for (double a : p.angles) {
        largest = std::max(largest, std::abs(a));
    }
    CHECK(largest <= 0.1);
    CHECK(largest > 0.05);
}

TEST_CASE("property: ansatz matches the Kronecker oracle and is unitary")
{
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Gen g(seed);
        const int n = g.integer(1, 2);
        const int layers = g.integer(1, 5);
        const AnsatzParams p = g.ansatz(n, layers);
        const CMatrix u = ansatz_matrix(p);
        CHECK(unitarity_defect(u) < 1e-12);
        CHECK((u - dense_ansatz(p)).cwiseAbs().maxCoeff() < 1e-12);
    }
    Gen g(999);
    const AnsatzParams three = g.ansatz(3, 3);
    CHECK((ansatz_matrix(three) - dense_ansatz(three)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ansatz block targets its register")
{
    Gen g(4);
    const UnitaryBlock b = build_ansatz_unitary(g.ansatz(2, 1), 3);
    CHECK(b.targets() == std::vector<int>{3, 4});
}

TEST_CASE("phase layer")
{
    CHECK((phase_layer_matrix(PhaseLayerParams::zeros(2)) - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    const CMatrix pi = phase_layer_matrix(PhaseLayerParams{{std::numbers::pi}});
    CHECK(std::abs(pi(0, 0) - std::polar(1.0, -std::numbers::pi / 2)) < 1e-15);
    CHECK(std::abs(pi(1, 1) - std::polar(1.0, std::numbers::pi / 2)) < 1e-15);

    for (std::uint64_t seed = 10; seed < 30; ++seed) {
        Gen g(seed);
        const PhaseLayerParams p = g.phases(2);
        // qubit 1 is the high bit, so it is the left Kronecker factor
        const CMatrix oracle = testing::kron(testing::rz_matrix(p.angles[1]), testing::rz_matrix(p.angles[0]));
        CHECK((phase_layer_matrix(p) - oracle).cwiseAbs().maxCoeff() < 1e-15);
    }
    CHECK_THROWS_AS((void)build_phase_layer(PhaseLayerParams{}), ConfigurationError);
}

TEST_CASE("parameter shift examples")
{
    const std::vector<double> theta{0.3, -1.2};
    const ScalarFunction constant = [](std::span<const double>) { return 2.5; };
    CHECK(parameter_shift_gradient(constant, theta, 1) == 0.0);

    // <Z> after Ry(θ)|0> is cos θ
    const ScalarFunction z_expect = [](std::span<const double> a) {
        const CMatrix u = testing::ry_matrix(a[0]);
        return std::norm(u(0, 0)) - std::norm(u(1, 0));
    };
    const std::vector<double> zero{0.0};
    CHECK(std::abs(parameter_shift_gradient(z_expect, zero, 0)) < 1e-15);

    const std::vector<double> third{std::numbers::pi / 3};
    const double shift = parameter_shift_gradient(z_expect, third, 0);
    const double h = 1e-5;
    const double fd = (z_expect(std::vector<double>{third[0] + h}) - z_expect(std::vector<double>{third[0] - h})) / (2 * h);
    CHECK(shift == doctest::Approx(-std::sin(std::numbers::pi / 3)).epsilon(1e-12));
    CHECK(std::abs(shift - fd) < 1e-6);
}

TEST_CASE("property: shift rule on the QSA expectation matches finite differences")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Gen g(seed * 31);
        const int d = 1 << g.integer(1, 2);
        const std::int64_t T = std::int64_t{1} << g.integer(1, 2);
        const QsaInstance base = g.qsa_instance(d, static_cast<int>(T), 2);

        const std::size_t nv = base.params_v.angles.size();
        const std::size_t nw = base.params_w.angles.size();
        std::vector<double> theta = base.params_v.angles;
        theta.insert(theta.end(), base.params_w.angles.begin(), base.params_w.angles.end());
        theta.insert(theta.end(), base.params_r.angles.begin(), base.params_r.angles.end());

        const ScalarFunction f = [&](std::span<const double> a) {
            QsaInstance inst = base;
            std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(nv), inst.params_v.angles.begin());
            std::copy(a.begin() + static_cast<std::ptrdiff_t>(nv),
                      a.begin() + static_cast<std::ptrdiff_t>(nv + nw), inst.params_w.angles.begin());
            std::copy(a.begin() + static_cast<std::ptrdiff_t>(nv + nw), a.end(), inst.params_r.angles.begin());
            return analytic_expectation(inst);
        };

        double diff = 0.0;
        double norm = 0.0;
        const double h = 1e-4;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            const double shift = parameter_shift_gradient(f, theta, k);
            std::vector<double> plus = theta;
            std::vector<double> minus = theta;
            plus[k] += h;
            minus[k] -= h;
            const double fd = (f(plus) - f(minus)) / (2 * h);
            diff += (shift - fd) * (shift - fd);
            norm += shift * shift;
        }
        CHECK(std::sqrt(diff / norm) < 1e-5);
    }
}

TEST_CASE("property: real-valued ansatz and real tokens give real overlaps")
{
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
        Gen g(seed);
        const int d = 1 << g.integer(1, 3);
        const QsaInstance inst = g.qsa_instance(d, 4, 3, true);
        for (const Complex &a : branch_terms(inst).amplitudes) {
            CHECK(std::abs(a.imag()) < 1e-10);
        }
    }
}
