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

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace qsalab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Returns log2(value) when value is an exact power of two, otherwise -1.
constexpr int exact_log2(std::int64_t value) noexcept
{
    if (value <= 0 || (value & (value - 1)) != 0) {
        return -1;
    }
    int bits = 0;
    while ((std::int64_t{1} << bits) < value) {
        ++bits;
    }
    return bits;
}

} // namespace qsalab
