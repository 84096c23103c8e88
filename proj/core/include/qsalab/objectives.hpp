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
#include <vector>

namespace qsalab {

/// Probabilities below this are clamped before any logarithm.
inline constexpr double kProbabilityFloor = 1e-30;

/// A loss value plus whether any term hit kProbabilityFloor.
struct LossValue {
    double value = 0.0;
    bool floored = false;
};

/// Per-step probabilities p_{j+1} of the true next datum together with
/// their normalizers N_{j+1}. Losses only ever see the ratios p / N.
struct StepProbabilities {
    std::vector<double> values;
    std::vector<double> normalizers;

    /// Ratios that are already normalized (N = 1).
    static StepProbabilities normalized(std::vector<double> ratios);

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double ratio(std::size_t step) const { return values[step] / normalizers[step]; }
    void validate() const;
};

/// -(1/T) Σ log(p_j / N_j), natural log.
[[nodiscard]] LossValue cross_entropy_loss(const StepProbabilities &p);

/// D_α(u_T || p/N) + log T with D_α(u||q) = log(Σ_j u_j^α q_j^{1-α}) / (α - 1).
/// alpha == 1 is the cross-entropy limit; alpha must be positive and finite.
[[nodiscard]] LossValue renyi_alpha_loss(const StepProbabilities &p, double alpha);

/// -log(expectation) + log T.
[[nodiscard]] LossValue renyi_half_from_expectation(double expectation, std::int64_t T);

[[nodiscard]] double perplexity(double loss);

/// Training/test perplexities published for the two generative tasks. Kept
/// for documentation and report annotations only.
namespace published {
inline constexpr double kClassicalQsaTrain = 3.158;
inline constexpr double kClassicalScsaTrain = 680.44;
inline constexpr double kClassicalLcsaTrain = 3.35;
inline constexpr double kClassicalQsaTest = 6.62;
inline constexpr double kClassicalScsaTest = 858.0;
inline constexpr double kClassicalLcsaTest = 3.39;
inline constexpr double kIsingQsaTrain = 7.17;
inline constexpr double kIsingScsaTrain = 6.64;
inline constexpr double kIsingLcsaTrain = 2.59;
inline constexpr double kIsingQsaTest = 5.6;
inline constexpr double kIsingScsaTest = 8.4;
inline constexpr double kIsingLcsaTest = 2.8;
} // namespace published

} // namespace qsalab
