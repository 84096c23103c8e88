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
#include <string>
#include <utility>
#include <vector>

namespace qsalab {

enum class CostVariant { qsa_amplitude, qsa_basis, csa };

[[nodiscard]] std::string to_string(CostVariant variant);
[[nodiscard]] CostVariant cost_variant_from_string(const std::string &text);

/// Gate counts in units of one elementary two-level operation; constant
/// factors are 1, only the exponents carry meaning.
///
///   qsa-amplitude: state_prep T d², controlled_ops 2 T d², variational 2 L log2 d,
///                  embedding T d D
///   qsa-basis:     state_prep T ⌈log2 D⌉, controlled_ops T² ⌈log2 D⌉
///   csa:           attention T² d, value_key_query T d², anti_embedding T d D
struct CostBreakdown {
    CostVariant variant = CostVariant::qsa_amplitude;
    std::int64_t T = 0;
    std::int64_t d = 0;
    std::int64_t D = 0;
    std::int64_t L = 0;
    std::vector<std::pair<std::string, std::int64_t>> terms;
    std::int64_t total = 0;

    [[nodiscard]] std::int64_t term(const std::string &name) const;
};

/// All sizes must be >= 1; qsa-amplitude additionally needs d and T to be
/// powers of two and qsa-basis needs D >= 2.
[[nodiscard]] CostBreakdown count_gates(CostVariant variant, std::int64_t T, std::int64_t d,
                                        std::int64_t D, std::int64_t L);

enum class ScalingAxis { T, d };

[[nodiscard]] std::string to_string(ScalingAxis axis);
[[nodiscard]] ScalingAxis scaling_axis_from_string(const std::string &text);

struct ScalingFit {
    CostVariant variant = CostVariant::qsa_amplitude;
    ScalingAxis axis = ScalingAxis::T;
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<std::int64_t> grid;
    std::vector<std::int64_t> totals;
};

/// Least-squares slope of log(total) against log(axis value). The other
/// sizes stay at `T`, `d`, `D`, `L`. The grid needs at least four strictly
/// increasing points with a constant ratio.
[[nodiscard]] ScalingFit fit_scaling(CostVariant variant, ScalingAxis axis,
                                     std::span<const std::int64_t> grid, std::int64_t T,
                                     std::int64_t d, std::int64_t D, std::int64_t L);

struct CrossoverRow {
    std::int64_t T = 0;
    std::int64_t d = 0;
    std::int64_t D = 0;
    std::int64_t L = 0;
    std::int64_t qsa_amplitude = 0;
    std::int64_t qsa_basis = 0;
    std::int64_t csa = 0;
    /// Variants with the minimal total; more than one on a tie.
    std::vector<CostVariant> winners;
};

[[nodiscard]] std::vector<CrossoverRow> crossover_report(std::span<const std::int64_t> T_values,
                                                         std::span<const std::int64_t> d_values,
                                                         std::int64_t D, std::int64_t L);

/// variant,T,d,D,L,term,count (one row per term plus a "total" row).
[[nodiscard]] std::string breakdown_csv(std::span<const CostBreakdown> rows);
/// T,d,D,L,qsa_amplitude,qsa_basis,csa,winner (ties joined with '+').
[[nodiscard]] std::string crossover_csv(std::span<const CrossoverRow> rows);
/// variant,axis,slope,intercept,points
[[nodiscard]] std::string slopes_csv(std::span<const ScalingFit> fits);

} // namespace qsalab
