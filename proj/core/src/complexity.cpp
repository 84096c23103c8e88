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

#include "qsalab/complexity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "qsalab/errors.hpp"
#include "qsalab/types.hpp"

namespace qsalab {

namespace {

int ceil_log2(std::int64_t value)
{
    int bits = 0;
    while ((std::int64_t{1} << bits) < value) {
        ++bits;
    }
    return bits;
}

std::string format_double(double x)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

} // namespace

std::string to_string(CostVariant variant)
{
    switch (variant) {
    case CostVariant::qsa_amplitude:
        return "qsa-amplitude";
    case CostVariant::qsa_basis:
        return "qsa-basis";
    case CostVariant::csa:
        return "csa";
    }
    return "csa";
}

CostVariant cost_variant_from_string(const std::string &text)
{
    for (CostVariant v : {CostVariant::qsa_amplitude, CostVariant::qsa_basis, CostVariant::csa}) {
        if (to_string(v) == text) {
            return v;
        }
    }
    throw ConfigurationError("unknown cost variant '" + text + "'");
}

std::string to_string(ScalingAxis axis)
{
    return axis == ScalingAxis::T ? "T" : "d";
}

ScalingAxis scaling_axis_from_string(const std::string &text)
{
    if (text == "T") {
        return ScalingAxis::T;
    }
    if (text == "d") {
        return ScalingAxis::d;
    }
    throw ConfigurationError("unknown scaling axis '" + text + "'");
}

std::int64_t CostBreakdown::term(const std::string &name) const
{
    for (const auto &[n, c] : terms) {
        if (n == name) {
            return c;
        }
    }
    throw ConfigurationError("no cost term '" + name + "'");
}

CostBreakdown count_gates(CostVariant variant, std::int64_t T, std::int64_t d, std::int64_t D,
                          std::int64_t L)
{
    if (T < 1 || d < 1 || D < 1 || L < 1) {
        throw ConfigurationError("cost model sizes must all be at least 1");
    }
    CostBreakdown b{variant, T, d, D, L, {}, 0};
    switch (variant) {
    case CostVariant::qsa_amplitude: {
        const int n = exact_log2(d);
        if (n < 0 || exact_log2(T) < 0) {
            throw ConfigurationError("qsa-amplitude needs d and T to be powers of two");
        }
        b.terms = {{"state_prep", T * d * d},
                   {"controlled_ops", 2 * T * d * d},
                   {"variational", 2 * L * n},
                   {"embedding", T * d * D}};
        break;
    }
    case CostVariant::qsa_basis: {
        if (D < 2) {
            throw ConfigurationError("qsa-basis needs D >= 2");
        }
        const std::int64_t n = ceil_log2(D);
        b.terms = {{"state_prep", T * n}, {"controlled_ops", T * T * n}};
        break;
    }
    case CostVariant::csa:
        b.terms = {{"attention", T * T * d}, {"value_key_query", T * d * d}, {"anti_embedding", T * d * D}};
        break;
    }
    for (const auto &[name, count] : b.terms) {
        b.total += count;
    }
    return b;
}

ScalingFit fit_scaling(CostVariant variant, ScalingAxis axis, std::span<const std::int64_t> grid,
                       std::int64_t T, std::int64_t d, std::int64_t D, std::int64_t L)
{
    if (grid.size() < 4) {
        throw ConfigurationError("scaling fit needs at least four grid points");
    }
    const double ratio = static_cast<double>(grid[1]) / static_cast<double>(grid[0]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1])) {
            throw ConfigurationError("scaling grid must be positive and strictly increasing");
        }
        if (i > 0) {
            const double r = static_cast<double>(grid[i]) / static_cast<double>(grid[i - 1]);
            if (std::abs(r - ratio) > 1e-9 * ratio) {
                throw ConfigurationError("scaling grid must be geometrically spaced");
            }
        }
    }
    ScalingFit fit{variant, axis, 0.0, 0.0, {grid.begin(), grid.end()}, {}};
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::int64_t g : grid) {
        const CostBreakdown b = axis == ScalingAxis::T ? count_gates(variant, g, d, D, L)
                                                       : count_gates(variant, T, g, D, L);
        fit.totals.push_back(b.total);
        const double x = std::log(static_cast<double>(g));
        const double y = std::log(static_cast<double>(b.total));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(grid.size());
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

std::vector<CrossoverRow> crossover_report(std::span<const std::int64_t> T_values,
                                           std::span<const std::int64_t> d_values, std::int64_t D,
                                           std::int64_t L)
{
    if (T_values.empty() || d_values.empty()) {
        throw ConfigurationError("crossover ranges must be non-empty");
    }
    std::vector<CrossoverRow> rows;
    for (std::int64_t T : T_values) {
        for (std::int64_t d : d_values) {
            CrossoverRow row{T, d, D, L, 0, 0, 0, {}};
            row.qsa_amplitude = count_gates(CostVariant::qsa_amplitude, T, d, D, L).total;
            row.qsa_basis = count_gates(CostVariant::qsa_basis, T, d, D, L).total;
            row.csa = count_gates(CostVariant::csa, T, d, D, L).total;
            const std::int64_t best = std::min({row.qsa_amplitude, row.qsa_basis, row.csa});
            if (row.qsa_amplitude == best) {
                row.winners.push_back(CostVariant::qsa_amplitude);
            }
            if (row.qsa_basis == best) {
                row.winners.push_back(CostVariant::qsa_basis);
            }
            if (row.csa == best) {
                row.winners.push_back(CostVariant::csa);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string breakdown_csv(std::span<const CostBreakdown> rows)
{
    std::string out = "variant,T,d,D,L,term,count\n";
    for (const CostBreakdown &b : rows) {
        const std::string prefix = to_string(b.variant) + ',' + std::to_string(b.T) + ',' +
                                   std::to_string(b.d) + ',' + std::to_string(b.D) + ',' +
                                   std::to_string(b.L) + ',';
        for (const auto &[name, count] : b.terms) {
            out += prefix + name + ',' + std::to_string(count) + '\n';
        }
        out += prefix + "total," + std::to_string(b.total) + '\n';
    }
    return out;
}

std::string crossover_csv(std::span<const CrossoverRow> rows)
{
    std::string out = "T,d,D,L,qsa_amplitude,qsa_basis,csa,winner\n";
    for (const CrossoverRow &r : rows) {
        std::string winner;
        for (CostVariant v : r.winners) {
            winner += (winner.empty() ? "" : "+") + to_string(v);
        }
        out += std::to_string(r.T) + ',' + std::to_string(r.d) + ',' + std::to_string(r.D) + ',' +
               std::to_string(r.L) + ',' + std::to_string(r.qsa_amplitude) + ',' +
               std::to_string(r.qsa_basis) + ',' + std::to_string(r.csa) + ',' + winner + '\n';
    }
    return out;
}

std::string slopes_csv(std::span<const ScalingFit> fits)
{
    std::string out = "variant,axis,slope,intercept,points\n";
    for (const ScalingFit &f : fits) {
        std::string points;
        for (std::int64_t g : f.grid) {
            points += (points.empty() ? "" : " ") + std::to_string(g);
        }
        out += to_string(f.variant) + ',' + to_string(f.axis) + ',' + format_double(f.slope) +
               ',' + format_double(f.intercept) + ',' + points + '\n';
    }
    return out;
}

} // namespace qsalab
