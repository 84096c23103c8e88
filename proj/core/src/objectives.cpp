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

#include "qsalab/objectives.hpp"

#include <cmath>
#include <string>

#include "qsalab/errors.hpp"

namespace qsalab {

StepProbabilities StepProbabilities::normalized(std::vector<double> ratios)
{
    std::vector<double> ones(ratios.size(), 1.0);
    return {std::move(ratios), std::move(ones)};
}

void StepProbabilities::validate() const
{
    if (values.empty()) {
        throw ConfigurationError("no step probabilities");
    }
    if (values.size() != normalizers.size()) {
        throw ConfigurationError("probabilities and normalizers differ in length");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw ConfigurationError("step probability " + std::to_string(i) +
                                     " is negative or non-finite");
        }
        if (!std::isfinite(normalizers[i]) || !(normalizers[i] > 0.0)) {
            throw ConfigurationError("normalizer " + std::to_string(i) +
                                     " must be positive and finite");
        }
    }
}

LossValue cross_entropy_loss(const StepProbabilities &p)
{
    p.validate();
    LossValue out;
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        double q = p.ratio(j);
        if (q < kProbabilityFloor) {
            q = kProbabilityFloor;
            out.floored = true;
        }
        acc -= std::log(q);
    }
    out.value = acc / static_cast<double>(p.size());
    return out;
}

LossValue renyi_alpha_loss(const StepProbabilities &p, double alpha)
{
    if (!std::isfinite(alpha) || !(alpha > 0.0)) {
        throw ConfigurationError("Renyi order must be positive and finite");
    }
    if (alpha == 1.0) {
        return cross_entropy_loss(p);
    }
    p.validate();
    LossValue out;
    const double T = static_cast<double>(p.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        double q = p.ratio(j);
        if (q < kProbabilityFloor) {
            q = kProbabilityFloor;
            out.floored = true;
        }
        sum += std::pow(q, 1.0 - alpha);
    }
    // Σ_j u^α q^{1-α} with u = 1/T.
    const double divergence = (std::log(sum) - alpha * std::log(T)) / (alpha - 1.0);
    out.value = divergence + std::log(T);
    return out;
}

LossValue renyi_half_from_expectation(double expectation, std::int64_t T)
{
    if (T < 1) {
        throw ConfigurationError("T must be positive");
    }
    if (std::isnan(expectation)) {
        throw ConfigurationError("expectation is NaN");
    }
    LossValue out;
    if (expectation < kProbabilityFloor) {
        expectation = kProbabilityFloor;
        out.floored = true;
    }
    out.value = -std::log(expectation) + std::log(static_cast<double>(T));
    return out;
}

double perplexity(double loss)
{
    return std::exp(loss);
}

} // namespace qsalab
