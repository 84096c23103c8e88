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

#include "qsalab/ansatz.hpp"
#include "qsalab/encodings.hpp"
#include "qsalab/objectives.hpp"
#include "qsalab/statevector.hpp"

namespace qsalab {

/// Everything the attention circuit needs for one sequence.
///
/// `tokens` holds x_1..x_{T+1} (attention inputs, positional shift included)
/// and `shifted_targets` holds x̃_2..x̃_{T+1}; the target for step j (1-based)
/// is `shifted_targets[j - 1]`.
struct QsaInstance {
    std::vector<EncodedToken> tokens;
    std::vector<EncodedToken> shifted_targets;
    RegisterLayout layout;
    AnsatzParams params_v;
    AnsatzParams params_w;
    PhaseLayerParams params_r;

    [[nodiscard]] std::int64_t steps() const noexcept { return layout.steps(); }
    void validate() const;
};

/// Input state and step-controlled projections of one instance. They depend
/// only on the data, so repeated evaluations with different V, W, R reuse
/// them.
class PreparedCircuit {
  public:
    explicit PreparedCircuit(const QsaInstance &instance, BlockTally *tally = nullptr);

    [[nodiscard]] const RegisterLayout &layout() const noexcept { return layout_; }
    [[nodiscard]] const StateVector &input_state() const noexcept { return input_; }

    /// State after V_A ⊗ W_B and the controlled projections (Ũ_{j+1}^†)_A,
    /// (U_j^†)_B; before R and the final Hadamards.
    [[nodiscard]] StateVector projected_state(const CMatrix &v, const CMatrix &w,
                                              BlockTally *tally = nullptr) const;
    /// Same, but with only the B projection applied (inference-time circuit).
    [[nodiscard]] StateVector inference_state(const CMatrix &v, const CMatrix &w) const;

    /// All-zeros expectation of the full circuit.
    [[nodiscard]] double expectation(const CMatrix &v, const CMatrix &w, const CMatrix &r,
                                     BlockTally *tally = nullptr) const;
    /// Final state whose |0...0> population is `expectation`.
    [[nodiscard]] StateVector final_state(const CMatrix &v, const CMatrix &w, const CMatrix &r,
                                          BlockTally *tally = nullptr) const;

  private:
    RegisterLayout layout_;
    StateVector input_;
    ControlledBlocks target_projections_; // on A
    ControlledBlocks token_projections_;  // on B
};

/// Full state-vector route: prepare, V⊗W, controlled projections, R, H on C.
[[nodiscard]] double circuit_expectation(const QsaInstance &instance, BlockTally *tally = nullptr);

/// Branch quantities of the overlap formula for step j = 1..T.
struct BranchTerms {
    std::vector<Complex> amplitudes;  ///< a_j = Σ_{i<=j} <x̃_{j+1}|V|x_i><x_j|W|x_i>
    std::vector<double> prefix_norms; ///< M_j = || Σ_{i<=j} |x_i>|x_i> ||^2
    std::vector<double> phases;       ///< phase the R layer puts on branch j
};

[[nodiscard]] BranchTerms branch_terms(const QsaInstance &instance);

/// |(1/T) Σ_j e^{iφ_j} a_j / √M_j|^2, computed without any 2^{2n+t} state.
[[nodiscard]] double analytic_expectation(const QsaInstance &instance);

/// -log(circuit_expectation) + log T.
[[nodiscard]] LossValue qsa_loss(const QsaInstance &instance);

/// Rényi-½ cross-entropy of the instance's step amplitudes. The circuit's
/// final Hadamard projection adds a 1/T factor on top of the 1/√T input
/// weights, so this is qsa_loss - log T = -log(circuit_expectation).
[[nodiscard]] LossValue qsa_renyi_half_loss(const QsaInstance &instance);

struct TokenPrediction {
    StateVector state; ///< normalized, on n qubits
    double weight = 0.0; ///< || Σ_{i<=j} <x_j|W|x_i> V|x_i> ||
};

/// Post-select step register on j-1 and register B on |x_j>; register A then
/// holds the predicted token. Throws DegeneratePredictionError if the branch
/// vanishes.
[[nodiscard]] TokenPrediction predict_token_state(const QsaInstance &instance, int step);

/// For each step j, P(A projects on x̃_{j+1} | B projected on x_j) read off the
/// simulated state.
[[nodiscard]] std::vector<double> postselected_branch_probabilities(const QsaInstance &instance);

} // namespace qsalab
