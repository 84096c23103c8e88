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


#include <benchmark/benchmark.h>

#include "qsalab/qsa_engine.hpp"
#include "qsalab/sequence_data.hpp"
#include "qsalab/statevector.hpp"
#include "qsalab/trainer.hpp"
#include "support/generators.hpp"

namespace {

using namespace qsalab;
using testing::Gen;

// A k-qubit dense block on the low qubits of an n-qubit register.
void BM_ApplyUnitary(benchmark::State &state)
{
    const int n = static_cast<int>(state.range(0));
    const int k = static_cast<int>(state.range(1));
    Gen g(1);
    StateVector psi = StateVector::from_vector(g.complex_vector(1 << n).normalized());
    std::vector<int> targets(static_cast<std::size_t>(k));
    for (int q = 0; q < k; ++q) {
        targets[static_cast<std::size_t>(q)] = q;
    }
    const UnitaryBlock block(g.unitary(1 << k), targets);
    for (auto _ : state) {
        psi = apply_unitary(psi, block);
        benchmark::DoNotOptimize(psi);
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_ApplyUnitary)->Args({8, 1})->Args({8, 2})->Args({12, 2})->Args({16, 2})->Args({16, 4});

void BM_CircuitExpectation(benchmark::State &state)
{
    Gen g(2);
    const QsaInstance inst = g.qsa_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(circuit_expectation(inst));
    }
}
BENCHMARK(BM_CircuitExpectation)->Args({4, 4})->Args({4, 8})->Args({8, 4})->Args({8, 8});

void BM_AnalyticExpectation(benchmark::State &state)
{
    Gen g(2);
    const QsaInstance inst = g.qsa_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytic_expectation(inst));
    }
}
BENCHMARK(BM_AnalyticExpectation)->Args({4, 4})->Args({4, 8})->Args({8, 4})->Args({8, 8});

// One full-batch epoch on the default classical dataset (D = 10, T = 4, 300 sequences).
void BM_TrainingEpoch(benchmark::State &state)
{
    const auto kind = static_cast<ModelKind>(state.range(0));
    const SequenceDataset ds = generate_classical_dataset(10, 4, 300, 7, 2, 7);
    TrainConfig c;
    c.model = kind;
    c.epochs = 1;
    c.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(c, ds));
    }
    state.SetLabel(to_string(kind));
}
BENCHMARK(BM_TrainingEpoch)
    ->Arg(static_cast<int>(ModelKind::qsa))
    ->Arg(static_cast<int>(ModelKind::scsa))
    ->Arg(static_cast<int>(ModelKind::lcsa))
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

} // namespace

BENCHMARK_MAIN();
