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

#include "qsalab/errors.hpp"
#include "qsalab/trainer.hpp"
#include "support/generators.hpp"

using namespace qsalab;
using testing::Gen;

namespace {

SequenceDataset constant_dataset(int word, int count)
{
    SequenceDataset ds;
    ds.kind = DatasetKind::classical;
    ds.vocab_size = 10;
    ds.steps = 4;
    ds.seed = 0;
    for (int r = 0; r < count; ++r) {
        ds.ids.push_back(r);
        ds.words.push_back(std::vector<int>(5, word));
    }
    ds.validate();
    return ds;
}

TrainConfig config_for(ModelKind kind, int epochs)
{
    TrainConfig c;
    c.model = kind;
    c.epochs = epochs;
    return c;
}

/// Per-class relative error between the trainer's gradient and independent
/// finite differences of sequence_loss: the plain central rule (h = 1e-4) for
/// shift-rule coordinates and a five-point stencil for the rest. The stencil
/// step is small because S-CSA is piecewise smooth (ReLU) and a wide stencil
/// straddles kinks.
struct ClassErrors {
    double circuit = 0.0;
    double other = 0.0;
    double circuit_norm = 0.0;
    double other_norm = 0.0;
};

ClassErrors gradient_errors(const ModelParams &params, std::span<const CVector> inputs,
                            const TrainConfig &config)
{
    const SequenceGradient g = sequence_gradient(params, inputs, config);
    const auto slots = trainable_slots(params, config.embedding_trainable);
    const std::vector<double> base = get_trainables(params, config.embedding_trainable);
    REQUIRE(g.gradient.size() == base.size());
    ModelParams work = params;
    auto loss_at = [&](std::size_t k, double offset) {
        std::vector<double> x = base;
        x[k] += offset;
        set_trainables(work, config.embedding_trainable, x);
        return sequence_loss(work, inputs).value;
    };
    double dc = 0, nc = 0, doth = 0, noth = 0;
    for (std::size_t k = 0; k < base.size(); ++k) {
        double oracle = 0.0;
        if (slots[k].shift_rule) {
            const double h = 1e-4;
            oracle = (loss_at(k, h) - loss_at(k, -h)) / (2 * h);
            dc += std::pow(g.gradient[k] - oracle, 2);
            nc += oracle * oracle;
        } else {
            const double h = 1e-5;
            oracle = (-loss_at(k, 2 * h) + 8 * loss_at(k, h) - 8 * loss_at(k, -h) + loss_at(k, -2 * h)) / (12 * h);
            doth += std::pow(g.gradient[k] - oracle, 2);
            noth += oracle * oracle;
        }
    }
    return {nc > 0 ? std::sqrt(dc / nc) : std::sqrt(dc), noth > 0 ? std::sqrt(doth / noth) : std::sqrt(doth),
            std::sqrt(nc), std::sqrt(noth)};
}

} // namespace

TEST_CASE("gradient modes and config JSON")
{
    CHECK(to_string(GradientMode::parameter_shift) == "parameter-shift");
    CHECK(gradient_mode_from_string("finite-difference") == GradientMode::finite_difference);
    CHECK_THROWS_AS((void)gradient_mode_from_string("adjoint"), ConfigurationError);

    TrainConfig c;
    c.model = ModelKind::lcsa;
    c.learning_rate = 0.02;
    c.epochs = 7;
    const nlohmann::json j = c.to_json();
    CHECK(j.at("schema_version") == 1);
    const TrainConfig back = TrainConfig::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(back.hash() == c.hash());

    nlohmann::json future = j;
    future["schema_version"] = 2;
    CHECK_THROWS_AS((void)TrainConfig::from_json(future), UnsupportedVersionError);
    nlohmann::json unknown = j;
    unknown["momentum"] = 0.5;
    CHECK_THROWS_AS((void)TrainConfig::from_json(unknown), ConfigurationError);
    nlohmann::json versionless = j;
    versionless.erase("schema_version");
    CHECK_THROWS((void)TrainConfig::from_json(versionless));

    TrainConfig partial;
    partial.merge(nlohmann::json{{"schema_version", 1}, {"epochs", 3}});
    CHECK(partial.epochs == 3);
    CHECK(partial.learning_rate == 0.05);
}

TEST_CASE("config hash tracks only result-relevant settings")
{
    TrainConfig a;
    TrainConfig b = a;
    b.threads = 7;
    b.out = "/elsewhere";
    b.data = "other.jsonl";
    b.record_timing = true;
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.learning_rate = 0.051;
    CHECK(a.hash() != b.hash());
    TrainConfig c = a;
    c.seed = 2;
    CHECK(a.hash() != c.hash());
}

TEST_CASE("config validation")
{
    TrainConfig c;
    c.epochs = -1;
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
    c = TrainConfig{};
    c.learning_rate = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
    c = TrainConfig{};
    c.model = ModelKind::lcsa;
    c.shots = 100;
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
    c = TrainConfig{};
    c.shots = 100;
    c.gradient_mode = GradientMode::finite_difference;
    CHECK_THROWS_AS(c.validate(), ConfigurationError);
}

TEST_CASE("dataset compatibility")
{
    const SequenceDataset classical = generate_classical_dataset(10, 4, 5, 1, 2, 1);
    const SequenceDataset quantum = generate_quantum_dataset(build_ising(4, 1), 4, 5, 1, 1);
    const TrainConfig c;
    const ModelShape qsa_shape = c.shape_for(classical);
    CHECK(qsa_shape.vocab_size == 10);
    CHECK(qsa_shape.steps == 4);
    CHECK_FALSE(qsa_shape.complex_valued);
    CHECK(c.shape_for(quantum).complex_valued);
    CHECK_NOTHROW(check_compatibility(qsa_shape, classical));
    CHECK_THROWS_AS(check_compatibility(qsa_shape, quantum), ModelMismatchError);
    ModelShape longer = qsa_shape;
    longer.steps = 8;
    CHECK_THROWS_AS(check_compatibility(longer, classical), ModelMismatchError);
}

TEST_CASE("a zero-epoch run returns the initial parameters")
{
    const SequenceDataset ds = generate_classical_dataset(10, 4, 20, 1, 2, 1);
    TrainConfig c = config_for(ModelKind::lcsa, 0);
    const TrainResult r = train(c, ds);
    CHECK(r.report.epochs.empty());
    const ModelParams init = init_model(c.shape_for(ds), c.seed);
    CHECK(get_trainables(r.params, true) == get_trainables(init, true));
    CHECK(r.report.final_train_loss == doctest::Approx(dataset_loss(init, ds).value).epsilon(1e-14));
}

TEST_CASE("property: trainer gradients match independent finite differences")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Gen g(seed);
        for (ModelKind kind : {ModelKind::qsa, ModelKind::scsa, ModelKind::lcsa}) {
            const bool quantum = seed % 2 == 0;
            SequenceDataset ds = quantum ? generate_quantum_dataset(build_ising(3, seed), 4, 1, seed, seed)
                                         : generate_classical_dataset(10, 4, 1, seed, 3, seed);
            TrainConfig c = config_for(kind, 1);
            c.layers = 2;
            c.seed = seed;
            ModelParams p = init_model(c.shape_for(ds), seed);
            std::vector<double> x = get_trainables(p, true);
            for (double &v : x) {
                v += g.uniform(-0.3, 0.3);
            }
            set_trainables(p, true, x);
            const ClassErrors e = gradient_errors(p, ds.inputs(0), c);
            INFO("seed ", seed, " model ", to_string(kind));
            if (kind == ModelKind::qsa) {
                CHECK(e.circuit_norm > 0.0);
                CHECK(e.circuit < 1e-4);
            }
            CHECK(e.other_norm > 0.0);
            CHECK(e.other < 1e-4);
        }
    }
}

TEST_CASE("finite-difference mode agrees with the shift rule")
{
    const SequenceDataset ds = generate_classical_dataset(10, 4, 1, 3, 2, 3);
    TrainConfig shift = config_for(ModelKind::qsa, 1);
    shift.layers = 2;
    TrainConfig fd = shift;
    fd.gradient_mode = GradientMode::finite_difference;
    const ModelParams p = init_model(shift.shape_for(ds), 3);
    const auto a = sequence_gradient(p, ds.inputs(0), shift).gradient;
    const auto b = sequence_gradient(p, ds.inputs(0), fd).gradient;
    const auto slots = trainable_slots(p, true);
    double diff = 0, norm = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (slots[k].shift_rule) {
            diff += std::pow(a[k] - b[k], 2);
            norm += a[k] * a[k];
        } else {
            CHECK(a[k] == b[k]);
        }
    }
    CHECK(std::sqrt(diff / norm) < 1e-6);
}

TEST_CASE("embedding columns of absent words get exactly zero gradient")
{
    const SequenceDataset ds = constant_dataset(3, 1);
    const TrainConfig c = config_for(ModelKind::lcsa, 1);
    const ModelParams p = init_model(c.shape_for(ds), 2);
    const auto grad = sequence_gradient(p, ds.inputs(0), c).gradient;
    const auto slots = trainable_slots(p, true);
    for (std::size_t k = 0; k < slots.size(); ++k) {
        if (slots[k].group == ParamGroup::embedding && slots[k].column != 3) {
            CHECK(grad[k] == 0.0);
        }
    }
}

TEST_CASE("order-1 Markov data is learned almost perfectly by L-CSA")
{
    const SequenceDataset ds = generate_classical_dataset(10, 4, 300, 7, 1, 7);
    const TrainResult r = train(config_for(ModelKind::lcsa, 200), ds);
    REQUIRE(r.report.epochs.size() == 200);
    CHECK(r.report.final_train_loss >= 0.0);
    CHECK(r.report.final_train_loss < 0.05);
}

TEST_CASE("training is deterministic across runs and thread counts")
{
    const SequenceDataset ds = generate_classical_dataset(10, 4, 40, 5, 2, 5);
    for (ModelKind kind : {ModelKind::qsa, ModelKind::scsa, ModelKind::lcsa}) {
        TrainConfig c = config_for(kind, 3);
        c.layers = 2;
        c.threads = 1;
        const TrainResult a = train(c, ds);
        const TrainResult b = train(c, ds);
        c.threads = 3;
        const TrainResult d = train(c, ds);
        CHECK(a.report.to_csv() == b.report.to_csv());
        CHECK(a.report.to_csv() == d.report.to_csv());
        CHECK(get_trainables(a.params, true) == get_trainables(d.params, true));
        CHECK(a.report.to_json() == d.report.to_json());
    }
}

TEST_CASE("loss report layout")
{
    const SequenceDataset ds = generate_classical_dataset(10, 4, 30, 5, 2, 5);
    const TrainResult r = train(config_for(ModelKind::lcsa, 5), ds);
    const std::string csv = r.report.to_csv();
    CHECK(csv.rfind("epoch,train_loss_offset,train_loss,perplexity,grad_norm,seconds\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    for (std::size_t e = 0; e < r.report.epochs.size(); ++e) {
        const EpochRecord &row = r.report.epochs[e];
        CHECK(row.epoch == static_cast<int>(e));
        CHECK(row.train_loss_offset == doctest::Approx(row.train_loss - std::log(4.0)).epsilon(1e-14));
        CHECK(row.perplexity == doctest::Approx(std::exp(row.train_loss)).epsilon(1e-14));
        CHECK(std::isfinite(row.grad_norm));
        CHECK(row.seconds == 0.0);
    }
    CHECK(r.report.epochs[4].train_loss < r.report.epochs[0].train_loss);
    const nlohmann::json j = r.report.to_json();
    CHECK(j.at("model") == "lcsa");
    CHECK(j.at("epochs").size() == 5);
}

TEST_CASE("evaluating the training set reproduces the final training loss")
{
    const SequenceDataset ds = generate_classical_dataset(10, 4, 30, 5, 2, 5);
    for (ModelKind kind : {ModelKind::qsa, ModelKind::lcsa}) {
        TrainConfig c = config_for(kind, 2);
        c.layers = 2;
        const TrainResult r = train(c, ds);
        const std::vector<SequenceDataset> sets{ds};
        const LossReport e = evaluate(r.params, sets);
        CHECK(std::abs(e.final_train_loss - r.report.final_train_loss) < 1e-10);
        CHECK(e.set_losses.size() == 1);
    }
}

TEST_CASE("evaluate aggregates several test sets")
{
    const SequenceDataset train_set = generate_classical_dataset(10, 4, 30, 5, 2, 5);
    const TrainResult r = train(config_for(ModelKind::lcsa, 3), train_set);
    std::vector<SequenceDataset> sets;
    for (std::uint64_t s = 100; s < 105; ++s) {
        sets.push_back(generate_classical_dataset(10, 4, 30, s, 2, 5));
    }
    const LossReport e = evaluate(r.params, sets);
    REQUIRE(e.set_perplexities.size() == 5);
    double mean = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(e.set_perplexities[k] == doctest::Approx(std::exp(e.set_losses[k])));
        CHECK(e.set_losses[k] == doctest::Approx(dataset_loss(r.params, sets[k]).value).epsilon(1e-14));
        mean += e.set_perplexities[k] / 5;
    }
    double var = 0.0;
    for (double p : e.set_perplexities) {
        var += (p - mean) * (p - mean) / 4;
    }
    CHECK(e.perplexity_mean == doctest::Approx(mean).epsilon(1e-14));
    CHECK(e.perplexity_stdev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    CHECK_THROWS_AS((void)evaluate(r.params, std::span<const SequenceDataset>{}), ConfigurationError);
}

TEST_CASE("a perfect predictor has perplexity one")
{
    const SequenceDataset ds = constant_dataset(6, 10);
    for (ModelKind kind : {ModelKind::qsa, ModelKind::lcsa}) {
        TrainConfig c = config_for(kind, 0);
        c.gamma = 0.0;
        ModelParams p = init_model(c.shape_for(ds), 4);
        p.embedding.gamma = 0.0;
        p.circuit.v = AnsatzParams::zeros(p.circuit.v.num_qubits, 0);
        p.circuit.w = AnsatzParams::zeros(p.circuit.w.num_qubits, 0);
        p.circuit.r = PhaseLayerParams::zeros(static_cast<int>(p.circuit.r.angles.size()));
        p.shape.layers = 0;
        p.lcsa = LcsaParams::identity(4);
        const std::vector<SequenceDataset> sets{ds};
        const LossReport e = evaluate(p, sets);
        CHECK(std::abs(e.perplexity_mean - 1.0) < 1e-6);
        CHECK(std::abs(e.set_losses[0]) < 1e-6);
    }
}

TEST_CASE("training rejects empty data and reports numeric blow-ups")
{
    SequenceDataset empty = generate_classical_dataset(10, 4, 1, 1, 2, 1);
    empty.ids.clear();
    empty.words.clear();
    CHECK_THROWS_AS((void)train(config_for(ModelKind::lcsa, 1), empty), ConfigurationError);
    const std::vector<SequenceDataset> sets{empty};
    CHECK_THROWS_AS((void)evaluate(init_model(config_for(ModelKind::lcsa, 1).shape_for(empty), 1), sets),
                    ConfigurationError);

    const SequenceDataset ds = generate_classical_dataset(10, 4, 10, 1, 2, 1);
    TrainConfig wild = config_for(ModelKind::scsa, 5);
    wild.learning_rate = 1e300;
    wild.embedding_learning_rate = 1e300;
    try {
        (void)train(wild, ds);
        FAIL("expected a numeric error");
    } catch (const NumericError &e) {
        const nlohmann::json snapshot = nlohmann::json::parse(e.snapshot());
        CHECK(snapshot.contains("epoch"));
    }
}

TEST_CASE("mini-batches are deterministic and still learn")
{
    const SequenceDataset ds = generate_classical_dataset(10, 4, 60, 2, 2, 2);
    TrainConfig c = config_for(ModelKind::lcsa, 10);
    c.batch_size = 16;
    const TrainResult a = train(c, ds);
    const TrainResult b = train(c, ds);
    CHECK(a.report.to_csv() == b.report.to_csv());
    CHECK(a.report.epochs.back().train_loss < a.report.epochs.front().train_loss);
    TrainConfig full = c;
    full.batch_size = 0;
    CHECK(train(full, ds).report.to_csv() != a.report.to_csv());
}

TEST_CASE("shot-based gradients are seeded and close to exact ones")
{
    const SequenceDataset ds = generate_classical_dataset(10, 4, 1, 4, 2, 4);
    TrainConfig exact = config_for(ModelKind::qsa, 1);
    exact.layers = 1;
    TrainConfig sampled = exact;
    sampled.shots = 200000;
    const ModelParams p = init_model(exact.shape_for(ds), 4);
    const auto g0 = sequence_gradient(p, ds.inputs(0), exact).gradient;
    const auto g1 = sequence_gradient(p, ds.inputs(0), sampled, 11).gradient;
    const auto g2 = sequence_gradient(p, ds.inputs(0), sampled, 11).gradient;
    CHECK(g1 == g2);
    const auto slots = trainable_slots(p, true);
    double diff = 0, norm = 0;
    for (std::size_t k = 0; k < slots.size(); ++k) {
        if (slots[k].shift_rule) {
            diff += std::pow(g0[k] - g1[k], 2);
            norm += g0[k] * g0[k];
        }
    }
    CHECK(std::sqrt(diff / norm) < 0.25);
    CHECK(std::sqrt(diff / norm) > 0.0);
}
