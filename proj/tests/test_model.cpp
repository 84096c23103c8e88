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
#include <numeric>
#include <vector>

#include "qsalab/errors.hpp"
#include "qsalab/model.hpp"
#include "support/generators.hpp"

using namespace qsalab;
using testing::Gen;

namespace {

ModelShape shape_of(ModelKind kind, bool complex_valued = false)
{
    ModelShape s;
    s.kind = kind;
    s.vocab_size = 10;
    s.steps = 4;
    s.token_dim = 4;
    s.layers = 5;
    s.complex_valued = complex_valued;
    return s;
}

std::vector<CVector> words(std::initializer_list<int> ids, int vocab = 10)
{
    const Vocabulary v(vocab);
    std::vector<CVector> out;
    for (int w : ids) {
        out.push_back(v.one_hot(w));
    }
    return out;
}

std::size_t count_group(const std::vector<ParamSlot> &slots, ParamGroup group)
{
    return static_cast<std::size_t>(std::count_if(slots.begin(), slots.end(),
                                                  [group](const ParamSlot &s) { return s.group == group; }));
}

} // namespace

TEST_CASE("model kind names")
{
    for (ModelKind k : {ModelKind::qsa, ModelKind::scsa, ModelKind::lcsa}) {
        CHECK(model_kind_from_string(to_string(k)) == k);
    }
    CHECK(to_string(ModelKind::scsa) == "scsa");
    CHECK_THROWS_AS((void)model_kind_from_string("transformer"), ConfigurationError);
}

TEST_CASE("shape validation and JSON")
{
    ModelShape s = shape_of(ModelKind::qsa);
    CHECK_NOTHROW(s.validate());
    CHECK(ModelShape::from_json(s.to_json()).to_json() == s.to_json());
    s.token_dim = 3;
    CHECK_THROWS_AS(s.validate(), ConfigurationError);
    s = shape_of(ModelKind::qsa);
    s.steps = 3;
    CHECK_THROWS_AS(s.validate(), ConfigurationError);
    s = shape_of(ModelKind::lcsa);
    s.steps = 3;
    s.token_dim = 3;
    CHECK_NOTHROW(s.validate());
    s.token_dim = 10;
    CHECK_THROWS_AS(s.validate(), ConfigurationError);
    s = shape_of(ModelKind::scsa);
    CHECK(s.resolved_key_dim() == 4);
    CHECK(s.resolved_hidden() == 16);
}

TEST_CASE("trainable slot counts")
{
    const ModelParams qsa = init_model(shape_of(ModelKind::qsa), 1);
    const auto qsa_slots = trainable_slots(qsa, true);
    CHECK(count_group(qsa_slots, ParamGroup::embedding) == 40);
    CHECK(count_group(qsa_slots, ParamGroup::circuit) == 24 + 24 + 2);
    CHECK(trainable_slots(qsa, false).size() == 50);

    ModelShape real_ansatz = shape_of(ModelKind::qsa);
    real_ansatz.phase_layer = false;
    CHECK(count_group(trainable_slots(init_model(real_ansatz, 1), true), ParamGroup::circuit) == 24);

    const ModelParams complex_qsa = init_model(shape_of(ModelKind::qsa, true), 1);
    CHECK(count_group(trainable_slots(complex_qsa, true), ParamGroup::embedding) == 80);

    const ModelParams scsa = init_model(shape_of(ModelKind::scsa), 1);
    CHECK(count_group(trainable_slots(scsa, true), ParamGroup::weights) ==
          16 + 16 + 16 + 64 + 16 + 64 + 4 + 40);

    const ModelParams lcsa = init_model(shape_of(ModelKind::lcsa), 1);
    CHECK(count_group(trainable_slots(lcsa, true), ParamGroup::weights) == 32);
    CHECK(count_group(trainable_slots(init_model(shape_of(ModelKind::lcsa, true), 1), true),
                      ParamGroup::weights) == 64);

    for (const ParamSlot &slot : qsa_slots) {
        CHECK(slot.shift_rule == (slot.group == ParamGroup::circuit));
        CHECK((slot.column >= 0) == (slot.group == ParamGroup::embedding));
    }
    // embedding coordinates run column by column
    CHECK(qsa_slots[0].column == 0);
    CHECK(qsa_slots[3].column == 0);
    CHECK(qsa_slots[4].column == 1);
}

TEST_CASE("get and set trainables round-trip")
{
    for (ModelKind kind : {ModelKind::qsa, ModelKind::scsa, ModelKind::lcsa}) {
        for (bool complex_valued : {false, true}) {
            ModelParams p = init_model(shape_of(kind, complex_valued), 3);
            const std::vector<double> original = get_trainables(p, true);
            REQUIRE(original.size() == trainable_slots(p, true).size());
            Gen g(4);
            std::vector<double> changed = original;
            for (double &x : changed) {
                x += g.uniform(-0.01, 0.01);
            }
            set_trainables(p, true, changed);
            CHECK(get_trainables(p, true) == changed);
            set_trainables(p, true, original);
            CHECK(get_trainables(p, true) == original);
            CHECK_THROWS_AS(set_trainables(p, true, std::vector<double>(3, 0.0)), ConfigurationError);
        }
    }
}

TEST_CASE("freezing the embedding leaves it untouched")
{
    ModelParams p = init_model(shape_of(ModelKind::lcsa), 5);
    const CMatrix before = p.embedding.matrix;
    std::vector<double> values = get_trainables(p, false);
    for (double &x : values) {
        x *= 2;
    }
    set_trainables(p, false, values);
    CHECK(p.embedding.matrix == before);
}

TEST_CASE("initialization is seeded")
{
    for (ModelKind kind : {ModelKind::qsa, ModelKind::scsa, ModelKind::lcsa}) {
        const ModelParams a = init_model(shape_of(kind), 11);
        const ModelParams b = init_model(shape_of(kind), 11);
        const ModelParams c = init_model(shape_of(kind), 12);
        CHECK(get_trainables(a, true) == get_trainables(b, true));
        CHECK(get_trainables(a, true) != get_trainables(c, true));
    }
    const ModelParams q = init_model(shape_of(ModelKind::qsa), 11);
    for (double a : q.circuit.v.angles) {
        CHECK(std::abs(a) <= 0.1);
    }
    CHECK(q.embedding.matrix.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(q.embedding.gamma == 0.1);

    ModelShape real_ansatz = shape_of(ModelKind::qsa);
    real_ansatz.phase_layer = false;
    const ModelParams r = init_model(real_ansatz, 11);
    for (std::size_t k = 1; k < r.circuit.v.angles.size(); k += 2) {
        CHECK(r.circuit.v.angles[k] == 0.0);
        CHECK(r.circuit.w.angles[k] == 0.0);
    }
    for (double a : r.circuit.r.angles) {
        CHECK(a == 0.0);
    }
}

TEST_CASE("QSA instance and loss follow the circuit definitions")
{
    const ModelParams p = init_model(shape_of(ModelKind::qsa), 2);
    const auto in = words({3, 1, 4, 1, 5});
    const QsaInstance inst = make_qsa_instance(p, in);
    REQUIRE(inst.tokens.size() == 5);
    REQUIRE(inst.shifted_targets.size() == 4);
    const EmbeddedSequence e = embed_sequence(in, p.embedding);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK((inst.tokens[i].state.to_vector() - e.tokens[i] / e.tokens[i].norm()).cwiseAbs().maxCoeff() < 1e-14);
    }
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK((inst.shifted_targets[i].raw - e.shifted[i + 1]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(sequence_loss(p, in).value == doctest::Approx(qsa_renyi_half_loss(inst).value).epsilon(1e-14));
    CHECK(step_probabilities(p, in) == postselected_branch_probabilities(inst));
}

TEST_CASE("baseline losses are Renyi-1/2 over the step probabilities")
{
    const auto in = words({0, 9, 2, 2, 7});
    for (ModelKind kind : {ModelKind::scsa, ModelKind::lcsa}) {
        const ModelParams p = init_model(shape_of(kind), 6);
        const std::vector<double> probs = step_probabilities(p, in);
        REQUIRE(probs.size() == 4);
        CHECK(sequence_loss(p, in).value ==
              doctest::Approx(renyi_alpha_loss(StepProbabilities::normalized(probs), 0.5).value).epsilon(1e-14));
    }

    const ModelParams l = init_model(shape_of(ModelKind::lcsa), 6);
    const EmbeddedSequence e = embed_sequence(in, l.embedding);
    const std::vector<CVector> tokens(e.tokens.begin(), e.tokens.begin() + 4);
    const std::vector<CVector> targets(e.shifted.begin() + 1, e.shifted.end());
    CHECK(step_probabilities(l, in) == lcsa_forward(tokens, targets, l.lcsa));

    const ModelParams s = init_model(shape_of(ModelKind::scsa), 6);
    CHECK(step_probabilities(s, in) == scsa_forward(in, s.embedding, s.scsa));
}

TEST_CASE("word scores")
{
    const auto in = words({3, 1, 4, 1, 5});
    for (ModelKind kind : {ModelKind::qsa, ModelKind::scsa, ModelKind::lcsa}) {
        const ModelParams p = init_model(shape_of(kind), 8);
        const auto scores = word_scores(p, in);
        REQUIRE(scores.size() == 4);
        for (const auto &row : scores) {
            REQUIRE(row.size() == 10);
            for (double s : row) {
                CHECK(s >= 0.0);
                CHECK(s <= 1.0 + 1e-12);
            }
            if (kind == ModelKind::scsa) {
                CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0));
            }
        }
    }

    // QSA scores are overlaps of the predicted state with the normalized word embeddings
    const ModelParams q = init_model(shape_of(ModelKind::qsa), 8);
    const QsaInstance inst = make_qsa_instance(q, in);
    const auto scores = word_scores(q, in);
    const CVector z = predict_token_state(inst, 2).state.to_vector();
    for (int w = 0; w < 10; ++w) {
        const CVector e = q.embedding.matrix.col(w) / q.embedding.matrix.col(w).norm();
        CHECK(scores[1][static_cast<std::size_t>(w)] == doctest::Approx(std::norm(e.dot(z))).epsilon(1e-12));
    }
}

TEST_CASE("inputs must match the model")
{
    const ModelParams p = init_model(shape_of(ModelKind::lcsa), 1);
    CHECK_THROWS_AS((void)sequence_loss(p, words({1, 2, 3})), ConfigurationError);
    CHECK_THROWS_AS((void)sequence_loss(p, words({1, 2, 3, 4, 5}, 12)), ConfigurationError);
}
