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

#include <cmath>
#include <cstring>
#include <filesystem>

#include <unistd.h>

#include "qsalab/checkpoint.hpp"
#include "qsalab/errors.hpp"

using namespace qsalab;
namespace fs = std::filesystem;

namespace {

ModelShape shape_of(ModelKind kind, bool complex_valued)
{
    ModelShape s;
    s.kind = kind;
    s.vocab_size = complex_valued ? 16 : 10;
    s.steps = 4;
    s.token_dim = 4;
    s.layers = 3;
    s.complex_valued = complex_valued;
    return s;
}

bool bit_identical(const std::vector<double> &a, const std::vector<double> &b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Checkpoint make(ModelKind kind, bool complex_valued, std::uint64_t seed)
{
    Checkpoint c;
    c.params = init_model(shape_of(kind, complex_valued), seed);
    c.config_hash = "0123456789abcdef";
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("checkpoints round-trip bit for bit")
{
    for (ModelKind kind : {ModelKind::qsa, ModelKind::scsa, ModelKind::lcsa}) {
        for (bool complex_valued : {false, true}) {
            const Checkpoint c = make(kind, complex_valued, 17);
            const std::string text = checkpoint_to_json(c);
            const Checkpoint back = checkpoint_from_json(text);
            CHECK(back.config_hash == c.config_hash);
            CHECK(back.seed == 17);
            CHECK(back.params.shape.to_json() == c.params.shape.to_json());
            CHECK(bit_identical(get_trainables(back.params, true), get_trainables(c.params, true)));
            CHECK(back.params.embedding.gamma == c.params.embedding.gamma);
            REQUIRE(back.params.embedding.shifts.size() == c.params.embedding.shifts.size());
            for (std::size_t i = 0; i < c.params.embedding.shifts.size(); ++i) {
                CHECK(back.params.embedding.shifts[i] == c.params.embedding.shifts[i]);
            }
            CHECK(checkpoint_to_json(back) == text);
        }
    }
}

TEST_CASE("checkpoint layout")
{
    const nlohmann::json j = nlohmann::json::parse(checkpoint_to_json(make(ModelKind::qsa, false, 1)));
    CHECK(j.at("version") == 1);
    CHECK(j.at("model_kind") == "qsa");
    CHECK(j.at("params").at("circuit.v").at("shape") == nlohmann::json::array({4, 2, 2}));
    CHECK(j.at("params").at("embedding.matrix").at("shape") == nlohmann::json::array({4, 10, 2}));
    CHECK(j.at("params").at("circuit.r").at("shape") == nlohmann::json::array({2}));
}

TEST_CASE("broken checkpoints are rejected with typed errors")
{
    const std::string text = checkpoint_to_json(make(ModelKind::lcsa, false, 2));
    CHECK_THROWS_AS((void)checkpoint_from_json(text.substr(0, text.size() / 2)), ParseError);
    CHECK_THROWS_AS((void)checkpoint_from_json(""), ParseError);
    CHECK_THROWS_AS((void)checkpoint_from_json("[1, 2, 3]"), ParseError);

    nlohmann::json j = nlohmann::json::parse(text);
    j["version"] = 2;
    CHECK_THROWS_AS((void)checkpoint_from_json(j.dump()), UnsupportedVersionError);

    nlohmann::json missing = nlohmann::json::parse(text);
    missing["params"].erase("lcsa.value_map");
    CHECK_THROWS_AS((void)checkpoint_from_json(missing.dump()), ParseError);

    nlohmann::json reshaped = nlohmann::json::parse(text);
    reshaped["params"]["lcsa.value_map"]["shape"] = nlohmann::json::array({3, 4, 2});
    CHECK_THROWS((void)checkpoint_from_json(reshaped.dump()));

    CHECK_THROWS_AS((void)checkpoint_from_json(text, ModelKind::qsa), ModelMismatchError);
    CHECK_NOTHROW((void)checkpoint_from_json(text, ModelKind::lcsa));
}

TEST_CASE("checkpoint files")
{
    const fs::path dir = fs::temp_directory_path() / ("qsalab_ckpt_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const Checkpoint c = make(ModelKind::scsa, false, 3);
    save_checkpoint(c, dir / "model.json");
    const Checkpoint back = load_checkpoint(dir / "model.json", ModelKind::scsa);
    CHECK(bit_identical(get_trainables(back.params, true), get_trainables(c.params, true)));
    CHECK_THROWS_AS((void)load_checkpoint(dir / "model.json", ModelKind::lcsa), ModelMismatchError);
    CHECK_THROWS((void)load_checkpoint(dir / "missing.json"));
    fs::remove_all(dir);
}
