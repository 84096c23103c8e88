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

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "manifest.hpp"
#include "qsalab/checkpoint.hpp"
#include "qsalab/complexity.hpp"
#include "qsalab/dataset_io.hpp"
#include "qsalab/errors.hpp"
#include "qsalab/sequence_data.hpp"
#include "qsalab/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCompatibility = 4;

using Clock = std::chrono::steady_clock;

struct Common {
    bool record_timing = false;
    Clock::time_point start = Clock::now();

    [[nodiscard]] double wall() const
    {
        return record_timing ? std::chrono::duration<double>(Clock::now() - start).count() : 0.0;
    }
};

fs::path manifest_path_for(const fs::path &output)
{
    fs::path p = output;
    p += ".manifest.json";
    return p;
}

std::string format_double(double x)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string kind;
    int vocab = 0;
    int qubits = 0;
    int length = 5;
    int count = 300;
    std::uint64_t seed = 7;
    int order = 2;
    std::optional<std::uint64_t> chain_seed;
    std::optional<std::uint64_t> model_seed;
    std::string out;
};

int run_generate(const GenerateArgs &a, const Common &common, const std::vector<std::string> &argv)
{
    if (a.length < 2) {
        throw CLI::ValidationError("--len", "sequences need at least two entries");
    }
    const int steps = a.length - 1;
    qsalab::SequenceDataset ds;
    json config = {{"kind", a.kind}, {"len", a.length}, {"count", a.count}, {"seed", a.seed}};
    if (a.kind == "classical") {
        if (a.qubits != 0) {
            throw CLI::ValidationError("--qubits", "only applies to quantum datasets");
        }
        const int vocab = a.vocab != 0 ? a.vocab : 10;
        const std::uint64_t chain_seed = a.chain_seed.value_or(a.seed);
        ds = qsalab::generate_classical_dataset(vocab, steps, a.count, a.seed, a.order, chain_seed);
        config["vocab"] = vocab;
        config["order"] = a.order;
        config["chain_seed"] = chain_seed;
    } else {
        int qubits = a.qubits;
        if (a.vocab != 0) {
            const int from_vocab = qsalab::exact_log2(a.vocab);
            if (from_vocab < 1 || (qubits != 0 && qubits != from_vocab)) {
                throw CLI::ValidationError("--vocab", "quantum datasets need --vocab equal to 2^qubits");
            }
            qubits = from_vocab;
        }
        if (qubits == 0) {
            qubits = 4;
        }
        const std::uint64_t model_seed = a.model_seed.value_or(a.seed);
        const qsalab::IsingModel model = qsalab::build_ising(qubits, model_seed);
        ds = qsalab::generate_quantum_dataset(model, steps, a.count, a.seed, model_seed);
        config["qubits"] = qubits;
        config["model_seed"] = model_seed;
    }
    const fs::path out = a.out;
    qsalab::save_dataset(ds, out);

    qsalab::cli::RunManifest m;
    m.command = "generate";
    m.arguments = argv;
    m.config = config;
    m.seed = a.seed;
    m.outputs = {out};
    m.wall_seconds = common.wall();
    m.write(manifest_path_for(out));
    return kExitOk;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
    std::string model;
    std::string data;
    std::string config;
    std::string out;
    json overrides = json::object();
};

int run_train(const TrainArgs &a, const Common &common, const std::vector<std::string> &argv)
{
    qsalab::TrainConfig config;
    std::vector<fs::path> inputs;
    if (!a.config.empty()) {
        json file;
        try {
            file = json::parse(qsalab::read_text_file(a.config));
        } catch (const json::parse_error &e) {
            throw qsalab::ConfigurationError("config file: " + std::string(e.what()));
        }
        config = qsalab::TrainConfig::from_json(file);
        inputs.emplace_back(a.config);
    }
    json overrides = a.overrides;
    if (!a.model.empty()) {
        overrides["model"] = a.model;
    }
    if (!a.data.empty()) {
        overrides["data"] = a.data;
    }
    if (!a.out.empty()) {
        overrides["out"] = a.out;
    }
    config.merge(overrides);
    if (config.data.empty() || config.out.empty()) {
        throw CLI::RequiredError("--data and --out (or their config keys)");
    }

    const fs::path data = config.data;
    const fs::path dir = config.out;
    inputs.insert(inputs.begin(), data);
    const qsalab::SequenceDataset ds = qsalab::load_dataset(data);
    fs::create_directories(dir);

    qsalab::TrainResult result;
    try {
        result = qsalab::train(config, ds);
    } catch (const qsalab::NumericError &e) {
        qsalab::write_file_atomically(dir / "diagnostic.json", e.snapshot() + "\n");
        throw;
    }

    const fs::path checkpoint = dir / "checkpoint.json";
    const fs::path loss = dir / "loss.csv";
    const fs::path report = dir / "report.json";
    qsalab::save_checkpoint({result.params, config.hash(), config.seed}, checkpoint);
    qsalab::write_file_atomically(loss, result.report.to_csv());
    json rj = result.report.to_json();
    rj["config_hash"] = config.hash();
    qsalab::write_file_atomically(report, rj.dump(2) + "\n");

    qsalab::cli::RunManifest m;
    m.command = "train";
    m.arguments = argv;
    m.config = config.to_json();
    m.seed = config.seed;
    m.inputs = inputs;
    m.outputs = {checkpoint, loss, report};
    m.wall_seconds = common.wall();
    m.write(dir / "manifest.json");
    return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
    std::string checkpoint;
    std::vector<std::string> data;
    std::string out;
    int threads = 0;
};

int run_eval(const EvalArgs &a, const Common &common, const std::vector<std::string> &argv)
{
    const qsalab::Checkpoint cp = qsalab::load_checkpoint(a.checkpoint);
    std::vector<qsalab::SequenceDataset> sets;
    std::vector<fs::path> inputs{a.checkpoint};
    for (const std::string &path : a.data) {
        sets.push_back(qsalab::load_dataset(path));
        inputs.emplace_back(path);
    }
    const qsalab::LossReport report = qsalab::evaluate(cp.params, sets, a.threads);
    json rj = report.to_json();
    rj.erase("epochs");
    rj.erase("final_train_loss");
    rj.erase("final_train_loss_offset");
    rj.erase("final_perplexity");
    rj["datasets"] = a.data;
    rj["config_hash"] = cp.config_hash;
    const fs::path out = a.out;
    qsalab::write_file_atomically(out, rj.dump(2) + "\n");

    qsalab::cli::RunManifest m;
    m.command = "eval";
    m.arguments = argv;
    m.config = {{"checkpoint", a.checkpoint}, {"data", a.data}};
    m.seed = cp.seed;
    m.inputs = inputs;
    m.outputs = {out};
    m.wall_seconds = common.wall();
    m.write(manifest_path_for(out));
    return kExitOk;
}

// ----------------------------------------------------------------- predict

struct PredictArgs {
    std::string checkpoint;
    std::string data;
    std::string out;
    int top_k = 3;
};

int run_predict(const PredictArgs &a, const Common &common, const std::vector<std::string> &argv)
{
    const qsalab::Checkpoint cp = qsalab::load_checkpoint(a.checkpoint);
    const qsalab::SequenceDataset ds = qsalab::load_dataset(a.data);
    qsalab::check_compatibility(cp.params.shape, ds);
    std::string csv = "sequence,step,rank,word,score\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
        const auto scores = qsalab::word_scores(cp.params, ds.inputs(r));
        for (std::size_t j = 0; j < scores.size(); ++j) {
            std::vector<int> order(scores[j].size());
            std::iota(order.begin(), order.end(), 0);
            // Highest score first, ties to the lowest word index.
            std::stable_sort(order.begin(), order.end(),
                             [&](int x, int y) { return scores[j][static_cast<std::size_t>(x)] > scores[j][static_cast<std::size_t>(y)]; });
            const int k = std::min<int>(a.top_k, static_cast<int>(order.size()));
            for (int rank = 0; rank < k; ++rank) {
                const int word = order[static_cast<std::size_t>(rank)];
                csv += std::to_string(ds.ids[r]) + ',' + std::to_string(j + 1) + ',' +
                       std::to_string(rank + 1) + ',' + std::to_string(word) + ',' +
                       format_double(scores[j][static_cast<std::size_t>(word)]) + '\n';
            }
        }
    }
    const fs::path out = a.out;
    qsalab::write_file_atomically(out, csv);

    qsalab::cli::RunManifest m;
    m.command = "predict";
    m.arguments = argv;
    m.config = {{"checkpoint", a.checkpoint}, {"data", a.data}, {"top_k", a.top_k}};
    m.seed = cp.seed;
    m.inputs = {a.checkpoint, a.data};
    m.outputs = {out};
    m.wall_seconds = common.wall();
    m.write(manifest_path_for(out));
    return kExitOk;
}

// ------------------------------------------------------------------- audit

struct AuditArgs {
    std::string out;
    std::int64_t vocab = 16;
    std::int64_t layers = 5;
};

std::vector<std::int64_t> powers_of_two(int lo, int hi)
{
    std::vector<std::int64_t> out;
    for (int e = lo; e <= hi; ++e) {
        out.push_back(std::int64_t{1} << e);
    }
    return out;
}

int run_audit(const AuditArgs &a, const Common &common, const std::vector<std::string> &argv)
{
    using qsalab::CostVariant;
    using qsalab::ScalingAxis;
    const std::int64_t D = a.vocab;
    const std::int64_t L = a.layers;
    const auto long_T = powers_of_two(10, 16);
    const auto wide_d = powers_of_two(6, 10);

    const std::vector<qsalab::ScalingFit> fits = {
        qsalab::fit_scaling(CostVariant::qsa_amplitude, ScalingAxis::T, long_T, 0, 4, D, L),
        qsalab::fit_scaling(CostVariant::qsa_amplitude, ScalingAxis::d, wide_d, 4096, 0, D, L),
        qsalab::fit_scaling(CostVariant::csa, ScalingAxis::T, long_T, 0, 4, D, L),
        qsalab::fit_scaling(CostVariant::csa, ScalingAxis::d, powers_of_two(1, 5), 65536, 0, D, L),
        qsalab::fit_scaling(CostVariant::qsa_basis, ScalingAxis::T, long_T, 0, 4, D, L),
    };
    const auto rows = qsalab::crossover_report(powers_of_two(1, 16), powers_of_two(1, 10), D, L);
    std::vector<qsalab::CostBreakdown> breakdowns;
    for (CostVariant v : {CostVariant::qsa_amplitude, CostVariant::qsa_basis, CostVariant::csa}) {
        breakdowns.push_back(qsalab::count_gates(v, 4, 4, D, L));
    }

    const fs::path dir = a.out;
    fs::create_directories(dir);
    const fs::path slopes = dir / "slopes.csv";
    const fs::path crossover = dir / "crossover.csv";
    const fs::path breakdown = dir / "breakdown.csv";
    qsalab::write_file_atomically(slopes, qsalab::slopes_csv(fits));
    qsalab::write_file_atomically(crossover, qsalab::crossover_csv(rows));
    qsalab::write_file_atomically(breakdown, qsalab::breakdown_csv(breakdowns));

    qsalab::cli::RunManifest m;
    m.command = "audit";
    m.arguments = argv;
    m.config = {{"D", D}, {"L", L}};
    m.outputs = {slopes, crossover, breakdown};
    m.wall_seconds = common.wall();
    m.write(dir / "manifest.json");
    return kExitOk;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"qsalab: quantum self-attention simulator, trainer and cost audit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", QSALAB_VERSION);
    const std::vector<std::string> arguments(argv + 1, argv + argc);
    Common common;

    GenerateArgs gen;
    auto *generate = app.add_subcommand("generate", "Generate a classical or quantum dataset");
    generate->add_option("--kind", gen.kind, "classical | quantum")
        ->required()
        ->check(CLI::IsMember({"classical", "quantum"}));
    auto *vocab_opt = generate->add_option("--vocab", gen.vocab, "Vocabulary size D (classical default 10)")
                          ->check(CLI::Range(2, 1 << 20));
    generate->add_option("--qubits", gen.qubits, "Qubit count q of the Ising chain (default 4)")
        ->check(CLI::Range(1, 10));
    generate->add_option("--len", gen.length, "Sequence length T + 1")->capture_default_str();
    generate->add_option("--count", gen.count, "Number of sequences")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    generate->add_option("--seed", gen.seed, "Sampling seed")->capture_default_str();
    generate->add_option("--order", gen.order, "Non-zero transitions per Markov row")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    generate->add_option("--chain-seed", gen.chain_seed, "Seed of the Markov chain (default: --seed)");
    generate->add_option("--model-seed", gen.model_seed, "Seed of the Ising couplings (default: --seed)");
    generate->add_option("--out", gen.out, "Output JSON Lines file")->required();
    generate->add_flag("--record-timing", common.record_timing, "Record wall time in the manifest");
    (void)vocab_opt;

    TrainArgs tr;
    auto *train = app.add_subcommand("train", "Train a model on a dataset");
    train->add_option("--model", tr.model, "qsa | scsa | lcsa")
        ->check(CLI::IsMember({"qsa", "scsa", "lcsa"}));
    train->add_option("--data", tr.data, "Training dataset (JSON Lines)");
    train->add_option("--config", tr.config, "JSON config file; flags override its values");
    train->add_option("--out", tr.out, "Output directory");
    int epochs = 0;
    std::uint64_t seed = 0;
    int batch = 0;
    double lr = 0.0;
    double emb_lr = 0.0;
    std::string grad_mode;
    int shots = 0;
    int layers = 0;
    int dim = 0;
    int threads = 0;
    bool no_phase_layer = false;
    bool freeze_embedding = false;
    auto *o_epochs = train->add_option("--epochs", epochs)->check(CLI::NonNegativeNumber);
    auto *o_seed = train->add_option("--seed", seed);
    auto *o_batch = train->add_option("--batch-size", batch, "0 = full batch")->check(CLI::NonNegativeNumber);
    auto *o_lr = train->add_option("--lr", lr, "Learning rate for circuit angles and weights");
    auto *o_emb_lr = train->add_option("--embedding-lr", emb_lr);
    auto *o_grad = train->add_option("--gradient-mode", grad_mode)
                       ->check(CLI::IsMember({"parameter-shift", "finite-difference"}));
    auto *o_shots = train->add_option("--shots", shots, "Sampled expectations for QSA gradients")
                        ->check(CLI::NonNegativeNumber);
    auto *o_layers = train->add_option("--layers", layers, "Ansatz layers L")->check(CLI::NonNegativeNumber);
    auto *o_dim = train->add_option("--dim", dim, "Embedding dimension d")->check(CLI::PositiveNumber);
    auto *o_threads = train->add_option("--threads", threads)->check(CLI::NonNegativeNumber);
    train->add_flag("--no-phase-layer", no_phase_layer, "Real-valued ansatz without the R layer");
    train->add_flag("--freeze-embedding", freeze_embedding, "Keep the embedding fixed");
    train->add_flag("--record-timing", common.record_timing,
                    "Write real per-epoch seconds and wall time (output is then not reproducible)");

    EvalArgs ev;
    auto *eval = app.add_subcommand("eval", "Evaluate a checkpoint on one or more datasets");
    eval->add_option("--checkpoint", ev.checkpoint)->required();
    eval->add_option("--data", ev.data, "Dataset file; repeat for several test sets")->required();
    eval->add_option("--out", ev.out, "Report JSON")->required();
    eval->add_option("--threads", ev.threads)->check(CLI::NonNegativeNumber);
    eval->add_flag("--record-timing", common.record_timing, "Record wall time in the manifest");

    PredictArgs pr;
    auto *predict = app.add_subcommand("predict", "Top-k next-word predictions per step");
    predict->add_option("--checkpoint", pr.checkpoint)->required();
    predict->add_option("--data", pr.data)->required();
    predict->add_option("--out", pr.out, "CSV: sequence,step,rank,word,score")->required();
    predict->add_option("--top-k", pr.top_k)->capture_default_str()->check(CLI::PositiveNumber);
    predict->add_flag("--record-timing", common.record_timing, "Record wall time in the manifest");

    AuditArgs au;
    auto *audit = app.add_subcommand("audit", "Gate-count scaling fits and crossover table");
    audit->add_option("--out", au.out, "Output directory")->required();
    audit->add_option("--vocab", au.vocab, "Vocabulary size D")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    audit->add_option("--layers", au.layers, "Ansatz layers L")->capture_default_str()->check(CLI::PositiveNumber);
    audit->add_flag("--record-timing", common.record_timing, "Record wall time in the manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*generate) {
            return run_generate(gen, common, arguments);
        }
        if (*train) {
            json &o = tr.overrides;
            if (*o_epochs) o["epochs"] = epochs;
            if (*o_seed) o["seed"] = seed;
            if (*o_batch) o["batch_size"] = batch;
            if (*o_lr) o["learning_rate"] = lr;
            if (*o_emb_lr) o["embedding_learning_rate"] = emb_lr;
            if (*o_grad) o["gradient_mode"] = grad_mode;
            if (*o_shots) o["shots"] = shots;
            if (*o_layers) o["layers"] = layers;
            if (*o_dim) o["token_dim"] = dim;
            if (*o_threads) o["threads"] = threads;
            if (no_phase_layer) o["phase_layer"] = false;
            if (freeze_embedding) o["embedding_trainable"] = false;
            if (common.record_timing) o["record_timing"] = true;
            return run_train(tr, common, arguments);
        }
        if (*eval) {
            return run_eval(ev, common, arguments);
        }
        if (*predict) {
            return run_predict(pr, common, arguments);
        }
        if (*audit) {
            return run_audit(au, common, arguments);
        }
    } catch (const CLI::Error &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const qsalab::NumericError &e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const qsalab::DegenerateInputError &e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const qsalab::DegeneratePredictionError &e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const qsalab::ModelMismatchError &e) {
        std::cerr << "incompatible input: " << e.what() << "\n";
        return kExitCompatibility;
    } catch (const qsalab::UnsupportedVersionError &e) {
        std::cerr << "incompatible input: " << e.what() << "\n";
        return kExitCompatibility;
    } catch (const qsalab::ParseError &e) {
        std::cerr << "incompatible input: " << e.what() << "\n";
        return kExitCompatibility;
    } catch (const qsalab::ConfigurationError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
