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

#include "qsalab/trainer.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include "qsalab/errors.hpp"
#include "qsalab/parallel.hpp"
#include "qsalab/qsa_engine.hpp"

namespace qsalab {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string format_double(double x)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::vector<CVector>> all_inputs(const SequenceDataset &dataset)
{
    std::vector<std::vector<CVector>> out;
    out.reserve(dataset.size());
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        out.push_back(dataset.inputs(r));
    }
    return out;
}

std::vector<bool> used_columns(std::span<const CVector> inputs, int vocab)
{
    std::vector<bool> used(static_cast<std::size_t>(vocab), false);
    for (const CVector &w : inputs) {
        for (Eigen::Index l = 0; l < w.size(); ++l) {
            if (w[l] != Complex{0.0, 0.0}) {
                used[static_cast<std::size_t>(l)] = true;
            }
        }
    }
    return used;
}

double l2_norm(const std::vector<double> &g)
{
    double s = 0.0;
    for (double x : g) {
        s += x * x;
    }
    return std::sqrt(s);
}

bool all_finite(const std::vector<double> &g)
{
    for (double x : g) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

/// False when an update has pushed the model outside its valid domain, for
/// example an embedding column whose norm overflows.
bool within_domain(const ModelParams &params)
{
    try {
        params.validate();
    } catch (const ConfigurationError &) {
        return false;
    }
    return true;
}

struct BatchResult {
    double loss = 0.0;
    std::int64_t floored = 0;
    std::vector<double> gradient;
};

BatchResult batch_gradient(const ModelParams &params,
                           const std::vector<std::vector<CVector>> &inputs,
                           const std::vector<std::size_t> &batch, const TrainConfig &config,
                           std::uint64_t update_index, int threads)
{
    std::vector<SequenceGradient> per(batch.size());
    const std::uint64_t update_seed = record_seed(config.seed ^ 0x5348'4f54'5345'4544ULL, update_index);
    parallel_for(batch.size(), threads, [&](std::size_t k) {
        per[k] = sequence_gradient(params, inputs[batch[k]], config,
                                   record_seed(update_seed, batch[k]));
    });
    BatchResult out;
    out.gradient.assign(per.empty() ? 0 : per.front().gradient.size(), 0.0);
    for (const SequenceGradient &g : per) {
        out.loss += g.loss.value;
        out.floored += g.loss.floored ? 1 : 0;
        for (std::size_t i = 0; i < g.gradient.size(); ++i) {
            out.gradient[i] += g.gradient[i];
        }
    }
    const double scale = 1.0 / static_cast<double>(batch.size());
    out.loss *= scale;
    for (double &x : out.gradient) {
        x *= scale;
    }
    return out;
}

[[noreturn]] void numeric_failure(const std::string &what, const TrainConfig &config, int epoch,
                                  double loss, const std::vector<double> &gradient,
                                  const std::vector<double> &theta)
{
    json snap;
    snap["error"] = what;
    snap["epoch"] = epoch;
    snap["loss"] = std::isfinite(loss) ? json(loss) : json(format_double(loss));
    json grad = json::array();
    for (double g : gradient) {
        grad.push_back(std::isfinite(g) ? json(g) : json(format_double(g)));
    }
    snap["gradient"] = std::move(grad);
    snap["trainables"] = theta;
    snap["config"] = config.to_json();
    throw NumericError(what, snap.dump(2));
}

template <typename T>
T get_as(const json &value, const std::string &key)
{
    try {
        return value.get<T>();
    } catch (const json::exception &e) {
        throw ConfigurationError("config key '" + key + "': " + e.what());
    }
}

} // namespace

std::string to_string(GradientMode mode)
{
    return mode == GradientMode::parameter_shift ? "parameter-shift" : "finite-difference";
}

GradientMode gradient_mode_from_string(const std::string &text)
{
    if (text == "parameter-shift") {
        return GradientMode::parameter_shift;
    }
    if (text == "finite-difference") {
        return GradientMode::finite_difference;
    }
    throw ConfigurationError("unknown gradient mode '" + text + "'");
}

void TrainConfig::validate() const
{
    if (epochs < 0) {
        throw ConfigurationError("epochs must be non-negative");
    }
    if (batch_size < 0 || threads < 0 || shots < 0) {
        throw ConfigurationError("batch_size, threads and shots must be non-negative");
    }
    if (!(learning_rate > 0.0) || !(embedding_learning_rate > 0.0)) {
        throw ConfigurationError("learning rates must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
        throw ConfigurationError("Adam needs betas in [0, 1) and a positive epsilon");
    }
    if (!(fd_step > 0.0)) {
        throw ConfigurationError("finite-difference step must be positive");
    }
    if (shots > 0 && (model != ModelKind::qsa || gradient_mode != GradientMode::parameter_shift)) {
        throw ConfigurationError("shots apply only to QSA with parameter-shift gradients");
    }
    if (token_dim < 1 || layers < 0 || key_dim < 0 || hidden < 0 || !std::isfinite(gamma)) {
        throw ConfigurationError("invalid model size settings");
    }
}

json TrainConfig::to_json() const
{
    return {{"schema_version", kSchemaVersion},
            {"model", to_string(model)},
            {"epochs", epochs},
            {"batch_size", batch_size},
            {"learning_rate", learning_rate},
            {"embedding_learning_rate", embedding_learning_rate},
            {"beta1", beta1},
            {"beta2", beta2},
            {"epsilon", epsilon},
            {"seed", seed},
            {"gradient_mode", to_string(gradient_mode)},
            {"shots", shots},
            {"embedding_trainable", embedding_trainable},
            {"fd_step", fd_step},
            {"token_dim", token_dim},
            {"layers", layers},
            {"phase_layer", phase_layer},
            {"key_dim", key_dim},
            {"hidden", hidden},
            {"gamma", gamma},
            {"threads", threads},
            {"record_timing", record_timing},
            {"data", data},
            {"out", out}};
}

void TrainConfig::merge(const json &j)
{
    if (!j.is_object()) {
        throw ConfigurationError("config must be a JSON object");
    }
    for (const auto &[key, value] : j.items()) {
        if (key == "schema_version") {
            const int version = get_as<int>(value, key);
            if (version != kSchemaVersion) {
                throw UnsupportedVersionError("config schema_version " + std::to_string(version) +
                                              " is not supported");
            }
        } else if (key == "model") {
            model = model_kind_from_string(get_as<std::string>(value, key));
        } else if (key == "epochs") {
            epochs = get_as<int>(value, key);
        } else if (key == "batch_size") {
            batch_size = get_as<int>(value, key);
        } else if (key == "learning_rate") {
            learning_rate = get_as<double>(value, key);
        } else if (key == "embedding_learning_rate") {
            embedding_learning_rate = get_as<double>(value, key);
        } else if (key == "beta1") {
            beta1 = get_as<double>(value, key);
        } else if (key == "beta2") {
            beta2 = get_as<double>(value, key);
        } else if (key == "epsilon") {
            epsilon = get_as<double>(value, key);
        } else if (key == "seed") {
            seed = get_as<std::uint64_t>(value, key);
        } else if (key == "gradient_mode") {
            gradient_mode = gradient_mode_from_string(get_as<std::string>(value, key));
        } else if (key == "shots") {
            shots = get_as<int>(value, key);
        } else if (key == "embedding_trainable") {
            embedding_trainable = get_as<bool>(value, key);
        } else if (key == "fd_step") {
            fd_step = get_as<double>(value, key);
        } else if (key == "token_dim") {
            token_dim = get_as<int>(value, key);
        } else if (key == "layers") {
            layers = get_as<int>(value, key);
        } else if (key == "phase_layer") {
            phase_layer = get_as<bool>(value, key);
        } else if (key == "key_dim") {
            key_dim = get_as<int>(value, key);
        } else if (key == "hidden") {
            hidden = get_as<int>(value, key);
        } else if (key == "gamma") {
            gamma = get_as<double>(value, key);
        } else if (key == "threads") {
            threads = get_as<int>(value, key);
        } else if (key == "record_timing") {
            record_timing = get_as<bool>(value, key);
        } else if (key == "data") {
            data = get_as<std::string>(value, key);
        } else if (key == "out") {
            out = get_as<std::string>(value, key);
        } else {
            throw ConfigurationError("unknown config key '" + key + "'");
        }
    }
    validate();
}

TrainConfig TrainConfig::from_json(const json &j)
{
    if (!j.is_object() || !j.contains("schema_version")) {
        throw ConfigurationError("config must be an object with a schema_version");
    }
    TrainConfig c;
    c.merge(j);
    return c;
}

std::string TrainConfig::hash() const
{
    json j = to_json();
    for (const char *key : {"threads", "record_timing", "data", "out"}) {
        j.erase(key);
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : j.dump()) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ModelShape TrainConfig::shape_for(const SequenceDataset &dataset) const
{
    ModelShape s;
    s.kind = model;
    s.vocab_size = dataset.vocab_size;
    s.steps = dataset.steps;
    s.token_dim = token_dim;
    s.layers = layers;
    s.complex_valued = dataset.kind == DatasetKind::quantum;
    s.phase_layer = phase_layer;
    s.key_dim = key_dim;
    s.hidden = hidden;
    s.gamma = gamma;
    s.validate();
    return s;
}

void check_compatibility(const ModelShape &shape, const SequenceDataset &dataset)
{
    if (shape.vocab_size != dataset.vocab_size || shape.steps != dataset.steps) {
        throw ModelMismatchError("model expects D=" + std::to_string(shape.vocab_size) +
                                 ", T=" + std::to_string(shape.steps) + " but dataset has D=" +
                                 std::to_string(dataset.vocab_size) +
                                 ", T=" + std::to_string(dataset.steps));
    }
    if (shape.complex_valued != (dataset.kind == DatasetKind::quantum)) {
        throw ModelMismatchError("model was built for " +
                                 std::string(shape.complex_valued ? "quantum" : "classical") +
                                 " data but the dataset is " + to_string(dataset.kind));
    }
}

std::string LossReport::to_csv() const
{
    std::string out = "epoch,train_loss_offset,train_loss,perplexity,grad_norm,seconds\n";
    for (const EpochRecord &r : epochs) {
        out += std::to_string(r.epoch) + ',' + format_double(r.train_loss_offset) + ',' +
               format_double(r.train_loss) + ',' + format_double(r.perplexity) + ',' +
               format_double(r.grad_norm) + ',' + format_double(r.seconds) + '\n';
    }
    return out;
}

json LossReport::to_json() const
{
    json rows = json::array();
    for (const EpochRecord &r : epochs) {
        rows.push_back({{"epoch", r.epoch},
                        {"train_loss", r.train_loss},
                        {"train_loss_offset", r.train_loss_offset},
                        {"perplexity", r.perplexity},
                        {"grad_norm", r.grad_norm},
                        {"seconds", r.seconds}});
    }
    return {{"model", to_string(model)},
            {"T", steps},
            {"final_train_loss", final_train_loss},
            {"final_train_loss_offset", final_train_loss - std::log(static_cast<double>(steps))},
            {"final_perplexity", perplexity(final_train_loss)},
            {"floored_events", floored_events},
            {"epochs", std::move(rows)},
            {"set_losses", set_losses},
            {"set_perplexities", set_perplexities},
            {"mean", perplexity_mean},
            {"stdev", perplexity_stdev}};
}

SequenceGradient sequence_gradient(const ModelParams &params, std::span<const CVector> inputs,
                                   const TrainConfig &config, std::uint64_t shot_seed)
{
    const bool emb = config.embedding_trainable;
    const std::vector<ParamSlot> slots = trainable_slots(params, emb);
    const std::vector<double> theta = get_trainables(params, emb);
    const std::vector<bool> used = used_columns(inputs, params.shape.vocab_size);

    SequenceGradient out;
    out.loss = sequence_loss(params, inputs);
    out.gradient.assign(theta.size(), 0.0);

    ModelParams probe = params;
    std::vector<double> work = theta;
    auto set_coordinate = [&](std::size_t k, double value) {
        work[k] = value;
        set_trainables(probe, emb, work);
        work[k] = theta[k];
    };

    const bool shift = params.shape.kind == ModelKind::qsa &&
                       config.gradient_mode == GradientMode::parameter_shift;
    std::optional<PreparedCircuit> prepared;
    double base_expectation = 0.0;
    std::uint64_t evaluation = 0;
    auto expectation_now = [&] {
        const CircuitMatrices m = circuit_matrices(probe);
        if (config.shots > 0) {
            return sample_expectation(prepared->final_state(m.v, m.w, m.r), config.shots,
                                      record_seed(shot_seed, evaluation++));
        }
        return prepared->expectation(m.v, m.w, m.r);
    };
    if (shift) {
        prepared.emplace(make_qsa_instance(params, inputs));
        base_expectation = expectation_now();
    }
    const double T = static_cast<double>(params.shape.steps);

    for (std::size_t k = 0; k < theta.size(); ++k) {
        const ParamSlot &slot = slots[k];
        if (slot.group == ParamGroup::embedding && !used[static_cast<std::size_t>(slot.column)]) {
            continue; // the loss does not depend on this column
        }
        if (shift && slot.shift_rule) {
            if (!(T * base_expectation > kProbabilityFloor)) {
                continue;
            }
            set_coordinate(k, theta[k] + std::numbers::pi / 2);
            const double plus = expectation_now();
            set_coordinate(k, theta[k] - std::numbers::pi / 2);
            const double minus = expectation_now();
            out.gradient[k] = -0.5 * (plus - minus) / base_expectation;
            continue;
        }
        const double h = config.fd_step;
        set_coordinate(k, theta[k] + h);
        const double plus = sequence_loss(probe, inputs).value;
        set_coordinate(k, theta[k] - h);
        const double minus = sequence_loss(probe, inputs).value;
        out.gradient[k] = (plus - minus) / (2.0 * h);
    }
    return out;
}

LossValue dataset_loss(const ModelParams &params, const SequenceDataset &dataset, int threads,
                       std::int64_t *floored_events)
{
    if (dataset.size() == 0) {
        throw ConfigurationError("dataset is empty");
    }
    check_compatibility(params.shape, dataset);
    std::vector<LossValue> per(dataset.size());
    parallel_for(dataset.size(), resolve_thread_count(threads), [&](std::size_t r) {
        per[r] = sequence_loss(params, dataset.inputs(r));
    });
    LossValue out;
    std::int64_t floored = 0;
    for (const LossValue &l : per) {
        out.value += l.value;
        floored += l.floored ? 1 : 0;
    }
    out.value /= static_cast<double>(per.size());
    out.floored = floored > 0;
    if (floored_events != nullptr) {
        *floored_events += floored;
    }
    return out;
}

TrainResult train(const TrainConfig &config, const SequenceDataset &dataset)
{
    config.validate();
    dataset.validate();
    return train_from(config, dataset, init_model(config.shape_for(dataset), config.seed));
}

TrainResult train_from(const TrainConfig &config, const SequenceDataset &dataset,
                       ModelParams initial)
{
    config.validate();
    initial.validate();
    if (initial.shape.kind != config.model) {
        throw ModelMismatchError("parameters are for " + to_string(initial.shape.kind) +
                                 ", config asks for " + to_string(config.model));
    }
    if (dataset.size() == 0) {
        throw ConfigurationError("dataset is empty");
    }
    check_compatibility(initial.shape, dataset);

    const auto run_start = Clock::now();
    const int threads = resolve_thread_count(config.threads);
    const auto inputs = all_inputs(dataset);
    const bool emb = config.embedding_trainable;
    const std::vector<ParamSlot> slots = trainable_slots(initial, emb);
    std::vector<double> theta = get_trainables(initial, emb);
    std::vector<double> lr(theta.size());
    for (std::size_t k = 0; k < slots.size(); ++k) {
        lr[k] = slots[k].group == ParamGroup::embedding ? config.embedding_learning_rate
                                                        : config.learning_rate;
    }
    std::vector<double> m1(theta.size(), 0.0);
    std::vector<double> m2(theta.size(), 0.0);
    std::uint64_t updates = 0;

    TrainResult result{std::move(initial), {}};
    ModelParams &params = result.params;
    LossReport &report = result.report;
    report.model = config.model;
    report.steps = dataset.steps;
    const double log_t = std::log(static_cast<double>(dataset.steps));

    const std::size_t n = dataset.size();
    const std::size_t batch =
        config.batch_size <= 0 ? n : std::min<std::size_t>(n, static_cast<std::size_t>(config.batch_size));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    int epoch = 0;
    auto adam_step = [&](const std::vector<double> &g, double loss) {
        ++updates;
        const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(updates));
        const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(updates));
        for (std::size_t k = 0; k < theta.size(); ++k) {
            m1[k] = config.beta1 * m1[k] + (1.0 - config.beta1) * g[k];
            m2[k] = config.beta2 * m2[k] + (1.0 - config.beta2) * g[k] * g[k];
            theta[k] -= lr[k] * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + config.epsilon);
        }
        set_trainables(params, emb, theta);
        if (!all_finite(theta) || !within_domain(params)) {
            numeric_failure("parameters left the valid domain after update", config, epoch, loss,
                            g, theta);
        }
    };

    // Runaway parameters can also surface as a vanishing state inside the
    // model; that is the same failure as a NaN loss and is reported as such.
    try {
        for (; epoch < config.epochs; ++epoch) {
            const auto epoch_start = Clock::now();
            EpochRecord row;
            row.epoch = epoch;
            if (batch == n) {
                BatchResult r = batch_gradient(params, inputs, order, config, updates, threads);
                report.floored_events += r.floored;
                row.train_loss = r.loss;
                row.grad_norm = l2_norm(r.gradient);
                if (!std::isfinite(r.loss) || !all_finite(r.gradient)) {
                    numeric_failure("non-finite loss or gradient", config, epoch, r.loss, r.gradient,
                                    theta);
                }
                adam_step(r.gradient, r.loss);
            } else {
                row.train_loss = dataset_loss(params, dataset, threads, &report.floored_events).value;
                if (!std::isfinite(row.train_loss)) {
                    numeric_failure("non-finite loss", config, epoch, row.train_loss, {}, theta);
                }
                std::mt19937_64 rng(record_seed(config.seed, static_cast<std::uint64_t>(epoch)));
                std::vector<std::size_t> perm = order;
                std::shuffle(perm.begin(), perm.end(), rng);
                double norm_sum = 0.0;
                std::size_t batches = 0;
                for (std::size_t start = 0; start < n; start += batch) {
                    const std::vector<std::size_t> idx(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                                       perm.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + batch)));
                    BatchResult r = batch_gradient(params, inputs, idx, config, updates, threads);
                    if (!std::isfinite(r.loss) || !all_finite(r.gradient)) {
                        numeric_failure("non-finite loss or gradient", config, epoch, r.loss,
                                        r.gradient, theta);
                    }
                    norm_sum += l2_norm(r.gradient);
                    ++batches;
                    adam_step(r.gradient, r.loss);
                }
                row.grad_norm = norm_sum / static_cast<double>(batches);
            }
            row.train_loss_offset = row.train_loss - log_t;
            row.perplexity = perplexity(row.train_loss);
            row.seconds = config.record_timing ? seconds_since(epoch_start) : 0.0;
            report.epochs.push_back(row);
        }

        report.final_train_loss = dataset_loss(params, dataset, threads, &report.floored_events).value;
        if (!std::isfinite(report.final_train_loss)) {
            numeric_failure("non-finite final loss", config, config.epochs, report.final_train_loss,
                            {}, theta);
        }
    } catch (const DegenerateInputError &e) {
        numeric_failure(std::string("degenerate state: ") + e.what(), config, epoch,
                        std::numeric_limits<double>::quiet_NaN(), {}, theta);
    } catch (const DegeneratePredictionError &e) {
        numeric_failure(std::string("degenerate state: ") + e.what(), config, epoch,
                        std::numeric_limits<double>::quiet_NaN(), {}, theta);
    }
    report.wall_seconds = seconds_since(run_start);
    return result;
}

LossReport evaluate(const ModelParams &params, std::span<const SequenceDataset> datasets,
                    int threads)
{
    if (datasets.empty()) {
        throw ConfigurationError("no dataset to evaluate");
    }
    params.validate();
    const auto start = Clock::now();
    LossReport report;
    report.model = params.shape.kind;
    report.steps = params.shape.steps;
    for (const SequenceDataset &ds : datasets) {
        const LossValue l = dataset_loss(params, ds, threads, &report.floored_events);
        if (!std::isfinite(l.value)) {
            throw NumericError("non-finite evaluation loss", json{{"loss", "nan"}}.dump());
        }
        report.set_losses.push_back(l.value);
        report.set_perplexities.push_back(perplexity(l.value));
    }
    report.final_train_loss = report.set_losses.front();
    const auto &p = report.set_perplexities;
    report.perplexity_mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
    if (p.size() > 1) {
        double ss = 0.0;
        for (double x : p) {
            ss += (x - report.perplexity_mean) * (x - report.perplexity_mean);
        }
        report.perplexity_stdev = std::sqrt(ss / static_cast<double>(p.size() - 1));
    }
    report.wall_seconds = seconds_since(start);
    return report;
}

} // namespace qsalab
