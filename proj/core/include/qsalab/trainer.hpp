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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsalab/model.hpp"
#include "qsalab/sequence_data.hpp"

namespace qsalab {

enum class GradientMode { parameter_shift, finite_difference };

[[nodiscard]] std::string to_string(GradientMode mode);
[[nodiscard]] GradientMode gradient_mode_from_string(const std::string &text);

/// Training hyperparameters. Serialized as JSON with "schema_version": 1;
/// keys missing from a file keep their defaults, unknown keys are rejected.
struct TrainConfig {
    static constexpr int kSchemaVersion = 1;

    ModelKind model = ModelKind::qsa;
    int epochs = 100;
    int batch_size = 0; ///< 0 means full batch
    double learning_rate = 0.05;           ///< circuit angles and attention weights
    double embedding_learning_rate = 0.01; ///< embedding matrix
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 1;
    GradientMode gradient_mode = GradientMode::parameter_shift;
    int shots = 0; ///< > 0: gradients from sampled expectations (QSA only)
    bool embedding_trainable = true;
    double fd_step = 1e-4;

    int token_dim = 4;
    int layers = 5;
    bool phase_layer = true;
    int key_dim = 0;
    int hidden = 0;
    double gamma = 0.1;

    // Run settings that never change the numbers produced.
    int threads = 0;
    bool record_timing = false;
    std::string data;
    std::string out;

    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
    /// Throws UnsupportedVersionError for another schema version and
    /// ConfigurationError for unknown keys or bad values.
    static TrainConfig from_json(const nlohmann::json &j);
    /// Overlays the keys present in `j` onto this config.
    void merge(const nlohmann::json &j);
    /// FNV-1a digest (16 hex digits) of the settings that affect results.
    [[nodiscard]] std::string hash() const;
    /// Model shape for a dataset: D and T from the data, complex for quantum data.
    [[nodiscard]] ModelShape shape_for(const SequenceDataset &dataset) const;
};

/// Throws ModelMismatchError when the dataset cannot feed the model.
void check_compatibility(const ModelShape &shape, const SequenceDataset &dataset);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;        ///< mean Rényi-½ loss
    double train_loss_offset = 0.0; ///< train_loss - log T
    double perplexity = 0.0;        ///< exp(train_loss)
    double grad_norm = 0.0;
    double seconds = 0.0;
};

struct LossReport {
    ModelKind model = ModelKind::qsa;
    int steps = 0;
    /// Row e holds the loss at the parameters used for update e.
    std::vector<EpochRecord> epochs;
    double final_train_loss = 0.0;
    std::int64_t floored_events = 0;
    double wall_seconds = 0.0;

    // Filled by evaluate().
    std::vector<double> set_losses;
    std::vector<double> set_perplexities;
    double perplexity_mean = 0.0;
    double perplexity_stdev = 0.0;

    /// Header: epoch,train_loss_offset,train_loss,perplexity,grad_norm,seconds
    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct TrainResult {
    ModelParams params;
    LossReport report;
};

/// Full-batch (or mini-batch) Adam. Deterministic for a given config and
/// dataset regardless of the thread count. Throws NumericError if a loss or
/// gradient becomes non-finite.
[[nodiscard]] TrainResult train(const TrainConfig &config, const SequenceDataset &dataset);

/// Same, starting from given parameters.
[[nodiscard]] TrainResult train_from(const TrainConfig &config, const SequenceDataset &dataset,
                                     ModelParams initial);

/// Forward-only losses. `final_train_loss` is the loss on the first set;
/// perplexity mean and sample standard deviation run across the sets.
[[nodiscard]] LossReport evaluate(const ModelParams &params,
                                  std::span<const SequenceDataset> datasets, int threads = 0);

struct SequenceGradient {
    LossValue loss;
    std::vector<double> gradient; ///< in trainable_slots order
};

/// Loss and gradient of one sequence. Circuit angles use the shift rule in
/// parameter-shift mode (exact, or sampled when config.shots > 0 with
/// `shot_seed`); every other coordinate uses central differences with
/// config.fd_step.
[[nodiscard]] SequenceGradient sequence_gradient(const ModelParams &params,
                                                 std::span<const CVector> inputs,
                                                 const TrainConfig &config,
                                                 std::uint64_t shot_seed = 0);

/// Mean loss over the dataset.
[[nodiscard]] LossValue dataset_loss(const ModelParams &params, const SequenceDataset &dataset,
                                     int threads = 0, std::int64_t *floored_events = nullptr);

} // namespace qsalab
