/* Copyright (c) 2026 The SGDE-LFA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgde/config.hpp"
#include "sgde/data.hpp"
#include "sgde/model.hpp"
#include "sgde/pretrain.hpp"
#include "sgde/refine.hpp"
#include "sgde/report.hpp"

namespace sgde {

enum class ModelKind { Sgd, Adam, SgdSgde, AdamSgde };

std::string_view model_name(ModelKind kind);
/// Accepts "sgd", "adam", "sgd+sgde" and "adam+sgde".
ModelKind parse_model(std::string_view name);
/// Comma-separated model list; rejects empty lists and repeats.
std::vector<ModelKind> parse_model_list(std::string_view list);
bool uses_sgde(ModelKind kind) noexcept;
bool uses_adam(ModelKind kind) noexcept;

struct ExperimentSpec {
    std::filesystem::path data;
    Delimiter delimiter = Delimiter::Whitespace;
    std::string dataset;             // defaults to the data file stem
    double train_fraction = 0.8;     // train/test split
    double valid_fraction = 0.1;     // share of the training half held out for early stopping
    std::uint64_t split_seed = 1;
    std::vector<ModelKind> models{ModelKind::Sgd, ModelKind::SgdSgde};
    TrainConfig train;
    DEConfig de;
    std::filesystem::path out_dir = "out";

    void validate() const;
    std::string dataset_name() const;
};

/// Overrides spec fields from config keys. Unknown keys and malformed values
/// throw std::invalid_argument.
void apply_config(const ConfigMap& config, ExperimentSpec& spec);

/// Sets the split, initialization/shuffle and DE seeds together.
void set_all_seeds(ExperimentSpec& spec, std::uint64_t seed);

/// Every setting as "key = value" lines, in a fixed order.
std::string describe(const ExperimentSpec& spec);

/// Train/test split, then the training half split again into a fitting part
/// and a validation part. An empty validation part is allowed.
struct DataSplits {
    SparseRatingMatrix fit;
    SparseRatingMatrix valid;
    SparseRatingMatrix test;
};

DataSplits make_splits(const SparseRatingMatrix& data, double train_fraction,
                       double valid_fraction, std::uint64_t seed);

struct ModelResult {
    ModelKind kind = ModelKind::Sgd;
    bool diverged = false;
    std::string error;
    double test_rmse = 0.0;
    double test_mae = 0.0;
    double train_rmse = 0.0;     // on the fitting part
    double train_seconds = 0.0;
    double refine_seconds = 0.0;
    std::vector<EpochTrace> epochs;
    std::optional<RefineTrace> refinement;
    FactorModel model;
};

struct EvalReport {
    std::string dataset;
    std::vector<ModelResult> results;
    MetricTable table;               // finite models only; rows "<dataset>/rmse", "<dataset>/mae"
    std::vector<double> f_ranks;     // aligned with table.models
    std::string reference;           // model compared against its peers
    std::vector<WinLoss> win_loss;

    bool any_diverged() const noexcept;
};

/// Splits, pre-trains every listed model from the same initial FactorModel,
/// applies SGDE where requested and evaluates on the test split.
EvalReport run_experiment(const ExperimentSpec& spec, const SparseRatingMatrix& data);
/// Loads spec.data first; does not write any files.
EvalReport run_experiment(const ExperimentSpec& spec);

/// Writes metrics.csv, timing.csv, ranks.csv, trace_*.csv and summary.txt.
void write_report(const EvalReport& report, const ExperimentSpec& spec,
                  const std::filesystem::path& dir);

/// metrics.csv: "model,dataset,rmse,mae" with metrics at 4 decimals.
void write_metrics_csv(std::ostream& out, const EvalReport& report);

struct MetricsRow {
    std::string model;
    std::string dataset;
    double rmse = 0.0;
    double mae = 0.0;
};

std::vector<MetricsRow> read_metrics_csv(std::istream& in);

}  // namespace sgde
