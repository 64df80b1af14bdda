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
#include <string>
#include <string_view>
#include <vector>

namespace sgde {

/// Relative reduction 100·(worse − better)/worse. Throws std::invalid_argument
/// for a non-positive baseline.
double improvement_pct(double worse, double better);

/// Relative run-time saving 100·(baseline − candidate)/baseline.
double runtime_saving_pct(double baseline_seconds, double candidate_seconds);

/// Half-away-from-zero rounding to a number of decimals, for display.
double round_to(double value, int decimals);

/// Lower-is-better accuracy table: one row per (dataset, metric), one column per model.
struct MetricTable {
    std::vector<std::string> models;
    std::vector<std::string> row_labels;
    std::vector<std::vector<double>> rows;

    std::size_t model_index(std::string_view name) const;
};

/// Per-row ranks 1..n ascending by metric, tied cells sharing their average
/// rank; returns the mean rank of each model.
std::vector<double> f_rank(const MetricTable& table);

struct WinLoss {
    std::string peer;
    std::size_t wins = 0;    // rows where the reference is strictly lower
    std::size_t losses = 0;  // rows where the reference is strictly higher
};

/// Win/loss counts of the reference model against every model, itself included.
std::vector<WinLoss> win_loss(const MetricTable& table, std::string_view reference);

}  // namespace sgde
