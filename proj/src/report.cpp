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

#include "sgde/report.hpp"

#include <cmath>
#include <stdexcept>

namespace sgde {

double improvement_pct(double worse, double better) {
    if (!(worse > 0.0)) throw std::invalid_argument("improvement baseline must be positive");
    return 100.0 * (worse - better) / worse;
}

double runtime_saving_pct(double baseline_seconds, double candidate_seconds) {
    if (!(baseline_seconds > 0.0))
        throw std::invalid_argument("runtime baseline must be positive");
    return 100.0 * (baseline_seconds - candidate_seconds) / baseline_seconds;
}

double round_to(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

std::size_t MetricTable::model_index(std::string_view name) const {
    for (std::size_t j = 0; j < models.size(); ++j)
        if (models[j] == name) return j;
    throw std::invalid_argument("model '" + std::string(name) + "' not in table");
}

std::vector<double> f_rank(const MetricTable& table) {
    const std::size_t n = table.models.size();
    if (table.rows.empty()) throw std::invalid_argument("f_rank needs at least one row");
    std::vector<double> sum(n, 0.0);
    for (const auto& row : table.rows) {
        if (row.size() != n) throw std::invalid_argument("metric table is not rectangular");
        for (double v : row)
            if (!std::isfinite(v)) throw std::invalid_argument("metric table has a non-finite cell");
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t less = 0, equal = 0;
            for (std::size_t k = 0; k < n; ++k) {
                if (row[k] < row[j]) ++less;
                else if (row[k] == row[j]) ++equal;
            }
            // Tied block occupies ranks less+1 .. less+equal.
            sum[j] += static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
        }
    }
    for (auto& s : sum) s /= static_cast<double>(table.rows.size());
    return sum;
}

std::vector<WinLoss> win_loss(const MetricTable& table, std::string_view reference) {
    const std::size_t ref = table.model_index(reference);
    std::vector<WinLoss> out;
    for (std::size_t j = 0; j < table.models.size(); ++j) {
        WinLoss wl;
        wl.peer = table.models[j];
        for (const auto& row : table.rows) {
            if (row.size() != table.models.size())
                throw std::invalid_argument("metric table is not rectangular");
            if (row[ref] < row[j]) ++wl.wins;
            else if (row[ref] > row[j]) ++wl.losses;
        }
        out.push_back(std::move(wl));
    }
    return out;
}

}  // namespace sgde
