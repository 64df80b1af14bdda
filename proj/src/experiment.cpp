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

#include "sgde/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sgde {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string fmt4(double v) { return fmt("%.4f", v); }
std::string fmt2(double v) { return fmt("%.2f", v); }
// Shortest %g rendering that reads back to the same double.
std::string fmt_full(double v) {
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw std::invalid_argument("invalid value '" + value + "' for '" + key + "'");
}

double to_real(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !std::isfinite(v)) bad_value(key, value);
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    if (value.empty() || value.front() == '-') bad_value(key, value);
    char* end = nullptr;
    const auto v = std::strtoull(value.c_str(), &end, 10);
    if (*end != '\0') bad_value(key, value);
    return v;
}

std::size_t to_size(const std::string& key, const std::string& value) {
    return static_cast<std::size_t>(to_u64(key, value));
}

std::string file_tag(ModelKind kind) {
    std::string s(model_name(kind));
    for (auto& ch : s)
        if (ch == '+') ch = '_';
    return s;
}

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path);
    if (!out) throw DataError("cannot write " + path.string());
}

struct Pretrained {
    FactorModel model;
    std::vector<EpochTrace> epochs;
    double seconds = 0.0;
    bool diverged = false;
    std::string error;
};

}  // namespace

std::string_view model_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::Sgd: return "sgd";
    case ModelKind::Adam: return "adam";
    case ModelKind::SgdSgde: return "sgd+sgde";
    case ModelKind::AdamSgde: return "adam+sgde";
    }
    return "sgd";
}

ModelKind parse_model(std::string_view name) {
    for (auto kind : {ModelKind::Sgd, ModelKind::Adam, ModelKind::SgdSgde, ModelKind::AdamSgde})
        if (model_name(kind) == name) return kind;
    throw std::invalid_argument("unknown model '" + std::string(name) +
                                "' (expected sgd, adam, sgd+sgde or adam+sgde)");
}

std::vector<ModelKind> parse_model_list(std::string_view list) {
    std::vector<ModelKind> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        auto end = list.find(',', pos);
        if (end == std::string_view::npos) end = list.size();
        auto token = list.substr(pos, end - pos);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        if (!token.empty()) {
            const auto kind = parse_model(token);
            for (auto k : out)
                if (k == kind) throw std::invalid_argument("model '" + std::string(token) + "' listed twice");
            out.push_back(kind);
        }
        pos = end + 1;
    }
    if (out.empty()) throw std::invalid_argument("model list is empty");
    return out;
}

bool uses_sgde(ModelKind kind) noexcept {
    return kind == ModelKind::SgdSgde || kind == ModelKind::AdamSgde;
}

bool uses_adam(ModelKind kind) noexcept {
    return kind == ModelKind::Adam || kind == ModelKind::AdamSgde;
}

void ExperimentSpec::validate() const {
    if (models.empty()) throw std::invalid_argument("at least one model is required");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must lie strictly between 0 and 1");
    if (!(valid_fraction >= 0.0 && valid_fraction < 1.0))
        throw std::invalid_argument("valid_fraction must lie in [0, 1)");
    train.validate();
    bool any_sgde = false;
    for (auto k : models) any_sgde = any_sgde || uses_sgde(k);
    if (any_sgde) de.validate();
}

std::string ExperimentSpec::dataset_name() const {
    if (!dataset.empty()) return dataset;
    const auto stem = data.stem().string();
    return stem.empty() ? "data" : stem;
}

void apply_config(const ConfigMap& config, ExperimentSpec& spec) {
    for (const auto& [key, value] : config) {
        if (key == "data") spec.data = value;
        else if (key == "delimiter") spec.delimiter = parse_delimiter(value);
        else if (key == "dataset") spec.dataset = value;
        else if (key == "train_fraction") spec.train_fraction = to_real(key, value);
        else if (key == "valid_fraction") spec.valid_fraction = to_real(key, value);
        else if (key == "split_seed") spec.split_seed = to_u64(key, value);
        else if (key == "models") spec.models = parse_model_list(value);
        else if (key == "out") spec.out_dir = value;
        else if (key == "seed") set_all_seeds(spec, to_u64(key, value));
        else if (key == "eta") spec.train.eta = to_real(key, value);
        else if (key == "lambda") spec.train.lambda = to_real(key, value);
        else if (key == "f") spec.train.dim = to_size(key, value);
        else if (key == "max_epochs") spec.train.max_epochs = to_size(key, value);
        else if (key == "convergence_threshold") spec.train.convergence_threshold = to_real(key, value);
        else if (key == "init_scale") spec.train.init_scale = to_real(key, value);
        else if (key == "train_seed") spec.train.seed = to_u64(key, value);
        else if (key == "adam_eta") spec.train.adam_eta = to_real(key, value);
        else if (key == "adam_beta1") spec.train.adam_beta1 = to_real(key, value);
        else if (key == "adam_beta2") spec.train.adam_beta2 = to_real(key, value);
        else if (key == "adam_epsilon") spec.train.adam_epsilon = to_real(key, value);
        else if (key == "de_population") spec.de.population = to_size(key, value);
        else if (key == "de_scale") spec.de.scale = to_real(key, value);
        else if (key == "de_beta_p") spec.de.beta_p = to_real(key, value);
        else if (key == "de_beta_b") spec.de.beta_b = to_real(key, value);
        else if (key == "de_beta_q") spec.de.beta_q = to_real(key, value);
        else if (key == "de_beta_c") spec.de.beta_c = to_real(key, value);
        else if (key == "de_max_iters") spec.de.max_iters = to_size(key, value);
        else if (key == "de_fitness_epsilon") spec.de.fitness_epsilon = to_real(key, value);
        else if (key == "de_seed") spec.de.seed = to_u64(key, value);
        else if (key == "de_passes") spec.de.passes = to_size(key, value);
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

void set_all_seeds(ExperimentSpec& spec, std::uint64_t seed) {
    spec.split_seed = seed;
    spec.train.seed = seed;
    spec.de.seed = seed;
}

std::string describe(const ExperimentSpec& spec) {
    std::ostringstream os;
    std::string models;
    for (auto k : spec.models) models += (models.empty() ? "" : ",") + std::string(model_name(k));
    os << "data = " << spec.data.string() << '\n'
       << "dataset = " << spec.dataset_name() << '\n'
       << "delimiter = " << delimiter_name(spec.delimiter) << '\n'
       << "train_fraction = " << fmt_full(spec.train_fraction) << '\n'
       << "valid_fraction = " << fmt_full(spec.valid_fraction) << '\n'
       << "split_seed = " << spec.split_seed << '\n'
       << "models = " << models << '\n'
       << "eta = " << fmt_full(spec.train.eta) << '\n'
       << "lambda = " << fmt_full(spec.train.lambda) << '\n'
       << "f = " << spec.train.dim << '\n'
       << "max_epochs = " << spec.train.max_epochs << '\n'
       << "convergence_threshold = " << fmt_full(spec.train.convergence_threshold) << '\n'
       << "init_scale = " << fmt_full(spec.train.init_scale) << '\n'
       << "train_seed = " << spec.train.seed << '\n'
       << "adam_eta = " << fmt_full(spec.train.adam_eta) << '\n'
       << "adam_beta1 = " << fmt_full(spec.train.adam_beta1) << '\n'
       << "adam_beta2 = " << fmt_full(spec.train.adam_beta2) << '\n'
       << "adam_epsilon = " << fmt_full(spec.train.adam_epsilon) << '\n'
       << "de_population = " << spec.de.population << '\n'
       << "de_scale = " << fmt_full(spec.de.scale) << '\n'
       << "de_beta_p = " << fmt_full(spec.de.beta_p) << '\n'
       << "de_beta_b = " << fmt_full(spec.de.beta_b) << '\n'
       << "de_beta_q = " << fmt_full(spec.de.beta_q) << '\n'
       << "de_beta_c = " << fmt_full(spec.de.beta_c) << '\n'
       << "de_max_iters = " << spec.de.max_iters << '\n'
       << "de_fitness_epsilon = " << fmt_full(spec.de.fitness_epsilon) << '\n'
       << "de_seed = " << spec.de.seed << '\n'
       << "de_passes = " << spec.de.passes << '\n';
    return os.str();
}

DataSplits make_splits(const SparseRatingMatrix& data, double train_fraction,
                       double valid_fraction, std::uint64_t seed) {
    auto [train, test] = split(data, train_fraction, seed);
    if (valid_fraction <= 0.0) {
        SparseRatingMatrix none(data.shared_user_ids(), data.shared_item_ids(), {});
        return {std::move(train), std::move(none), std::move(test)};
    }
    auto [fit, valid] = split(train, 1.0 - valid_fraction, seed + 1);
    return {std::move(fit), std::move(valid), std::move(test)};
}

bool EvalReport::any_diverged() const noexcept {
    for (const auto& r : results)
        if (r.diverged) return true;
    return false;
}

EvalReport run_experiment(const ExperimentSpec& spec, const SparseRatingMatrix& data) {
    spec.validate();
    const auto splits = make_splits(data, spec.train_fraction, spec.valid_fraction, spec.split_seed);
    if (splits.fit.empty()) throw DataError("training split is empty");
    if (splits.test.empty()) throw DataError("test split is empty");

    const FactorModel initial = init_model(spec.train, data.num_users(), data.num_items(), spec.train.seed);
    std::optional<Pretrained> pretrained[2];

    auto pretrain = [&](bool adam) -> const Pretrained& {
        auto& slot = pretrained[adam ? 1 : 0];
        if (slot) return *slot;
        Pretrained p;
        p.model = initial;
        const auto start = Clock::now();
        try {
            p.epochs = adam ? train_adam(p.model, splits.fit, splits.valid, spec.train)
                            : train_sgd(p.model, splits.fit, splits.valid, spec.train);
        } catch (const DivergenceError& e) {
            p.diverged = true;
            p.error = e.what();
        }
        p.seconds = seconds_since(start);
        slot = std::move(p);
        return *slot;
    };

    EvalReport report;
    report.dataset = spec.dataset_name();
    for (auto kind : spec.models) {
        const auto& base = pretrain(uses_adam(kind));
        ModelResult r;
        r.kind = kind;
        r.epochs = base.epochs;
        r.train_seconds = base.seconds;
        r.diverged = base.diverged;
        r.error = base.error;
        r.model = base.model;

        if (!r.diverged && uses_sgde(kind)) {
            const auto start = Clock::now();
            try {
                r.refinement = refine_all(r.model, splits.fit, spec.de, spec.train.lambda);
            } catch (const DivergenceError& e) {
                r.diverged = true;
                r.error = e.what();
            }
            r.refine_seconds = seconds_since(start);
        }
        if (!r.diverged) {
            r.test_rmse = rmse(r.model, splits.test);
            r.test_mae = mae(r.model, splits.test);
            r.train_rmse = rmse(r.model, splits.fit);
            if (!std::isfinite(r.test_rmse) || !std::isfinite(r.test_mae)) {
                r.diverged = true;
                r.error = "non-finite test metrics";
            }
        }
        if (r.diverged) {
            r.test_rmse = r.test_mae = r.train_rmse = std::numeric_limits<double>::quiet_NaN();
        }
        report.results.push_back(std::move(r));
    }

    report.table.row_labels = {report.dataset + "/rmse", report.dataset + "/mae"};
    report.table.rows.assign(2, {});
    for (const auto& r : report.results) {
        if (r.diverged) continue;
        report.table.models.emplace_back(model_name(r.kind));
        report.table.rows[0].push_back(r.test_rmse);
        report.table.rows[1].push_back(r.test_mae);
    }
    if (!report.table.models.empty()) {
        report.f_ranks = f_rank(report.table);
        report.reference = report.table.models.back();
        for (const auto& r : report.results) {
            if (!r.diverged && uses_sgde(r.kind)) {
                report.reference = std::string(model_name(r.kind));
                break;
            }
        }
        report.win_loss = win_loss(report.table, report.reference);
    }
    return report;
}

EvalReport run_experiment(const ExperimentSpec& spec) {
    const auto data = load_ratings(spec.data, spec.delimiter);
    return run_experiment(spec, data);
}

void write_metrics_csv(std::ostream& out, const EvalReport& report) {
    out << "model,dataset,rmse,mae\n";
    for (const auto& r : report.results) {
        out << model_name(r.kind) << ',' << report.dataset << ','
            << (r.diverged ? "nan" : fmt4(r.test_rmse)) << ','
            << (r.diverged ? "nan" : fmt4(r.test_mae)) << '\n';
    }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::vector<MetricsRow> rows;
    std::string line;
    if (!std::getline(in, line) || line != "model,dataset,rmse,mae")
        throw DataError("metrics.csv: unexpected header");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        MetricsRow row;
        std::string rmse_s, mae_s;
        if (!std::getline(ls, row.model, ',') || !std::getline(ls, row.dataset, ',') ||
            !std::getline(ls, rmse_s, ',') || !std::getline(ls, mae_s))
            throw DataError("metrics.csv: malformed row", line_no);
        row.rmse = std::strtod(rmse_s.c_str(), nullptr);
        row.mae = std::strtod(mae_s.c_str(), nullptr);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_report(const EvalReport& report, const ExperimentSpec& spec,
                  const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());

    {
        std::ofstream out;
        open_for_write(out, dir / "metrics.csv");
        write_metrics_csv(out, report);
    }
    {
        std::ofstream out;
        open_for_write(out, dir / "timing.csv");
        out << "model,dataset,train_s,refine_s\n";
        for (const auto& r : report.results)
            out << model_name(r.kind) << ',' << report.dataset << ',' << fmt("%.3f", r.train_seconds)
                << ',' << fmt("%.3f", r.refine_seconds) << '\n';
    }
    {
        std::ofstream out;
        open_for_write(out, dir / "ranks.csv");
        out << "model,f_rank,wins,losses\n";
        for (std::size_t j = 0; j < report.table.models.size(); ++j)
            out << report.table.models[j] << ',' << fmt2(report.f_ranks[j]) << ','
                << report.win_loss[j].wins << ',' << report.win_loss[j].losses << '\n';
    }
    for (const auto& r : report.results) {
        std::ofstream out;
        open_for_write(out, dir / ("trace_" + file_tag(r.kind) + ".csv"));
        write_trace_csv(out, r.epochs);
        if (r.refinement) {
            std::ofstream rout;
            open_for_write(rout, dir / ("trace_" + file_tag(r.kind) + "_refine.csv"));
            write_refine_trace_csv(rout, *r.refinement);
        }
    }

    std::ofstream out;
    open_for_write(out, dir / "summary.txt");
    out << "# settings\n" << describe(spec) << "\n# results on " << report.dataset << " (test split)\n";
    for (const auto& r : report.results) {
        out << model_name(r.kind) << ": ";
        if (r.diverged) {
            out << "diverged (" << r.error << ")\n";
            continue;
        }
        out << "rmse " << fmt4(r.test_rmse) << ", mae " << fmt4(r.test_mae) << ", train rmse "
            << fmt4(r.train_rmse) << ", train " << fmt("%.3f", r.train_seconds) << " s, refine "
            << fmt("%.3f", r.refine_seconds) << " s\n";
    }
    if (report.table.models.empty()) return;

    std::size_t ref_pos = 0;
    for (std::size_t k = 0; k < report.results.size(); ++k)
        if (model_name(report.results[k].kind) == report.reference) ref_pos = k;
    const auto& ref = report.results[ref_pos];
    out << "\n# " << report.reference << " against its peers\n";
    for (const auto& r : report.results) {
        if (r.diverged || r.kind == ref.kind) continue;
        out << "vs " << model_name(r.kind) << ": rmse improvement "
            << fmt2(improvement_pct(r.test_rmse, ref.test_rmse)) << "%, mae improvement "
            << fmt2(improvement_pct(r.test_mae, ref.test_mae)) << '%';
        const double peer_time = r.train_seconds + r.refine_seconds;
        if (peer_time > 0.0)
            out << ", run-time saving "
                << fmt2(runtime_saving_pct(peer_time, ref.train_seconds + ref.refine_seconds)) << '%';
        out << '\n';
    }
    out << "\n# F-rank and win/loss of " << report.reference << '\n';
    for (std::size_t j = 0; j < report.table.models.size(); ++j)
        out << report.table.models[j] << ": F-rank " << fmt2(report.f_ranks[j]) << ", win/loss "
            << report.win_loss[j].wins << '/' << report.win_loss[j].losses << '\n';
}

}  // namespace sgde
