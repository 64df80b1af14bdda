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

// Command-line front end: train, refine, eval, bench and synth subcommands.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sgde/experiment.hpp"

namespace fs = std::filesystem;
using namespace sgde;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDivergence = 3;

struct CommonOptions {
    std::string config;
    std::string data;
    std::string delimiter;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string models;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config, "Flat 'key = value' settings file");
    cmd->add_option("--data", opts.data, "Rating file (user item rating [timestamp])");
    cmd->add_option("--delimiter", opts.delimiter, "tab, comma, ws or colons")
        ->check(CLI::IsMember({"tab", "comma", "ws", "colons"}));
    cmd->add_option("--seed", opts.seed, "Seed for the split, initialization and DE");
    cmd->add_option("--out", opts.out, "Output directory");
    cmd->add_option("--models", opts.models, "Comma list of sgd, adam, sgd+sgde, adam+sgde");
}

ExperimentSpec build_spec(const CommonOptions& opts) {
    ExperimentSpec spec;
    if (!opts.config.empty()) apply_config(load_config(opts.config), spec);
    if (!opts.data.empty()) spec.data = opts.data;
    if (!opts.delimiter.empty()) spec.delimiter = parse_delimiter(opts.delimiter);
    if (opts.seed) set_all_seeds(spec, *opts.seed);
    if (!opts.out.empty()) spec.out_dir = opts.out;
    if (!opts.models.empty()) spec.models = parse_model_list(opts.models);
    if (spec.data.empty()) throw std::invalid_argument("no data file given (--data or 'data =' in config)");
    spec.validate();
    return spec;
}

DataSplits load_splits(const ExperimentSpec& spec) {
    const auto data = load_ratings(spec.data, spec.delimiter);
    auto splits = make_splits(data, spec.train_fraction, spec.valid_fraction, spec.split_seed);
    if (splits.fit.empty()) throw DataError("training split is empty");
    return splits;
}

void check_model_shape(const FactorModel& m, const DataSplits& s) {
    if (m.num_users() != s.fit.num_users() || m.num_items() != s.fit.num_items())
        throw DataError("model shape " + std::to_string(m.num_users()) + "x" +
                        std::to_string(m.num_items()) + " does not match the data set");
}

void print_metric(const char* label, double value) { std::printf("%-12s %.4f\n", label, value); }

int cmd_train(const ExperimentSpec& spec) {
    const auto kind = spec.models.front();
    if (uses_sgde(kind)) throw std::invalid_argument("train runs sgd or adam only; use refine or bench for SGDE");
    const auto splits = load_splits(spec);
    auto model = init_model(spec.train, splits.fit.num_users(), splits.fit.num_items(), spec.train.seed);
    const auto trace = uses_adam(kind) ? train_adam(model, splits.fit, splits.valid, spec.train)
                                       : train_sgd(model, splits.fit, splits.valid, spec.train);

    fs::create_directories(spec.out_dir);
    save_model(spec.out_dir / "model.txt", model);
    std::ofstream out(spec.out_dir / ("trace_" + std::string(model_name(kind)) + ".csv"));
    write_trace_csv(out, trace);

    std::printf("%s: %zu epochs\n", std::string(model_name(kind)).c_str(), trace.size());
    print_metric("train rmse", rmse(model, splits.fit));
    if (!splits.test.empty()) {
        print_metric("test rmse", rmse(model, splits.test));
        print_metric("test mae", mae(model, splits.test));
    }
    return kExitOk;
}

int cmd_refine(const ExperimentSpec& spec, const std::string& model_path) {
    const auto splits = load_splits(spec);
    auto model = load_model(model_path);
    check_model_shape(model, splits);
    const double before_train = rmse(model, splits.fit);
    const double before_obj = objective(model, splits.fit, spec.train.lambda);

    const auto trace = refine_all(model, splits.fit, spec.de, spec.train.lambda);

    fs::create_directories(spec.out_dir);
    save_model(spec.out_dir / "model_refined.txt", model);
    std::ofstream out(spec.out_dir / "trace_refine.csv");
    write_refine_trace_csv(out, trace);

    std::printf("refined %zu sub-groups (%zu skipped)\n", trace.subgroups.size(), trace.skipped);
    std::printf("objective    %.6f -> %.6f\n", before_obj, objective(model, splits.fit, spec.train.lambda));
    std::printf("train rmse   %.4f -> %.4f\n", before_train, rmse(model, splits.fit));
    if (!splits.test.empty()) {
        print_metric("test rmse", rmse(model, splits.test));
        print_metric("test mae", mae(model, splits.test));
    }
    return kExitOk;
}

int cmd_eval(const ExperimentSpec& spec, const std::string& model_path) {
    const auto splits = load_splits(spec);
    const auto model = load_model(model_path);
    check_model_shape(model, splits);
    print_metric("train rmse", rmse(model, splits.fit));
    print_metric("train mae", mae(model, splits.fit));
    if (!splits.test.empty()) {
        print_metric("test rmse", rmse(model, splits.test));
        print_metric("test mae", mae(model, splits.test));
    }
    return kExitOk;
}

int cmd_bench(const ExperimentSpec& spec) {
    const auto report = run_experiment(spec);
    write_report(report, spec, spec.out_dir);
    std::ifstream summary(spec.out_dir / "summary.txt");
    std::cout << summary.rdbuf();
    return report.any_diverged() ? kExitDivergence : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latent factor analysis with sequential-group differential evolution refinement"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string model_path;

    auto* train = app.add_subcommand("train", "Pre-train a model with SGD or Adam");
    add_common(train, opts);
    auto* refine = app.add_subcommand("refine", "Refine a saved model with SGDE");
    add_common(refine, opts);
    refine->add_option("--model", model_path, "Model file written by train")->required();
    auto* eval = app.add_subcommand("eval", "Evaluate a saved model on the split");
    add_common(eval, opts);
    eval->add_option("--model", model_path, "Model file")->required();
    auto* bench = app.add_subcommand("bench", "Run a full comparison and write reports");
    add_common(bench, opts);

    SyntheticSpec synth_spec;
    std::string synth_output;
    auto* synth = app.add_subcommand("synth", "Write a seeded low-rank rating file (tab separated)");
    synth->add_option("--users", synth_spec.num_users, "Number of users")->capture_default_str();
    synth->add_option("--items", synth_spec.num_items, "Number of items")->capture_default_str();
    synth->add_option("--rank", synth_spec.rank, "Rank of the generating factors")->capture_default_str();
    synth->add_option("--density", synth_spec.density, "Fraction of observed cells")->capture_default_str();
    synth->add_option("--noise", synth_spec.noise_sigma, "Standard deviation of Gaussian noise")->capture_default_str();
    synth->add_option("--offset", synth_spec.offset, "Constant added to every rating")->capture_default_str();
    synth->add_option("--seed", synth_spec.seed, "Generator seed")->capture_default_str();
    synth->add_option("--output", synth_output, "Destination file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed()) {
            const auto m = make_low_rank(synth_spec);
            std::ofstream out(synth_output);
            if (!out) throw DataError("cannot write " + synth_output);
            char buf[64];
            for (const auto& t : m.triples()) {
                std::snprintf(buf, sizeof buf, "%.17g", t.value);
                out << m.user_ids().id(t.user) << '\t' << m.item_ids().id(t.item) << '\t' << buf << '\n';
            }
            return kExitOk;
        }
        const auto spec = build_spec(opts);
        if (train->parsed()) return cmd_train(spec);
        if (refine->parsed()) return cmd_refine(spec, model_path);
        if (eval->parsed()) return cmd_eval(spec, model_path);
        return cmd_bench(spec);
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
}
