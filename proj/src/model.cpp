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

#include "sgde/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace sgde {

namespace {

void check_indices(const FactorModel& m, std::size_t u, std::size_t i) {
    if (u >= m.num_users())
        throw std::out_of_range("user index " + std::to_string(u) + " out of range");
    if (i >= m.num_items())
        throw std::out_of_range("item index " + std::to_string(i) + " out of range");
}

double residual(const FactorModel& m, const RatingTriple& r) {
    return r.value - (detail::dot(m.p(r.user), m.q(r.item)) + m.b(r.user) + m.c(r.item));
}

void write_row(std::ostream& out, std::span<const double> row) {
    char buf[32];
    for (std::size_t k = 0; k < row.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", row[k]);
        if (k) out << ' ';
        out << buf;
    }
    out << '\n';
}

void read_values(std::istream& in, std::span<double> dst, const char* block) {
    for (auto& x : dst) {
        if (!(in >> x)) throw DataError(std::string("truncated or malformed model block ") + block);
    }
}

}  // namespace

FactorModel::FactorModel(std::size_t num_users, std::size_t num_items, std::size_t dim)
    : dim_(dim), p_(num_users * dim), q_(num_items * dim), b_(num_users), c_(num_items) {}

bool FactorModel::all_finite() const noexcept {
    for (const auto* v : {&p_, &q_, &b_, &c_})
        for (double x : *v)
            if (!std::isfinite(x)) return false;
    return true;
}

void TrainConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be non-negative");
    if (dim < 1) throw std::invalid_argument("latent dimension f must be at least 1");
    if (!(convergence_threshold > 0.0) || !std::isfinite(convergence_threshold))
        throw std::invalid_argument("convergence threshold must be positive and finite");
    if (!(init_scale > 0.0) || !std::isfinite(init_scale))
        throw std::invalid_argument("init scale must be positive");
    if (!(adam_eta > 0.0)) throw std::invalid_argument("adam eta must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
        throw std::invalid_argument("adam betas must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) throw std::invalid_argument("adam epsilon must be positive");
}

FactorModel init_model(const TrainConfig& cfg, std::size_t num_users, std::size_t num_items,
                       std::uint64_t seed) {
    FactorModel m(num_users, num_items, cfg.dim);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, cfg.init_scale);
    // dist draws from [0, s); reflecting gives (0, s].
    for (auto& x : m.p_data()) x = cfg.init_scale - dist(rng);
    for (auto& x : m.q_data()) x = cfg.init_scale - dist(rng);
    return m;
}

double predict(const FactorModel& m, std::size_t u, std::size_t i) {
    check_indices(m, u, i);
    return detail::dot(m.p(u), m.q(i)) + m.b(u) + m.c(i);
}

double instance_loss(const FactorModel& m, const RatingTriple& r, double lambda) {
    check_indices(m, r.user, r.item);
    const double e = residual(m, r);
    const double reg = detail::squared_norm(m.p(r.user)) + detail::squared_norm(m.q(r.item)) +
                       m.b(r.user) * m.b(r.user) + m.c(r.item) * m.c(r.item);
    return 0.5 * e * e + 0.5 * lambda * reg;
}

InstanceGradients instance_gradients(const FactorModel& m, const RatingTriple& r, double lambda) {
    check_indices(m, r.user, r.item);
    const double e = residual(m, r);
    const auto p = m.p(r.user);
    const auto q = m.q(r.item);
    InstanceGradients g;
    g.p.resize(m.dim());
    g.q.resize(m.dim());
    for (std::size_t k = 0; k < m.dim(); ++k) {
        g.p[k] = -e * q[k] + lambda * p[k];
        g.q[k] = -e * p[k] + lambda * q[k];
    }
    g.b = -e + lambda * m.b(r.user);
    g.c = -e + lambda * m.c(r.item);
    return g;
}

double rmse(const FactorModel& m, const SparseRatingMatrix& data) {
    if (data.empty()) throw std::invalid_argument("rmse of an empty data set");
    double sse = 0.0;
    for (const auto& t : data.triples()) {
        check_indices(m, t.user, t.item);
        const double e = residual(m, t);
        sse += e * e;
    }
    return std::sqrt(sse / static_cast<double>(data.size()));
}

double mae(const FactorModel& m, const SparseRatingMatrix& data) {
    if (data.empty()) throw std::invalid_argument("mae of an empty data set");
    double sae = 0.0;
    for (const auto& t : data.triples()) {
        check_indices(m, t.user, t.item);
        sae += std::abs(residual(m, t));
    }
    return sae / static_cast<double>(data.size());
}

double regularization_mass(const FactorModel& m) {
    return detail::squared_norm(m.p_data()) + detail::squared_norm(m.q_data()) +
           detail::squared_norm(m.b_data()) + detail::squared_norm(m.c_data());
}

double objective(const FactorModel& m, const SparseRatingMatrix& data, double lambda) {
    double sse = 0.0;
    for (const auto& t : data.triples()) {
        check_indices(m, t.user, t.item);
        const double e = residual(m, t);
        sse += e * e;
    }
    return 0.5 * sse + 0.5 * lambda * regularization_mass(m);
}

double summed_instance_loss(const FactorModel& m, const SparseRatingMatrix& data, double lambda) {
    double total = 0.0;
    for (const auto& t : data.triples()) total += instance_loss(m, t, lambda);
    return total;
}

void write_model(std::ostream& out, const FactorModel& m) {
    out << "SGDELF1\n" << m.num_users() << ' ' << m.num_items() << ' ' << m.dim() << '\n';
    for (std::size_t u = 0; u < m.num_users(); ++u) write_row(out, m.p(u));
    for (std::size_t i = 0; i < m.num_items(); ++i) write_row(out, m.q(i));
    write_row(out, m.b_data());
    write_row(out, m.c_data());
}

FactorModel read_model(std::istream& in) {
    std::string magic;
    if (!(in >> magic) || magic != "SGDELF1") throw DataError("missing SGDELF1 header");
    std::size_t nu = 0, ni = 0, f = 0;
    if (!(in >> nu >> ni >> f)) throw DataError("malformed model dimensions");
    FactorModel m(nu, ni, f);
    read_values(in, m.p_data(), "P");
    read_values(in, m.q_data(), "Q");
    read_values(in, m.b_data(), "b");
    read_values(in, m.c_data(), "c");
    if (!m.all_finite()) throw DataError("model contains non-finite parameters");
    return m;
}

void save_model(const std::filesystem::path& path, const FactorModel& m) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_model(out, m);
}

FactorModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_model(in);
}

}  // namespace sgde
