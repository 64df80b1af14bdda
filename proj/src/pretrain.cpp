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

#include "sgde/pretrain.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

namespace sgde {

namespace {

[[noreturn]] void diverged(const char* what, double eta) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s diverged (eta = %g)", what, eta);
    throw DivergenceError(buf);
}

bool finite_block(const RatingTriple& r, const FactorModel& m) {
    for (double x : m.p(r.user))
        if (!std::isfinite(x)) return false;
    for (double x : m.q(r.item))
        if (!std::isfinite(x)) return false;
    return std::isfinite(m.b(r.user)) && std::isfinite(m.c(r.item));
}

void check_shape(const FactorModel& m, const SparseRatingMatrix& data) {
    if (data.num_users() > m.num_users() || data.num_items() > m.num_items())
        throw std::invalid_argument("model dimensions do not cover the data set");
}

template <typename Step>
std::vector<EpochTrace> run_epochs(FactorModel& m, const SparseRatingMatrix& train,
                                   const SparseRatingMatrix& valid, const TrainConfig& cfg,
                                   double eta, const char* name, Step&& step) {
    cfg.validate();
    std::vector<EpochTrace> trace;
    if (cfg.max_epochs == 0) return trace;
    if (train.empty()) throw std::invalid_argument("training set is empty");
    check_shape(m, train);
    check_shape(m, valid);

    const auto start = std::chrono::steady_clock::now();
    const auto triples = train.triples();
    double previous = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        for (auto pos : epoch_order(triples.size(), cfg.seed, epoch)) step(triples[pos]);

        EpochTrace t;
        t.epoch = epoch;
        t.train_rmse = rmse(m, train);
        t.valid_rmse = valid.empty() ? t.train_rmse : rmse(m, valid);
        t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!std::isfinite(t.train_rmse) || !std::isfinite(t.valid_rmse)) diverged(name, eta);
        trace.push_back(t);

        if (std::isfinite(previous) && std::abs(t.valid_rmse - previous) < cfg.convergence_threshold)
            break;
        previous = t.valid_rmse;
    }
    return trace;
}

}  // namespace

AdamState::AdamState(const FactorModel& shape, double b1, double b2, double eps)
    : first(shape.num_users(), shape.num_items(), shape.dim()),
      second(shape.num_users(), shape.num_items(), shape.dim()),
      beta1(b1),
      beta2(b2),
      epsilon(eps) {}

void sgd_step(FactorModel& m, const RatingTriple& r, double eta, double lambda) {
    if (r.user >= m.num_users() || r.item >= m.num_items())
        throw std::out_of_range("rating index out of model range");
    auto p = m.p(r.user);
    auto q = m.q(r.item);
    const double e = r.value - (detail::dot(p, q) + m.b(r.user) + m.c(r.item));
    for (std::size_t k = 0; k < m.dim(); ++k) {
        const double pk = p[k];
        const double qk = q[k];
        p[k] = pk - eta * (-e * qk + lambda * pk);
        q[k] = qk - eta * (-e * pk + lambda * qk);
    }
    m.b(r.user) -= eta * (-e + lambda * m.b(r.user));
    m.c(r.item) -= eta * (-e + lambda * m.c(r.item));
    if (!finite_block(r, m)) diverged("sgd step", eta);
}

void adam_step(FactorModel& m, AdamState& s, const RatingTriple& r, double eta, double lambda) {
    if (r.user >= m.num_users() || r.item >= m.num_items())
        throw std::out_of_range("rating index out of model range");
    const auto g = instance_gradients(m, r, lambda);
    ++s.step;
    const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));

    auto update = [&](double& x, double& mom1, double& mom2, double grad) {
        mom1 = s.beta1 * mom1 + (1.0 - s.beta1) * grad;
        mom2 = s.beta2 * mom2 + (1.0 - s.beta2) * grad * grad;
        const double mhat = mom1 / c1;
        const double vhat = mom2 / c2;
        x -= eta * mhat / (std::sqrt(vhat) + s.epsilon);
    };

    auto p = m.p(r.user);
    auto q = m.q(r.item);
    auto pm = s.first.p(r.user), pv = s.second.p(r.user);
    auto qm = s.first.q(r.item), qv = s.second.q(r.item);
    for (std::size_t k = 0; k < m.dim(); ++k) {
        update(p[k], pm[k], pv[k], g.p[k]);
        update(q[k], qm[k], qv[k], g.q[k]);
    }
    update(m.b(r.user), s.first.b(r.user), s.second.b(r.user), g.b);
    update(m.c(r.item), s.first.c(r.item), s.second.c(r.item), g.c);
    if (!finite_block(r, m)) diverged("adam step", eta);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

std::vector<EpochTrace> train_sgd(FactorModel& m, const SparseRatingMatrix& train,
                                  const SparseRatingMatrix& valid, const TrainConfig& cfg) {
    return run_epochs(m, train, valid, cfg, cfg.eta, "sgd training",
                      [&](const RatingTriple& r) { sgd_step(m, r, cfg.eta, cfg.lambda); });
}

std::vector<EpochTrace> train_adam(FactorModel& m, const SparseRatingMatrix& train,
                                   const SparseRatingMatrix& valid, const TrainConfig& cfg) {
    AdamState state(m, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
    return run_epochs(m, train, valid, cfg, cfg.adam_eta, "adam training",
                      [&](const RatingTriple& r) { adam_step(m, state, r, cfg.adam_eta, cfg.lambda); });
}

void write_trace_csv(std::ostream& out, const std::vector<EpochTrace>& trace) {
    out << "epoch,train_rmse,valid_rmse,seconds\n";
    char buf[128];
    for (const auto& t : trace) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.3f\n", t.epoch, t.train_rmse, t.valid_rmse,
                      t.seconds);
        out << buf;
    }
}

}  // namespace sgde
