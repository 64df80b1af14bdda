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

#include "sgde/refine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sgde {

namespace {

void require_finite_fitness(double f) {
    if (!std::isfinite(f)) throw DivergenceError("non-finite fitness value");
}

std::vector<double> row_anchor(const FactorModel& m, std::uint32_t u) {
    std::vector<double> x(m.p(u).begin(), m.p(u).end());
    x.push_back(m.b(u));
    return x;
}

std::vector<double> col_anchor(const FactorModel& m, std::uint32_t i) {
    std::vector<double> x(m.q(i).begin(), m.q(i).end());
    x.push_back(m.c(i));
    return x;
}

void check_entity(std::span<const double> x, const FactorModel& m) {
    if (x.size() != m.dim() + 1)
        throw std::invalid_argument("entity length must be f + 1");
}

}  // namespace

void DEConfig::validate() const {
    if (population < 3)
        throw std::invalid_argument("DE population must hold at least 3 entities");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("DE scaling factor must be positive");
    for (double beta : {beta_p, beta_b, beta_q, beta_c})
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw std::invalid_argument("DE initialization widths must be non-negative");
    if (max_iters < 1) throw std::invalid_argument("DE max iterations must be at least 1");
    if (!(fitness_epsilon >= 0.0)) throw std::invalid_argument("DE fitness epsilon must be >= 0");
    if (passes < 1) throw std::invalid_argument("DE passes must be at least 1");
}

const char* subgroup_name(SubgroupKind kind) {
    return kind == SubgroupKind::Row ? "row" : "col";
}

double row_fitness(std::span<const double> x, std::uint32_t u, const FactorModel& m,
                   const SparseRatingMatrix& train, double lambda) {
    check_entity(x, m);
    const auto p = x.first(m.dim());
    const double b = x.back();
    double sse = 0.0;
    for (auto pos : train.row_positions(u)) {
        const auto& t = train[pos];
        const double e = t.value - detail::dot(p, m.q(t.item)) - b - m.c(t.item);
        sse += e * e;
    }
    const double f = 0.5 * sse + 0.5 * lambda * (detail::squared_norm(p) + b * b);
    require_finite_fitness(f);
    return f;
}

double col_fitness(std::span<const double> x, std::uint32_t i, const FactorModel& m,
                   const SparseRatingMatrix& train, double lambda) {
    check_entity(x, m);
    const auto q = x.first(m.dim());
    const double c = x.back();
    double sse = 0.0;
    for (auto pos : train.col_positions(i)) {
        const auto& t = train[pos];
        const double e = t.value - detail::dot(m.p(t.user), q) - m.b(t.user) - c;
        sse += e * e;
    }
    const double f = 0.5 * sse + 0.5 * lambda * (detail::squared_norm(q) + c * c);
    require_finite_fitness(f);
    return f;
}

DEPopulation init_population(SubgroupKind kind, std::size_t index, std::span<const double> anchor,
                             double beta_factor, double beta_bias, std::size_t population_size,
                             Rng& rng, const FitnessFn& fitness) {
    if (population_size < 1) throw std::invalid_argument("empty DE population");
    if (anchor.empty()) throw std::invalid_argument("empty anchor vector");

    DEPopulation pop;
    pop.kind = kind;
    pop.index = index;
    pop.entities.reserve(population_size);
    pop.entities.push_back({std::vector<double>(anchor.begin(), anchor.end()), 0.0});

    const std::size_t bias_pos = anchor.size() - 1;
    for (std::size_t k = 1; k < population_size; ++k) {
        DEEntity e;
        e.x.resize(anchor.size());
        for (std::size_t j = 0; j < anchor.size(); ++j) {
            const double beta = j == bias_pos ? beta_bias : beta_factor;
            double lo = (1.0 - beta) * anchor[j];
            double hi = (1.0 + beta) * anchor[j];
            if (lo > hi) std::swap(lo, hi);
            std::uniform_real_distribution<double> dist(lo, hi);
            e.x[j] = dist(rng);
        }
        pop.entities.push_back(std::move(e));
    }
    for (auto& e : pop.entities) {
        e.fitness = fitness(e.x);
        require_finite_fitness(e.fitness);
    }
    pop.best = global_best(pop);
    return pop;
}

DEPopulation init_row_population(const FactorModel& m, std::uint32_t u, const DEConfig& cfg,
                                 Rng& rng, const FitnessFn& fitness) {
    if (u >= m.num_users()) throw std::out_of_range("user index out of range");
    const auto anchor = row_anchor(m, u);
    return init_population(SubgroupKind::Row, u, anchor, cfg.beta_p, cfg.beta_b, cfg.population,
                           rng, fitness);
}

DEPopulation init_col_population(const FactorModel& m, std::uint32_t i, const DEConfig& cfg,
                                 Rng& rng, const FitnessFn& fitness) {
    if (i >= m.num_items()) throw std::out_of_range("item index out of range");
    const auto anchor = col_anchor(m, i);
    return init_population(SubgroupKind::Column, i, anchor, cfg.beta_q, cfg.beta_c, cfg.population,
                           rng, fitness);
}

std::size_t global_best(const DEPopulation& pop) {
    if (pop.entities.empty()) throw std::invalid_argument("global best of an empty population");
    std::size_t best = 0;
    for (std::size_t k = 0; k < pop.entities.size(); ++k) {
        require_finite_fitness(pop.entities[k].fitness);
        if (pop.entities[k].fitness < pop.entities[best].fitness) best = k;
    }
    return best;
}

std::pair<std::size_t, std::size_t> draw_donors(std::size_t population_size, std::size_t k, Rng& rng) {
    if (population_size < 3)
        throw std::invalid_argument("best/1 mutation needs at least 3 entities");
    if (k >= population_size) throw std::out_of_range("entity index out of range");
    // Draw from the K−1 slots excluding k, then shift past k.
    std::uniform_int_distribution<std::size_t> first(0, population_size - 2);
    std::uniform_int_distribution<std::size_t> second(0, population_size - 3);
    std::size_t a = first(rng);
    std::size_t b = second(rng);
    if (b >= a) ++b;
    if (a >= k) ++a;
    if (b >= k) ++b;
    return {a, b};
}

Mutation mutate_best1_traced(const DEPopulation& pop, std::size_t k, const DEConfig& cfg, Rng& rng) {
    const auto [a, b] = draw_donors(pop.size(), k, rng);
    const auto& best = pop.best_entity().x;
    const auto& da = pop.entities[a].x;
    const auto& db = pop.entities[b].x;

    Mutation out;
    out.donor_a = a;
    out.donor_b = b;
    out.mutant.x.resize(best.size());
    for (std::size_t j = 0; j < best.size(); ++j)
        out.mutant.x[j] = best[j] + cfg.scale * (da[j] - db[j]);
    out.mutant.fitness = std::numeric_limits<double>::quiet_NaN();
    return out;
}

DEEntity mutate_best1(const DEPopulation& pop, std::size_t k, const DEConfig& cfg, Rng& rng) {
    return mutate_best1_traced(pop, k, cfg, rng).mutant;
}

bool select(DEPopulation& pop, std::size_t k, DEEntity mutant, double mutant_fitness) {
    if (k >= pop.size()) throw std::out_of_range("entity index out of range");
    require_finite_fitness(mutant_fitness);
    require_finite_fitness(pop.entities[k].fitness);
    if (!(mutant_fitness < pop.entities[k].fitness)) return false;

    mutant.fitness = mutant_fitness;
    pop.entities[k] = std::move(mutant);
    if (mutant_fitness < pop.entities[pop.best].fitness) pop.best = k;
    return true;
}

SubgroupRecord refine_subgroup(DEPopulation& pop, const FitnessFn& fitness, const DEConfig& cfg,
                               Rng& rng, const RefineObserver* observer) {
    SubgroupRecord rec;
    rec.kind = pop.kind;
    rec.index = pop.index;
    rec.initial_fitness = pop.entities.at(0).fitness;
    pop.best = global_best(pop);
    rec.best_history.push_back(pop.best_entity().fitness);

    const bool observe = observer && observer->on_selection;
    while (pop.iteration < cfg.max_iters) {
        const double before = pop.best_entity().fitness;
        const DEPopulation parents = pop;
        const std::size_t tau = pop.iteration + 1;

        for (std::size_t k = 0; k < pop.size(); ++k) {
            auto mutation = mutate_best1_traced(parents, k, cfg, rng);
            const double fm = fitness(mutation.mutant.x);
            require_finite_fitness(fm);
            if (observe) {
                const DEEntity candidate = mutation.mutant;
                const bool accepted = select(pop, k, std::move(mutation.mutant), fm);
                observer->on_selection(
                    SelectionEvent{parents, tau, k, mutation.donor_a, mutation.donor_b, candidate, accepted});
            } else {
                select(pop, k, std::move(mutation.mutant), fm);
            }
        }
        pop.iteration = tau;
        const double after = pop.best_entity().fitness;
        rec.best_history.push_back(after);
        if (before - after < cfg.fitness_epsilon) break;
    }
    rec.iterations = pop.iteration;
    rec.final_fitness = pop.best_entity().fitness;
    return rec;
}

double RefineTrace::total_fitness_gain() const {
    double total = 0.0;
    for (const auto& s : subgroups) total += s.initial_fitness - s.final_fitness;
    return total;
}

RefineTrace refine_all(FactorModel& m, const SparseRatingMatrix& train, const DEConfig& cfg,
                       double lambda, const RefineObserver* observer) {
    cfg.validate();
    if (train.num_users() > m.num_users() || train.num_items() > m.num_items())
        throw std::invalid_argument("model dimensions do not cover the training set");

    Rng rng(cfg.seed);
    RefineTrace trace;
    const std::size_t f = m.dim();

    auto finish = [&](SubgroupRecord rec, std::size_t pass) {
        rec.pass = pass;
        if (observer && observer->on_writeback) observer->on_writeback(rec, m);
        trace.subgroups.push_back(std::move(rec));
    };

    for (std::size_t pass = 0; pass < cfg.passes; ++pass) {
        for (std::uint32_t u = 0; u < train.num_users(); ++u) {
            if (train.row_positions(u).empty()) {
                ++trace.skipped;
                continue;
            }
            const FitnessFn fit = [&, u](std::span<const double> x) {
                return row_fitness(x, u, m, train, lambda);
            };
            auto pop = init_row_population(m, u, cfg, rng, fit);
            auto rec = refine_subgroup(pop, fit, cfg, rng, observer);
            const auto& best = pop.best_entity().x;
            std::copy_n(best.begin(), f, m.p(u).begin());
            m.b(u) = best[f];
            finish(std::move(rec), pass);
        }
        for (std::uint32_t i = 0; i < train.num_items(); ++i) {
            if (train.col_positions(i).empty()) {
                ++trace.skipped;
                continue;
            }
            const FitnessFn fit = [&, i](std::span<const double> x) {
                return col_fitness(x, i, m, train, lambda);
            };
            auto pop = init_col_population(m, i, cfg, rng, fit);
            auto rec = refine_subgroup(pop, fit, cfg, rng, observer);
            const auto& best = pop.best_entity().x;
            std::copy_n(best.begin(), f, m.q(i).begin());
            m.c(i) = best[f];
            finish(std::move(rec), pass);
        }
    }
    return trace;
}

void write_refine_trace_csv(std::ostream& out, const RefineTrace& trace) {
    out << "subgroup_kind,index,initial_fitness,final_fitness,iterations\n";
    char buf[160];
    for (const auto& s : trace.subgroups) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%zu\n", subgroup_name(s.kind), s.index,
                      s.initial_fitness, s.final_fitness, s.iterations);
        out << buf;
    }
}

}  // namespace sgde
