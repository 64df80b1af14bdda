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
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "sgde/data.hpp"
#include "sgde/model.hpp"

namespace sgde {

using Rng = std::mt19937_64;

/// Sequential-group differential evolution settings.
struct DEConfig {
    std::size_t population = 10;   // K
    double scale = 0.4;            // mutation scaling factor m
    double beta_p = 0.1;           // init half-width for user factors
    double beta_b = 0.1;           // ... user bias
    double beta_q = 0.1;           // ... item factors
    double beta_c = 0.1;           // ... item bias
    std::size_t max_iters = 20;    // T_DE
    double fitness_epsilon = 1e-6; // stop when d̄ improves by less than this in one iteration
    std::uint64_t seed = 1;
    std::size_t passes = 1;        // full rows-then-columns sweeps

    void validate() const;
};

enum class SubgroupKind { Row, Column };

const char* subgroup_name(SubgroupKind kind);

/// Candidate sub-vector [p_u, b_u] or [q_i, c_i]: f factor coordinates then the bias.
struct DEEntity {
    std::vector<double> x;
    double fitness = 0.0;
};

struct DEPopulation {
    SubgroupKind kind = SubgroupKind::Row;
    std::size_t index = 0;
    std::vector<DEEntity> entities;
    std::size_t best = 0;       // position of d̄ in entities
    std::size_t iteration = 0;  // τ

    const DEEntity& best_entity() const { return entities[best]; }
    std::size_t size() const noexcept { return entities.size(); }
};

/// Fitness of a candidate sub-vector with every other parameter held fixed.
using FitnessFn = std::function<double(std::span<const double>)>;

/// ½ Σ_{i ∈ Λ(u)} (r_{u,i} − p·q_i − b − c_i)² + (λ/2)(‖p‖² + b²), with (p, b) taken from x.
double row_fitness(std::span<const double> x, std::uint32_t u, const FactorModel& m,
                   const SparseRatingMatrix& train, double lambda);
/// Column mirror of row_fitness over Λ(i), with (q, c) taken from x.
double col_fitness(std::span<const double> x, std::uint32_t i, const FactorModel& m,
                   const SparseRatingMatrix& train, double lambda);

/// Builds K entities around an anchor sub-vector. Entity 0 is the anchor; the
/// others draw each coordinate uniformly between (1−β)x and (1+β)x (sorted),
/// with beta_factor for the first f coordinates and beta_bias for the last.
DEPopulation init_population(SubgroupKind kind, std::size_t index, std::span<const double> anchor,
                             double beta_factor, double beta_bias, std::size_t population_size,
                             Rng& rng, const FitnessFn& fitness);

DEPopulation init_row_population(const FactorModel& m, std::uint32_t u, const DEConfig& cfg,
                                 Rng& rng, const FitnessFn& fitness);
DEPopulation init_col_population(const FactorModel& m, std::uint32_t i, const DEConfig& cfg,
                                 Rng& rng, const FitnessFn& fitness);

/// Index of the minimal-fitness entity, lowest index on ties. Throws
/// DivergenceError on a non-finite fitness.
std::size_t global_best(const DEPopulation& pop);

/// Two distinct donor indices drawn uniformly from {0..K−1} \ {k}.
std::pair<std::size_t, std::size_t> draw_donors(std::size_t population_size, std::size_t k, Rng& rng);

struct Mutation {
    DEEntity mutant;  // fitness not evaluated
    std::size_t donor_a = 0;
    std::size_t donor_b = 0;
};

/// best/1 mutant d̄ + m·(d_a − d_b). No crossover follows.
Mutation mutate_best1_traced(const DEPopulation& pop, std::size_t k, const DEConfig& cfg, Rng& rng);
DEEntity mutate_best1(const DEPopulation& pop, std::size_t k, const DEConfig& cfg, Rng& rng);

/// Greedy replacement: entity k becomes the mutant iff its fitness is strictly
/// lower. Updates d̄ when the accepted entity beats it. Returns whether the
/// mutant was accepted.
bool select(DEPopulation& pop, std::size_t k, DEEntity mutant, double mutant_fitness);

/// Emitted for every selection inside refine_subgroup.
struct SelectionEvent {
    const DEPopulation& parents;  // population at the start of the iteration
    std::size_t iteration = 0;
    std::size_t k = 0;
    std::size_t donor_a = 0;
    std::size_t donor_b = 0;
    const DEEntity& mutant;
    bool accepted = false;
};

struct SubgroupRecord {
    SubgroupKind kind = SubgroupKind::Row;
    std::size_t index = 0;
    std::size_t pass = 0;
    double initial_fitness = 0.0;      // entity 0, the incoming sub-vector
    double final_fitness = 0.0;        // d̄ after refinement
    std::size_t iterations = 0;
    std::vector<double> best_history;  // d̄ fitness at τ = 0, 1, ...
};

/// Optional instrumentation; empty callbacks are skipped.
struct RefineObserver {
    std::function<void(const SelectionEvent&)> on_selection;
    /// Called after a sub-group's d̄ has been written back into the model.
    std::function<void(const SubgroupRecord&, const FactorModel&)> on_writeback;
};

/// Runs best/1 mutation and selection for up to max_iters iterations. Each
/// iteration mutates from the parent population and d̄ of the previous
/// iteration. Stops early once d̄ improves by less than fitness_epsilon.
SubgroupRecord refine_subgroup(DEPopulation& pop, const FitnessFn& fitness, const DEConfig& cfg,
                               Rng& rng, const RefineObserver* observer = nullptr);

struct RefineTrace {
    std::vector<SubgroupRecord> subgroups;
    std::size_t skipped = 0;  // sub-groups without ratings

    /// Σ (initial − final) fitness over all refined sub-groups.
    double total_fitness_gain() const;
};

/// Refines every row sub-group in order, then every column sub-group, writing
/// d̄ back before moving on. Rows and columns without ratings are skipped.
RefineTrace refine_all(FactorModel& m, const SparseRatingMatrix& train, const DEConfig& cfg,
                       double lambda, const RefineObserver* observer = nullptr);

/// CSV "subgroup_kind,index,initial_fitness,final_fitness,iterations".
void write_refine_trace_csv(std::ostream& out, const RefineTrace& trace);

}  // namespace sgde
