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
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgde/data.hpp"
#include "sgde/model.hpp"

namespace sgde {

struct EpochTrace {
    std::size_t epoch = 0;  // 1-based
    double train_rmse = 0.0;
    double valid_rmse = 0.0;
    double seconds = 0.0;   // cumulative wall-clock time
};

/// Moment accumulators shaped like {P, Q, b, c}, plus the shared step counter.
struct AdamState {
    FactorModel first;
    FactorModel second;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    AdamState(const FactorModel& shape, double beta1, double beta2, double epsilon);
};

/// One SGD step on a single instance. Gradients are computed from the current
/// parameters before any block is written.
void sgd_step(FactorModel& m, const RatingTriple& r, double eta, double lambda);

/// One bias-corrected Adam step on the parameter blocks touched by r.
void adam_step(FactorModel& m, AdamState& s, const RatingTriple& r, double eta, double lambda);

/// Epoch loop: each epoch visits every training triple once in a seeded
/// shuffled order. Stops once the validation RMSE moves by less than the
/// convergence threshold, or at max_epochs. An empty validation set falls
/// back to the training RMSE for the stopping rule.
std::vector<EpochTrace> train_sgd(FactorModel& m, const SparseRatingMatrix& train,
                                  const SparseRatingMatrix& valid, const TrainConfig& cfg);
std::vector<EpochTrace> train_adam(FactorModel& m, const SparseRatingMatrix& train,
                                   const SparseRatingMatrix& valid, const TrainConfig& cfg);

/// Visit order of one epoch; exposed so tests can check it is a permutation.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

/// CSV "epoch,train_rmse,valid_rmse,seconds".
void write_trace_csv(std::ostream& out, const std::vector<EpochTrace>& trace);

}  // namespace sgde
