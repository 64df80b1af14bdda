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
#include <span>
#include <stdexcept>
#include <vector>

#include "sgde/data.hpp"

namespace sgde {

/// Raised when an update, a metric or a fitness value becomes non-finite.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Biased latent factor model {P, Q, b, c}.
///
/// P is |U|×f and Q is |I|×f, both row-major, so q_i is row i of Q.
/// Prediction is r̂_{u,i} = p_u·q_i + b_u + c_i.
class FactorModel {
public:
    FactorModel() = default;
    FactorModel(std::size_t num_users, std::size_t num_items, std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t num_users() const noexcept { return b_.size(); }
    std::size_t num_items() const noexcept { return c_.size(); }

    std::span<double> p(std::size_t u) { return {p_.data() + u * dim_, dim_}; }
    std::span<const double> p(std::size_t u) const { return {p_.data() + u * dim_, dim_}; }
    std::span<double> q(std::size_t i) { return {q_.data() + i * dim_, dim_}; }
    std::span<const double> q(std::size_t i) const { return {q_.data() + i * dim_, dim_}; }
    double& b(std::size_t u) { return b_[u]; }
    double b(std::size_t u) const { return b_[u]; }
    double& c(std::size_t i) { return c_[i]; }
    double c(std::size_t i) const { return c_[i]; }

    std::span<double> p_data() noexcept { return p_; }
    std::span<const double> p_data() const noexcept { return p_; }
    std::span<double> q_data() noexcept { return q_; }
    std::span<const double> q_data() const noexcept { return q_; }
    std::span<double> b_data() noexcept { return b_; }
    std::span<const double> b_data() const noexcept { return b_; }
    std::span<double> c_data() noexcept { return c_; }
    std::span<const double> c_data() const noexcept { return c_; }

    bool all_finite() const noexcept;

    friend bool operator==(const FactorModel&, const FactorModel&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> p_, q_, b_, c_;
};

struct TrainConfig {
    double eta = 0.01;                 // SGD learning rate
    double lambda = 0.2;               // L2 regularization
    std::size_t dim = 20;              // latent dimension f
    std::size_t max_epochs = 1000;
    double convergence_threshold = 1e-5;
    double init_scale = 0.05;
    std::uint64_t seed = 1;

    double adam_eta = 0.005;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    /// Throws std::invalid_argument on the first violated constraint.
    void validate() const;
};

/// P, Q uniform in (0, init_scale]; b, c zero.
FactorModel init_model(const TrainConfig& cfg, std::size_t num_users, std::size_t num_items,
                       std::uint64_t seed);

/// Throws std::out_of_range for invalid indices.
double predict(const FactorModel& m, std::size_t u, std::size_t i);

/// ½(r − r̂)² + (λ/2)(‖p_u‖² + ‖q_i‖² + b_u² + c_i²)
double instance_loss(const FactorModel& m, const RatingTriple& r, double lambda);

struct InstanceGradients {
    std::vector<double> p;
    std::vector<double> q;
    double b = 0.0;
    double c = 0.0;
};

/// Gradients of instance_loss with respect to p_u, q_i, b_u and c_i.
InstanceGradients instance_gradients(const FactorModel& m, const RatingTriple& r, double lambda);

/// Throws std::invalid_argument on an empty data set.
double rmse(const FactorModel& m, const SparseRatingMatrix& data);
double mae(const FactorModel& m, const SparseRatingMatrix& data);

/// Squared regularization mass ‖P‖² + ‖Q‖² + ‖b‖² + ‖c‖².
double regularization_mass(const FactorModel& m);

/// Training objective with each parameter regularized once:
/// ½ Σ_Λ (r − r̂)² + (λ/2)(‖P‖² + ‖Q‖² + ‖b‖² + ‖c‖²).
/// Restricting it to one row (or column) sub-group leaves the sub-group
/// fitness plus a term that does not depend on that sub-group.
double objective(const FactorModel& m, const SparseRatingMatrix& data, double lambda);

/// Σ_Λ instance_loss, where parameters are regularized once per rating.
double summed_instance_loss(const FactorModel& m, const SparseRatingMatrix& data, double lambda);

/// Text format: "SGDELF1", then "|U| |I| f", then rows of P, rows of Q,
/// one line for b, one line for c, all at 17 significant digits.
void write_model(std::ostream& out, const FactorModel& m);
FactorModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const FactorModel& m);
FactorModel load_model(const std::filesystem::path& path);

namespace detail {
inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}
inline double squared_norm(std::span<const double> a) { return dot(a, a); }
}  // namespace detail

}  // namespace sgde
