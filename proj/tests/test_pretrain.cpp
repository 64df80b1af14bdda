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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sgde/pretrain.hpp"

using namespace sgde;

namespace {

FactorModel unit_scalar_model() {
    FactorModel m(1, 1, 1);
    m.p(0)[0] = 1.0;
    m.q(0)[0] = 1.0;
    return m;
}

SparseRatingMatrix empty_like(const SparseRatingMatrix& m) {
    return SparseRatingMatrix(m.shared_user_ids(), m.shared_item_ids(), {});
}

}  // namespace

TEST_CASE("sgd_step follows the update rule") {
    SUBCASE("zero residual without regularization leaves the model unchanged") {
        std::mt19937_64 rng(1);
        auto m = oracle::random_model(2, 2, 4, rng);
        const auto before = m;
        sgd_step(m, {1, 0, predict(m, 1, 0)}, 0.1, 0.0);
        CHECK(m == before);
    }
    SUBCASE("scalar example") {
        auto m = unit_scalar_model();
        sgd_step(m, {0, 0, 2.0}, 0.1, 0.0);
        CHECK(m.p(0)[0] == doctest::Approx(1.1).epsilon(1e-15));
        CHECK(m.q(0)[0] == doctest::Approx(1.1).epsilon(1e-15));
        CHECK(m.b(0) == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(m.c(0) == doctest::Approx(0.1).epsilon(1e-15));
    }
    SUBCASE("zero residual with regularization shrinks by (1 - eta*lambda)") {
        std::mt19937_64 rng(2);
        auto m = oracle::random_model(1, 1, 3, rng);
        const auto before = m;
        const double eta = 0.05, lambda = 0.3;
        sgd_step(m, {0, 0, predict(m, 0, 0)}, eta, lambda);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(m.p(0)[k] == doctest::Approx(before.p(0)[k] * (1 - eta * lambda)).epsilon(1e-14));
            CHECK(m.q(0)[k] == doctest::Approx(before.q(0)[k] * (1 - eta * lambda)).epsilon(1e-14));
        }
        CHECK(m.b(0) == doctest::Approx(before.b(0) * (1 - eta * lambda)).epsilon(1e-14));
    }
    SUBCASE("divergence is reported") {
        FactorModel m(1, 1, 1);
        m.p(0)[0] = 1e200;
        m.q(0)[0] = 1e200;
        CHECK_THROWS_AS(sgd_step(m, {0, 0, 1.0}, 1.0, 0.0), DivergenceError);
    }
}

TEST_CASE("a small sgd step strictly decreases the instance loss") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(-3.0, 3.0), lam(0.0, 0.5);
    for (int trial = 0; trial < 200; ++trial) {
        auto m = oracle::random_model(1, 1, 1 + trial % 5, rng);
        const RatingTriple r{0, 0, val(rng)};
        const double lambda = lam(rng);
        const double before = instance_loss(m, r, lambda);
        sgd_step(m, r, 1e-4, lambda);
        CHECK(instance_loss(m, r, lambda) < before);
    }
}

TEST_CASE("repeated steps on one triple shrink its residual monotonically") {
    auto m = unit_scalar_model();
    const RatingTriple r{0, 0, 4.0};
    double last = std::abs(r.value - predict(m, 0, 0));
    for (int step = 0; step < 500; ++step) {
        sgd_step(m, r, 1e-3, 0.0);
        const double now = std::abs(r.value - predict(m, 0, 0));
        CHECK(now < last);
        last = now;
    }
}

TEST_CASE("adam_step") {
    SUBCASE("zero gradient leaves parameters unchanged") {
        std::mt19937_64 rng(3);
        auto m = oracle::random_model(1, 1, 2, rng);
        const auto before = m;
        AdamState s(m, 0.9, 0.999, 1e-8);
        adam_step(m, s, {0, 0, predict(m, 0, 0)}, 0.001, 0.0);
        CHECK(m == before);
        CHECK(s.step == 1);
    }
    SUBCASE("first step moves each coordinate by eta against the gradient sign") {
        auto m = unit_scalar_model();
        AdamState s(m, 0.9, 0.999, 1e-8);
        adam_step(m, s, {0, 0, 2.0}, 0.001, 0.0);  // every gradient is -1
        CHECK(std::abs(m.p(0)[0] - 1.001) < 1e-10);
        CHECK(std::abs(m.q(0)[0] - 1.001) < 1e-10);
        CHECK(std::abs(m.b(0) - 0.001) < 1e-10);
        CHECK(std::abs(m.c(0) - 0.001) < 1e-10);
    }
}

TEST_CASE("epoch order is a permutation and varies between epochs") {
    for (std::size_t n : {0u, 1u, 17u, 1000u}) {
        auto order = epoch_order(n, 99, 3);
        std::vector<std::size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::size_t> expected(n);
        std::iota(expected.begin(), expected.end(), std::size_t{0});
        CHECK(sorted == expected);
    }
    CHECK(epoch_order(1000, 99, 3) == epoch_order(1000, 99, 3));
    CHECK(epoch_order(1000, 99, 3) != epoch_order(1000, 99, 4));
}

TEST_CASE("training loops") {
    SyntheticSpec spec;
    spec.seed = 3;
    const auto data = make_low_rank(spec);
    const auto none = empty_like(data);

    TrainConfig cfg;
    cfg.dim = 10;
    cfg.lambda = 0.005;
    cfg.eta = 0.01;

    SUBCASE("max_epochs = 0 leaves the model alone") {
        cfg.max_epochs = 0;
        auto m = init_model(cfg, 200, 150, 1);
        const auto before = m;
        CHECK(train_sgd(m, data, none, cfg).empty());
        CHECK(train_adam(m, data, none, cfg).empty());
        CHECK(m == before);
    }
    SUBCASE("deterministic per seed") {
        cfg.max_epochs = 15;
        auto a = init_model(cfg, 200, 150, 1);
        auto b = a;
        const auto ta = train_sgd(a, data, none, cfg);
        const auto tb = train_sgd(b, data, none, cfg);
        REQUIRE(ta.size() == tb.size());
        for (std::size_t k = 0; k < ta.size(); ++k) {
            CHECK(ta[k].epoch == k + 1);
            CHECK(ta[k].train_rmse == tb[k].train_rmse);
        }
        CHECK(a == b);

        auto c = init_model(cfg, 200, 150, 1);
        auto d = c;
        train_adam(c, data, none, cfg);
        train_adam(d, data, none, cfg);
        CHECK(c == d);
    }
    SUBCASE("noiseless rank-3 matrix is fitted closely") {
        auto sgd_model = init_model(cfg, 200, 150, 1);
        auto adam_model = sgd_model;
        const auto ts = train_sgd(sgd_model, data, none, cfg);
        const auto ta = train_adam(adam_model, data, none, cfg);
        REQUIRE(!ts.empty());
        REQUIRE(!ta.empty());
        MESSAGE("sgd train rmse " << ts.back().train_rmse << " after " << ts.size() << " epochs; adam "
                                  << ta.back().train_rmse << " after " << ta.size());
        CHECK(ts.back().train_rmse < 0.05);
        CHECK(ta.back().train_rmse < 2.0 * ts.back().train_rmse);
        for (std::size_t k = 1; k < ts.size(); ++k) CHECK(ts[k].seconds >= ts[k - 1].seconds);
    }
    SUBCASE("a runaway learning rate aborts") {
        cfg.eta = 50.0;
        cfg.max_epochs = 50;
        auto m = init_model(cfg, 200, 150, 1);
        CHECK_THROWS_AS(train_sgd(m, data, none, cfg), DivergenceError);
    }
    SUBCASE("empty training set is rejected") {
        auto m = init_model(cfg, 200, 150, 1);
        CHECK_THROWS_AS(train_sgd(m, none, none, cfg), std::invalid_argument);
    }
}

TEST_CASE("trace CSV") {
    std::ostringstream os;
    write_trace_csv(os, {{1, 0.5, 0.6, 0.25}, {2, 0.4, 0.55, 0.5}});
    CHECK(os.str() == "epoch,train_rmse,valid_rmse,seconds\n1,0.500000,0.600000,0.250\n2,0.400000,0.550000,0.500\n");
}
