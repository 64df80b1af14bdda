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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sgde/report.hpp"

using namespace sgde;

namespace {

MetricTable published_table() {
    MetricTable t;
    t.models = oracle::published_models();
    t.rows = oracle::published_accuracy_rows();
    return t;
}

}  // namespace

TEST_CASE("improvement percentages from the published accuracy table") {
    const double m6 = 0.8610;
    CHECK(std::abs(improvement_pct(0.9433, m6) - 8.72) <= 0.01);
    CHECK(std::abs(improvement_pct(0.9464, m6) - 9.02) <= 0.01);
    CHECK(std::abs(improvement_pct(0.9429, m6) - 8.69) <= 0.01);
    CHECK(std::abs(improvement_pct(0.8720, m6) - 1.26) <= 0.01);
    CHECK(std::abs(improvement_pct(0.8656, m6) - 0.53) <= 0.01);
    CHECK(round_to(improvement_pct(0.9433, m6), 2) == 8.72);
    CHECK(improvement_pct(0.75, 0.75) == 0.0);
    CHECK_THROWS_AS(improvement_pct(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(improvement_pct(-1.0, 0.5), std::invalid_argument);
}

TEST_CASE("run-time savings") {
    CHECK(std::abs(runtime_saving_pct(1152, 700) - 39.24) <= 0.01);
    CHECK(std::abs(runtime_saving_pct(4331, 700) - 83.84) <= 0.01);
    CHECK(std::abs(runtime_saving_pct(451, 212) - 52.99) <= 0.01);
    CHECK(std::abs(runtime_saving_pct(3393, 212) - 93.75) <= 0.01);
    CHECK(runtime_saving_pct(12.5, 12.5) == 0.0);
    CHECK_THROWS_AS(runtime_saving_pct(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("f_rank") {
    SUBCASE("published table") {
        const auto ranks = f_rank(published_table());
        const std::vector<double> expected{5.25, 5.5, 4.25, 3.0, 2.0, 1.0};
        REQUIRE(ranks.size() == expected.size());
        for (std::size_t j = 0; j < ranks.size(); ++j) CHECK(ranks[j] == expected[j]);
    }
    SUBCASE("single strictly ordered row") {
        MetricTable t{{"a", "b", "c", "d"}, {"r"}, {{0.4, 0.1, 0.3, 0.2}}};
        CHECK(f_rank(t) == std::vector<double>{4, 1, 3, 2});
    }
    SUBCASE("ties share the average rank") {
        // row 1: b = c tie for ranks 2 and 3; row 2: all distinct.
        MetricTable t{{"a", "b", "c"}, {"r1", "r2"}, {{0.1, 0.5, 0.5}, {0.3, 0.2, 0.1}}};
        const auto ranks = f_rank(t);
        CHECK(ranks[0] == (1.0 + 3.0) / 2);
        CHECK(ranks[1] == (2.5 + 2.0) / 2);
        CHECK(ranks[2] == (2.5 + 1.0) / 2);
    }
    SUBCASE("ranks always average to (n + 1) / 2") {
        std::mt19937_64 rng(6);
        std::uniform_int_distribution<int> coarse(0, 5);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 2 + trial % 7;
            MetricTable t;
            for (std::size_t j = 0; j < n; ++j) t.models.push_back("m" + std::to_string(j));
            for (int r = 0; r < 1 + trial % 5; ++r) {
                std::vector<double> row;
                for (std::size_t j = 0; j < n; ++j) row.push_back(coarse(rng));
                t.rows.push_back(row);
            }
            const auto ranks = f_rank(t);
            double mean = 0.0;
            for (double x : ranks) mean += x;
            CHECK(mean / n == doctest::Approx((n + 1) / 2.0).epsilon(1e-12));
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(f_rank(MetricTable{{"a"}, {}, {}}), std::invalid_argument);
        CHECK_THROWS_AS(f_rank(MetricTable{{"a", "b"}, {"r"}, {{0.1}}}), std::invalid_argument);
        CHECK_THROWS_AS(f_rank(MetricTable{{"a", "b"}, {"r"}, {{0.1, NAN}}}), std::invalid_argument);
    }
}

TEST_CASE("win_loss") {
    SUBCASE("published table, reference M6") {
        const auto wl = win_loss(published_table(), "M6");
        REQUIRE(wl.size() == 6);
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(wl[j].wins == 8);
            CHECK(wl[j].losses == 0);
        }
        CHECK(wl[5].peer == "M6");
        CHECK(wl[5].wins == 0);
        CHECK(wl[5].losses == 0);
    }
    SUBCASE("random tables against a row-by-row count") {
        std::mt19937_64 rng(9);
        std::uniform_int_distribution<int> coarse(0, 3);
        for (int trial = 0; trial < 100; ++trial) {
            MetricTable t{{"x", "y", "z"}, {}, {}};
            for (int r = 0; r < 3; ++r) t.rows.push_back({double(coarse(rng)), double(coarse(rng)), double(coarse(rng))});
            const auto wl = win_loss(t, "y");
            for (std::size_t peer = 0; peer < 3; ++peer) {
                std::size_t w = 0, l = 0;
                for (const auto& row : t.rows) {
                    w += row[1] < row[peer];
                    l += row[1] > row[peer];
                }
                CHECK(wl[peer].wins == w);
                CHECK(wl[peer].losses == l);
            }
        }
    }
    CHECK_THROWS_AS(win_loss(published_table(), "M7"), std::invalid_argument);
}
