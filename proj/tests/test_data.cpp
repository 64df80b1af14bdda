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
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "doctest.h"
#include "sgde/data.hpp"

using namespace sgde;

namespace {

SparseRatingMatrix parse(const std::string& text, Delimiter d = Delimiter::Whitespace) {
    std::istringstream in(text);
    return parse_ratings(in, d);
}

std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> as_multiset(std::span<const RatingTriple> ts) {
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> out;
    for (const auto& t : ts) out.emplace_back(t.user, t.item, t.value);
    std::sort(out.begin(), out.end());
    return out;
}

std::string serialize(const SparseRatingMatrix& m) {
    std::ostringstream os;
    write_matrix(os, m);
    return os.str();
}

}  // namespace

TEST_CASE("empty stream yields an empty matrix") {
    const auto m = parse("");
    CHECK(m.num_users() == 0);
    CHECK(m.num_items() == 0);
    CHECK(m.size() == 0);
    CHECK(density(m) == 0.0);
}

TEST_CASE("dense indices follow first-seen order") {
    const auto m = parse("1 7 5.0\n1 9 3.0\n2 7 4.0\n");
    CHECK(m.num_users() == 2);
    CHECK(m.num_items() == 2);
    CHECK(m.size() == 3);
    CHECK(m.user_ids().find("1") == 0);
    CHECK(m.item_ids().find("7") == 0);
    CHECK(m.item_ids().find("9") == 1);
    CHECK(m.user_ids().id(1) == "2");

    const auto row0 = m.row_ratings(0);
    REQUIRE(row0.size() == 2);
    CHECK(row0[0] == RatingEntry{0, 5.0});
    CHECK(row0[1] == RatingEntry{1, 3.0});
    CHECK(m.col_ratings(0) == std::vector<RatingEntry>{{0, 5.0}, {1, 4.0}});
}

TEST_CASE("delimiters, comments and the optional timestamp field") {
    SUBCASE("tab with timestamp") {
        const auto m = parse("196\t242\t3\t881250949\n186\t302\t3\t891717742\n", Delimiter::Tab);
        CHECK(m.size() == 2);
    }
    SUBCASE("comma") {
        const auto m = parse("# header comment\nu1,i1,4.5\n\nu2,i1,2\n", Delimiter::Comma);
        CHECK(m.size() == 2);
        CHECK(m.num_items() == 1);
    }
    SUBCASE("double colon") {
        const auto m = parse("1::1193::5::978300760\n1::661::3::978302109\n", Delimiter::Colons);
        CHECK(m.size() == 2);
        CHECK(m[1].value == 3.0);
    }
    SUBCASE("whitespace runs") {
        const auto m = parse("  a \t  b   1.5   \n", Delimiter::Whitespace);
        CHECK(m.size() == 1);
        CHECK(m[0].value == 1.5);
    }
}

TEST_CASE("parse errors report the line number") {
    auto line_of = [](const std::string& text) {
        try {
            parse(text);
        } catch (const DataError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("1 2 3\n1 2\n") == 2);
    CHECK(line_of("1 2 3\n# c\n1 3 x\n") == 3);
    CHECK(line_of("1 2 nan\n") == 1);
    CHECK(line_of("1 2 inf\n") == 1);
    CHECK(line_of("1 2 3\n2 2 3\n1 2 4\n") == 3);
    CHECK(line_of("1 2 3 4 5\n") == 1);
}

TEST_CASE("density") {
    CHECK(std::abs(density(10'681, 71'567, 10'000'054) * 100.0 - 1.31) < 0.005);
    CHECK(std::abs(density(775'760, 120'492, 13'668'320) * 100.0 - 0.015) < 0.005);
    CHECK(std::abs(density(48'794, 147'612, 8'196'077) * 100.0 - 0.11) < 0.005);
    CHECK(std::abs(density(58'541, 129'490, 16'830'839) * 100.0 - 0.22) < 0.005);

    const auto full = SparseRatingMatrix::from_triples(2, 2, {{0, 0, 1}, {0, 1, 2}, {1, 0, 3}, {1, 1, 4}});
    CHECK(density(full) == 1.0);
    CHECK(density(SparseRatingMatrix::from_triples(3, 3, {})) == 0.0);
}

TEST_CASE("split") {
    std::vector<RatingTriple> ts;
    for (std::uint32_t k = 0; k < 10; ++k) ts.push_back({k % 4, k, static_cast<double>(k)});
    const auto m = SparseRatingMatrix::from_triples(4, 10, ts);

    const auto [train, test] = split(m, 0.8, 42);
    CHECK(train.size() == 8);
    CHECK(test.size() == 2);
    CHECK(train.num_users() == 4);
    CHECK(test.num_items() == 10);
    CHECK(train.user_ids() == m.user_ids());

    const auto [train2, test2] = split(m, 0.8, 42);
    CHECK(serialize(train) == serialize(train2));
    CHECK(serialize(test) == serialize(test2));

    std::vector<RatingTriple> joined(train.triples().begin(), train.triples().end());
    joined.insert(joined.end(), test.triples().begin(), test.triples().end());
    CHECK(as_multiset(joined) == as_multiset(m.triples()));

    CHECK_THROWS_AS(split(m, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(split(m, 1.0, 1), std::invalid_argument);
}

TEST_CASE("row and column access partition the triples") {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution keep(0.3);
    std::vector<RatingTriple> ts;
    for (std::uint32_t u = 0; u < 20; ++u)
        for (std::uint32_t i = 0; i < 20; ++i)
            if (keep(rng)) ts.push_back({u, i, static_cast<double>(u * 20 + i)});
    std::shuffle(ts.begin(), ts.end(), rng);
    const auto m = SparseRatingMatrix::from_triples(20, 20, ts);

    std::vector<RatingTriple> by_rows, by_cols;
    std::size_t row_total = 0, col_total = 0;
    for (std::uint32_t u = 0; u < 20; ++u) {
        for (auto e : m.row_ratings(u)) by_rows.push_back({u, e.index, e.value});
        row_total += m.row_positions(u).size();
    }
    for (std::uint32_t i = 0; i < 20; ++i) {
        for (auto e : m.col_ratings(i)) by_cols.push_back({e.index, i, e.value});
        col_total += m.col_positions(i).size();
    }
    CHECK(row_total == m.size());
    CHECK(col_total == m.size());
    CHECK(as_multiset(by_rows) == as_multiset(m.triples()));
    CHECK(as_multiset(by_cols) == as_multiset(m.triples()));

    const auto sparse = SparseRatingMatrix::from_triples(3, 3, {{0, 0, 1.0}});
    CHECK(sparse.row_ratings(2).empty());
    CHECK_THROWS_AS(sparse.row_ratings(3), std::out_of_range);
    CHECK_THROWS_AS(sparse.col_ratings(7), std::out_of_range);
}

TEST_CASE("constructor rejects inconsistent triples") {
    CHECK_THROWS_AS(SparseRatingMatrix::from_triples(1, 1, {{0, 1, 1.0}}), DataError);
    CHECK_THROWS_AS(SparseRatingMatrix::from_triples(1, 1, {{0, 0, NAN}}), DataError);
    CHECK_THROWS_AS(SparseRatingMatrix::from_triples(1, 1, {{0, 0, 1.0}, {0, 0, 2.0}}), DataError);
}

TEST_CASE("persist and load round-trip") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> id(1, 30);
    std::uniform_real_distribution<double> val(0.5, 5.0);
    std::ostringstream text;
    std::set<std::pair<int, int>> used;
    while (used.size() < 50) {
        const int u = id(rng), i = id(rng) + 100;
        if (!used.emplace(u, i).second) continue;
        text << "user" << u << "\titem " << i << '\t' << val(rng) << '\n';
    }
    const auto m = parse(text.str(), Delimiter::Tab);
    REQUIRE(m.size() == 50);

    const auto first = serialize(m);
    std::istringstream in(first);
    const auto loaded = read_matrix(in);
    CHECK(serialize(loaded) == first);
    CHECK(loaded.user_ids() == m.user_ids());
    CHECK(loaded.item_ids() == m.item_ids());
    CHECK(std::equal(loaded.triples().begin(), loaded.triples().end(), m.triples().begin(), m.triples().end()));

    std::istringstream bad("HIDS1 1 1 2\nu\ni\n0 0 1\n");
    CHECK_THROWS_AS(read_matrix(bad), DataError);
}

TEST_CASE("synthetic low-rank matrix") {
    SyntheticSpec spec;
    const auto m = make_low_rank(spec);
    CHECK(m.num_users() == 200);
    CHECK(m.num_items() == 150);
    CHECK(m.size() == 1500);
    CHECK(serialize(m) == serialize(make_low_rank(spec)));
}
