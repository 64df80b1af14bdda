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
#include <stdexcept>
#include <unordered_set>

#include "sgde/data.hpp"

namespace sgde {

SparseRatingMatrix make_low_rank(const SyntheticSpec& spec) {
    if (spec.rank == 0) throw std::invalid_argument("synthetic rank must be at least 1");
    if (!(spec.density > 0.0 && spec.density <= 1.0))
        throw std::invalid_argument("synthetic density must lie in (0, 1]");
    if (!(spec.noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be non-negative");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);

    const std::size_t r = spec.rank;
    std::vector<double> p(static_cast<std::size_t>(spec.num_users) * r);
    std::vector<double> q(static_cast<std::size_t>(spec.num_items) * r);
    for (auto& x : p) x = unit(rng);
    for (auto& x : q) x = unit(rng);

    const std::uint64_t cells = static_cast<std::uint64_t>(spec.num_users) * spec.num_items;
    const auto target = static_cast<std::uint64_t>(std::llround(spec.density * static_cast<double>(cells)));

    std::uniform_int_distribution<std::uint64_t> pick(0, cells == 0 ? 0 : cells - 1);
    std::unordered_set<std::uint64_t> chosen;
    std::vector<std::uint64_t> cell_list;
    while (cells > 0 && cell_list.size() < target) {
        const auto c = pick(rng);
        if (chosen.insert(c).second) cell_list.push_back(c);
    }
    std::sort(cell_list.begin(), cell_list.end());

    std::vector<RatingTriple> triples;
    triples.reserve(cell_list.size());
    for (auto c : cell_list) {
        const auto u = static_cast<std::uint32_t>(c / spec.num_items);
        const auto i = static_cast<std::uint32_t>(c % spec.num_items);
        double v = spec.offset;
        for (std::size_t k = 0; k < r; ++k) v += p[u * r + k] * q[i * r + k];
        if (spec.noise_sigma > 0.0) v += noise(rng);
        triples.push_back({u, i, v});
    }
    return SparseRatingMatrix::from_triples(spec.num_users, spec.num_items, std::move(triples));
}

}  // namespace sgde
