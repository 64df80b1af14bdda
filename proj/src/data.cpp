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

#include "sgde/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace sgde {

namespace {

std::string with_line(const std::string& what, std::size_t line) {
    if (line == 0) return what;
    return "line " + std::to_string(line) + ": " + what;
}

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> tokenize(std::string_view line, Delimiter d) {
    std::vector<std::string_view> out;
    if (d == Delimiter::Whitespace) {
        std::size_t pos = 0;
        while (pos < line.size()) {
            pos = line.find_first_not_of(" \t", pos);
            if (pos == std::string_view::npos) break;
            auto end = line.find_first_of(" \t", pos);
            if (end == std::string_view::npos) end = line.size();
            out.push_back(line.substr(pos, end - pos));
            pos = end;
        }
        return out;
    }
    const std::string_view sep = d == Delimiter::Tab ? "\t" : d == Delimiter::Comma ? "," : "::";
    std::size_t pos = 0;
    while (true) {
        const auto end = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, end == std::string_view::npos ? end : end - pos)));
        if (end == std::string_view::npos) break;
        pos = end + sep.size();
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    // from_chars rejects a leading '+', which some exports emit.
    if (s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return !s.empty() && ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t pair_key(std::uint32_t u, std::uint32_t i) {
    return (static_cast<std::uint64_t>(u) << 32) | i;
}

}  // namespace

DataError::DataError(const std::string& what, std::size_t line)
    : std::runtime_error(with_line(what, line)), line_(line) {}

Delimiter parse_delimiter(std::string_view name) {
    if (name == "tab") return Delimiter::Tab;
    if (name == "comma") return Delimiter::Comma;
    if (name == "ws") return Delimiter::Whitespace;
    if (name == "colons") return Delimiter::Colons;
    throw std::invalid_argument("unknown delimiter '" + std::string(name) +
                                "' (expected tab, comma, ws or colons)");
}

std::string_view delimiter_name(Delimiter d) {
    switch (d) {
    case Delimiter::Tab: return "tab";
    case Delimiter::Comma: return "comma";
    case Delimiter::Whitespace: return "ws";
    case Delimiter::Colons: return "colons";
    }
    return "ws";
}

std::uint32_t IdMap::intern(std::string_view id) {
    std::string key(id);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const auto idx = static_cast<std::uint32_t>(ids_.size());
    index_.emplace(key, idx);
    ids_.push_back(std::move(key));
    return idx;
}

std::int64_t IdMap::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseRatingMatrix::SparseRatingMatrix()
    : users_(std::make_shared<IdMap>()), items_(std::make_shared<IdMap>()) {}

SparseRatingMatrix::SparseRatingMatrix(std::shared_ptr<const IdMap> users,
                                       std::shared_ptr<const IdMap> items,
                                       std::vector<RatingTriple> triples)
    : users_(users ? std::move(users) : std::make_shared<IdMap>()),
      items_(items ? std::move(items) : std::make_shared<IdMap>()),
      triples_(std::move(triples)),
      rows_(users_->size()),
      cols_(items_->size()) {
    std::unordered_map<std::uint64_t, std::size_t> seen;
    seen.reserve(triples_.size());
    for (std::size_t pos = 0; pos < triples_.size(); ++pos) {
        const auto& t = triples_[pos];
        if (t.user >= users_->size() || t.item >= items_->size())
            throw DataError("triple " + std::to_string(pos) + " has an index out of range");
        if (!std::isfinite(t.value))
            throw DataError("triple " + std::to_string(pos) + " has a non-finite value");
        if (!seen.emplace(pair_key(t.user, t.item), pos).second)
            throw DataError("duplicate (user, item) pair (" + users_->id(t.user) + ", " +
                            items_->id(t.item) + ")");
        rows_[t.user].push_back(pos);
        cols_[t.item].push_back(pos);
    }
}

SparseRatingMatrix SparseRatingMatrix::from_triples(std::uint32_t num_users,
                                                    std::uint32_t num_items,
                                                    std::vector<RatingTriple> triples) {
    auto users = std::make_shared<IdMap>();
    auto items = std::make_shared<IdMap>();
    for (std::uint32_t u = 0; u < num_users; ++u) users->intern(std::to_string(u));
    for (std::uint32_t i = 0; i < num_items; ++i) items->intern(std::to_string(i));
    return SparseRatingMatrix(std::move(users), std::move(items), std::move(triples));
}

std::span<const std::size_t> SparseRatingMatrix::row_positions(std::uint32_t user) const {
    if (user >= rows_.size())
        throw std::out_of_range("user index " + std::to_string(user) + " out of range");
    return rows_[user];
}

std::span<const std::size_t> SparseRatingMatrix::col_positions(std::uint32_t item) const {
    if (item >= cols_.size())
        throw std::out_of_range("item index " + std::to_string(item) + " out of range");
    return cols_[item];
}

std::vector<RatingEntry> SparseRatingMatrix::row_ratings(std::uint32_t user) const {
    std::vector<RatingEntry> out;
    for (auto pos : row_positions(user)) out.push_back({triples_[pos].item, triples_[pos].value});
    return out;
}

std::vector<RatingEntry> SparseRatingMatrix::col_ratings(std::uint32_t item) const {
    std::vector<RatingEntry> out;
    for (auto pos : col_positions(item)) out.push_back({triples_[pos].user, triples_[pos].value});
    return out;
}

SparseRatingMatrix parse_ratings(std::istream& in, Delimiter delimiter) {
    auto users = std::make_shared<IdMap>();
    auto items = std::make_shared<IdMap>();
    std::vector<RatingTriple> triples;
    std::unordered_map<std::uint64_t, std::size_t> seen;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        const auto fields = tokenize(line, delimiter);
        if (fields.size() < 3 || fields.size() > 4)
            throw DataError("expected 3 or 4 fields, found " + std::to_string(fields.size()),
                            line_no);
        if (fields[0].empty() || fields[1].empty())
            throw DataError("empty user or item id", line_no);

        double value = 0.0;
        if (!parse_double(fields[2], value))
            throw DataError("malformed rating '" + std::string(fields[2]) + "'", line_no);
        if (!std::isfinite(value)) throw DataError("non-finite rating", line_no);

        const auto u = users->intern(fields[0]);
        const auto i = items->intern(fields[1]);
        if (!seen.emplace(pair_key(u, i), line_no).second)
            throw DataError("duplicate (user, item) pair (" + std::string(fields[0]) + ", " +
                                std::string(fields[1]) + ")",
                            line_no);
        triples.push_back({u, i, value});
    }
    return SparseRatingMatrix(std::move(users), std::move(items), std::move(triples));
}

SparseRatingMatrix load_ratings(const std::filesystem::path& path, Delimiter delimiter) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open rating file " + path.string());
    return parse_ratings(in, delimiter);
}

double density(std::size_t num_users, std::size_t num_items, std::size_t num_ratings) {
    const double cells = static_cast<double>(num_users) * static_cast<double>(num_items);
    if (cells == 0.0) return 0.0;
    return static_cast<double>(num_ratings) / cells;
}

double density(const SparseRatingMatrix& m) {
    return density(m.num_users(), m.num_items(), m.size());
}

std::pair<SparseRatingMatrix, SparseRatingMatrix>
split(const SparseRatingMatrix& m, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train fraction must lie strictly between 0 and 1");

    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(m.size())));
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

    std::vector<RatingTriple> train, test;
    train.reserve(n_train);
    test.reserve(m.size() - n_train);
    for (std::size_t k = 0; k < order.size(); ++k)
        (k < n_train ? train : test).push_back(m[order[k]]);

    return {SparseRatingMatrix(m.shared_user_ids(), m.shared_item_ids(), std::move(train)),
            SparseRatingMatrix(m.shared_user_ids(), m.shared_item_ids(), std::move(test))};
}

void write_matrix(std::ostream& out, const SparseRatingMatrix& m) {
    out << "HIDS1 " << m.num_users() << ' ' << m.num_items() << ' ' << m.size() << '\n';
    for (const auto& id : m.user_ids().ids()) out << id << '\n';
    for (const auto& id : m.item_ids().ids()) out << id << '\n';
    for (const auto& t : m.triples())
        out << t.user << ' ' << t.item << ' ' << format_double(t.value) << '\n';
}

SparseRatingMatrix read_matrix(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw DataError("missing HIDS1 header", line_no);

    std::istringstream header(line);
    std::string magic;
    std::uint64_t nu = 0, ni = 0, nr = 0;
    if (!(header >> magic >> nu >> ni >> nr) || magic != "HIDS1")
        throw DataError("malformed HIDS1 header", line_no);

    auto read_ids = [&](std::uint64_t count) {
        auto ids = std::make_shared<IdMap>();
        for (std::uint64_t k = 0; k < count; ++k) {
            ++line_no;
            if (!std::getline(in, line)) throw DataError("truncated id map", line_no);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (ids->intern(line) != k) throw DataError("duplicate id '" + line + "'", line_no);
        }
        return ids;
    };
    auto users = read_ids(nu);
    auto items = read_ids(ni);

    std::vector<RatingTriple> triples;
    triples.reserve(nr);
    for (std::uint64_t k = 0; k < nr; ++k) {
        ++line_no;
        if (!std::getline(in, line)) throw DataError("truncated triple section", line_no);
        const auto fields = tokenize(trim(line), Delimiter::Whitespace);
        RatingTriple t;
        if (fields.size() != 3 || !parse_int(fields[0], t.user) || !parse_int(fields[1], t.item) ||
            !parse_double(fields[2], t.value))
            throw DataError("malformed triple", line_no);
        triples.push_back(t);
    }
    return SparseRatingMatrix(std::move(users), std::move(items), std::move(triples));
}

void save_matrix(const std::filesystem::path& path, const SparseRatingMatrix& m) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_matrix(out, m);
}

SparseRatingMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_matrix(in);
}

}  // namespace sgde
