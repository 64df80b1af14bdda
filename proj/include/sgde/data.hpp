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
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sgde {

/// Raised for malformed input files and inconsistent matrix contents.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t line = 0);

    /// 1-based line number of the offending input, 0 when not line related.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// One known entry r_{u,i}, addressed by dense 0-based indices.
struct RatingTriple {
    std::uint32_t user = 0;
    std::uint32_t item = 0;
    double value = 0.0;

    friend bool operator==(const RatingTriple&, const RatingTriple&) = default;
};

/// (index, value) pair returned by row/column access.
struct RatingEntry {
    std::uint32_t index = 0;
    double value = 0.0;

    friend bool operator==(const RatingEntry&, const RatingEntry&) = default;
};

enum class Delimiter { Tab, Comma, Whitespace, Colons };

/// Accepts "tab", "comma", "ws" and "colons".
Delimiter parse_delimiter(std::string_view name);
std::string_view delimiter_name(Delimiter d);

/// Bijection between original string ids and dense indices, in first-seen order.
class IdMap {
public:
    std::uint32_t intern(std::string_view id);
    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(ids_.size()); }
    const std::string& id(std::uint32_t index) const { return ids_.at(index); }
    /// Returns -1 when the id is unknown.
    std::int64_t find(std::string_view id) const;
    const std::vector<std::string>& ids() const noexcept { return ids_; }

    friend bool operator==(const IdMap& a, const IdMap& b) { return a.ids_ == b.ids_; }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// The known set of an HiDS matrix with row and column indexes.
///
/// Immutable after construction. Row and column indexes store positions into
/// triples(), in stored order, and together partition the positions exactly.
class SparseRatingMatrix {
public:
    SparseRatingMatrix();

    /// Validates index ranges, finiteness and uniqueness of (user, item) pairs.
    SparseRatingMatrix(std::shared_ptr<const IdMap> users,
                       std::shared_ptr<const IdMap> items,
                       std::vector<RatingTriple> triples);

    /// Matrix without original ids; ids default to the decimal dense index.
    static SparseRatingMatrix from_triples(std::uint32_t num_users,
                                           std::uint32_t num_items,
                                           std::vector<RatingTriple> triples);

    std::uint32_t num_users() const noexcept { return users_->size(); }
    std::uint32_t num_items() const noexcept { return items_->size(); }
    std::size_t size() const noexcept { return triples_.size(); }
    bool empty() const noexcept { return triples_.empty(); }

    std::span<const RatingTriple> triples() const noexcept { return triples_; }
    const RatingTriple& operator[](std::size_t pos) const { return triples_[pos]; }

    std::span<const std::size_t> row_positions(std::uint32_t user) const;
    std::span<const std::size_t> col_positions(std::uint32_t item) const;

    /// (item, value) pairs of one user, in stored order.
    std::vector<RatingEntry> row_ratings(std::uint32_t user) const;
    /// (user, value) pairs of one item, in stored order.
    std::vector<RatingEntry> col_ratings(std::uint32_t item) const;

    const IdMap& user_ids() const noexcept { return *users_; }
    const IdMap& item_ids() const noexcept { return *items_; }
    const std::shared_ptr<const IdMap>& shared_user_ids() const noexcept { return users_; }
    const std::shared_ptr<const IdMap>& shared_item_ids() const noexcept { return items_; }

private:
    std::shared_ptr<const IdMap> users_;
    std::shared_ptr<const IdMap> items_;
    std::vector<RatingTriple> triples_;
    std::vector<std::vector<std::size_t>> rows_;
    std::vector<std::vector<std::size_t>> cols_;
};

/// Reads "user item rating [timestamp]" lines. '#' comments and blank lines are
/// skipped; dense indices are assigned in first-seen order.
SparseRatingMatrix parse_ratings(std::istream& in, Delimiter delimiter);
SparseRatingMatrix load_ratings(const std::filesystem::path& path, Delimiter delimiter);

/// |Λ| / (|U|·|I|), or 0 for a degenerate shape.
double density(std::size_t num_users, std::size_t num_items, std::size_t num_ratings);
double density(const SparseRatingMatrix& m);

/// Seeded shuffle of triple positions; the first floor(train_fraction·|Λ|)
/// positions form the training half. Both halves keep the full id maps and
/// preserve the original relative order of their triples.
std::pair<SparseRatingMatrix, SparseRatingMatrix>
split(const SparseRatingMatrix& m, double train_fraction, std::uint64_t seed);

/// Canonical text persistence:
///   HIDS1 <|U|> <|I|> <|Λ|>
///   <|U| user ids, one per line>
///   <|I| item ids, one per line>
///   <|Λ| lines "user item value">
void write_matrix(std::ostream& out, const SparseRatingMatrix& m);
SparseRatingMatrix read_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const SparseRatingMatrix& m);
SparseRatingMatrix load_matrix(const std::filesystem::path& path);

/// Parameters of a seeded low-rank test matrix: r = offset + p*·q* + N(0, noise²),
/// with p*, q* entries uniform in [0, 1) and exactly round(density·|U|·|I|)
/// distinct known positions.
struct SyntheticSpec {
    std::uint32_t num_users = 200;
    std::uint32_t num_items = 150;
    std::uint32_t rank = 3;
    double density = 0.05;
    double noise_sigma = 0.0;
    double offset = 0.0;
    std::uint64_t seed = 1;
};

SparseRatingMatrix make_low_rank(const SyntheticSpec& spec);

}  // namespace sgde
