#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sparsefd/dataset.hpp"
#include "sparsefd/error.hpp"

namespace sparsefd {

// (n*k) x k matrix of pairwise-agreement bits. Columns are bit-packed,
// 64 rows per word, so column-pair statistics reduce to popcounts.
class BinarySampleMatrix {
public:
    BinarySampleMatrix() = default;

    BinarySampleMatrix(std::size_t rows, std::vector<std::string> schema, std::size_t n_source)
        : rows_(rows), words_per_col_((rows + 63) / 64), schema_(std::move(schema)), n_source_(n_source),
          bits_(words_per_col_ * schema_.size(), 0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return schema_.size(); }
    std::size_t n_source() const noexcept { return n_source_; }
    const std::vector<std::string>& schema() const noexcept { return schema_; }

    bool operator()(std::size_t row, std::size_t col) const {
        return (bits_[col * words_per_col_ + row / 64] >> (row % 64)) & 1U;
    }

    void set(std::size_t row, std::size_t col, bool value) {
        auto& w = bits_[col * words_per_col_ + row / 64];
        const std::uint64_t mask = std::uint64_t{1} << (row % 64);
        w = value ? (w | mask) : (w & ~mask);
    }

    // Packed words of one column; bits past rows() are always zero.
    std::span<const std::uint64_t> column_words(std::size_t col) const {
        return {bits_.data() + col * words_per_col_, words_per_col_};
    }

    std::size_t column_count(std::size_t col) const {
        std::size_t c = 0;
        for (auto w : column_words(col)) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    friend bool operator==(const BinarySampleMatrix&, const BinarySampleMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t words_per_col_ = 0;
    std::vector<std::string> schema_;
    std::size_t n_source_ = 0;
    std::vector<std::uint64_t> bits_;
};

inline void write_csv(std::ostream& out, const BinarySampleMatrix& m) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m.schema()[j];
    out << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << (m(i, j) ? '1' : '0');
        out << '\n';
    }
}

namespace detail {

// Dense rank of every cell under the sort order
//   Missing < Numeric (by value) < Categorical (lexicographic).
// Missing cells get -1 so that equal codes <=> equality() for present cells.
inline std::vector<std::int32_t> rank_codes(std::span<const CellValue> column) {
    auto type_rank = [](const CellValue& v) { return v.is_missing() ? 0 : v.is_numeric() ? 1 : 2; };
    auto less = [&](const CellValue& a, const CellValue& b) {
        const int ta = type_rank(a), tb = type_rank(b);
        if (ta != tb) return ta < tb;
        if (ta == 1) return a.as_numeric() < b.as_numeric();
        if (ta == 2) return a.as_categorical() < b.as_categorical();
        return false;
    };

    std::vector<std::size_t> idx(column.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return less(column[a], column[b]); });

    std::vector<std::int32_t> codes(column.size(), -1);
    std::int32_t next = -1;
    for (std::size_t p = 0; p < idx.size(); ++p) {
        const auto& v = column[idx[p]];
        if (v.is_missing()) continue;
        if (next < 0 || less(column[idx[p - 1]], v)) ++next;
        codes[idx[p]] = next;
    }
    return codes;
}

} // namespace detail

// Pairwise-equality transformation. Rows are shuffled once; then for each
// attribute in schema order the shuffled rows are stably sorted on that
// attribute and every row is compared with its circular predecessor. Block i
// (rows i*n .. i*n+n-1) holds the comparisons for the sort on attribute i.
inline BinarySampleMatrix transform(const Dataset& d, std::uint64_t seed) {
    const std::size_t n = d.rows();
    const std::size_t k = d.cols();
    if (n < 2) throw DataError("transform: need at least 2 rows to form pairs, got " + std::to_string(n));

    std::vector<std::vector<std::int32_t>> codes(k);
    for (std::size_t j = 0; j < k; ++j) codes[j] = detail::rank_codes(d.column(j));

    std::vector<std::size_t> shuffled(n);
    std::iota(shuffled.begin(), shuffled.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    BinarySampleMatrix out(n * k, d.schema(), n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < k; ++i) {
        order = shuffled;
        const auto& key = codes[i];
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return key[a] < key[b]; });
        for (std::size_t j = 0; j < n; ++j) {
            const auto row = order[j];
            const auto prev = order[(j + n - 1) % n];
            for (std::size_t l = 0; l < k; ++l) {
                const auto c = codes[l][row];
                if (c >= 0 && c == codes[l][prev]) out.set(i * n + j, l, true);
            }
        }
    }
    return out;
}

inline Dataset subsample_rows(const Dataset& d, std::size_t max_rows, std::uint64_t seed) {
    if (max_rows < 2) throw UsageError("subsample_rows: max_rows must be at least 2");
    if (d.rows() <= max_rows) return d;
    std::vector<std::size_t> all(d.rows());
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::size_t> keep;
    keep.reserve(max_rows);
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(keep), max_rows, rng);
    return d.select_rows(keep);
}

} // namespace sparsefd
