#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sparsefd/error.hpp"

namespace sparsefd {

struct Missing {
    friend bool operator==(Missing, Missing) = default;
};

// A single table cell. Missing is its own alternative and never compares
// equal to a token, including the empty string.
class CellValue {
public:
    using Storage = std::variant<Missing, double, std::string>;

    CellValue() = default;
    CellValue(Missing) {}
    CellValue(double v) : value_(v) {}
    CellValue(int v) : value_(static_cast<double>(v)) {}
    CellValue(std::string token) : value_(std::move(token)) {}
    CellValue(const char* token) : value_(std::string(token)) {}

    static CellValue categorical(std::string token) { return CellValue(std::move(token)); }
    static CellValue numeric(double v) { return CellValue(v); }
    static CellValue missing() { return CellValue(); }

    bool is_missing() const noexcept { return std::holds_alternative<Missing>(value_); }
    bool is_numeric() const noexcept { return std::holds_alternative<double>(value_); }
    bool is_categorical() const noexcept { return std::holds_alternative<std::string>(value_); }

    double as_numeric() const { return std::get<double>(value_); }
    const std::string& as_categorical() const { return std::get<std::string>(value_); }
    const Storage& storage() const noexcept { return value_; }

    // Structural identity (Missing == Missing here). Use equality() for the
    // pairwise agreement indicator.
    friend bool operator==(const CellValue&, const CellValue&) = default;

private:
    Storage value_{Missing{}};
};

// Agreement indicator between two cells: 1 iff both are present and equal
// under their type. Numeric comparison is exact.
inline bool equality(const CellValue& a, const CellValue& b) {
    if (a.is_missing() || b.is_missing()) return false;
    return a.storage() == b.storage();
}

inline std::string to_string(const CellValue& v, std::string_view na_token = "") {
    if (v.is_missing()) return std::string(na_token);
    if (v.is_categorical()) return v.as_categorical();
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v.as_numeric());
    return std::string(buf, res.ptr);
}

class Dataset {
public:
    using Column = std::vector<CellValue>;

    Dataset() = default;

    Dataset(std::vector<std::string> schema, std::vector<Column> columns)
        : schema_(std::move(schema)), columns_(std::move(columns)) {
        if (schema_.size() != columns_.size())
            throw DataError("dataset: schema has " + std::to_string(schema_.size()) + " names but " +
                            std::to_string(columns_.size()) + " columns were given");
        if (schema_.empty()) throw DataError("dataset: no attributes");
        std::set<std::string_view> seen;
        for (const auto& name : schema_) {
            if (!seen.insert(name).second) throw DataError("dataset: duplicate attribute name '" + name + "'");
        }
        const auto n = columns_.front().size();
        if (n == 0) throw DataError("dataset: no rows");
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            if (columns_[j].size() != n)
                throw DataError("dataset: column '" + schema_[j] + "' has " + std::to_string(columns_[j].size()) +
                                " rows, expected " + std::to_string(n));
        }
    }

    std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
    std::size_t cols() const noexcept { return columns_.size(); }

    const std::vector<std::string>& schema() const noexcept { return schema_; }
    const std::string& name(std::size_t j) const { return schema_.at(j); }

    std::size_t index_of(std::string_view name) const {
        for (std::size_t j = 0; j < schema_.size(); ++j)
            if (schema_[j] == name) return j;
        throw DataError("dataset: unknown attribute '" + std::string(name) + "'");
    }

    std::span<const CellValue> column(std::size_t j) const { return columns_.at(j); }
    const CellValue& at(std::size_t row, std::size_t col) const { return columns_.at(col).at(row); }

    // Row subset in the given order (indices may repeat).
    Dataset select_rows(std::span<const std::size_t> indices) const {
        std::vector<Column> out(cols());
        for (std::size_t j = 0; j < cols(); ++j) {
            out[j].reserve(indices.size());
            for (auto i : indices) out[j].push_back(columns_[j].at(i));
        }
        return Dataset(schema_, std::move(out));
    }

    // Column permutation: result column c is this->column(order[c]).
    Dataset select_columns(std::span<const std::size_t> order) const {
        std::vector<std::string> names;
        std::vector<Column> out;
        for (auto j : order) {
            names.push_back(schema_.at(j));
            out.push_back(columns_.at(j));
        }
        return Dataset(std::move(names), std::move(out));
    }

    Dataset with_cell(std::size_t row, std::size_t col, CellValue v) const {
        Dataset copy = *this;
        copy.columns_.at(col).at(row) = std::move(v);
        return copy;
    }

    void set(std::size_t row, std::size_t col, CellValue v) { columns_.at(col).at(row) = std::move(v); }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<std::string> schema_;
    std::vector<Column> columns_;
};

// ---------------------------------------------------------------------------
// CSV

struct CsvOptions {
    bool header = true;
    std::set<std::string> na_tokens = {"", "NULL", "null", "NaN"};
    bool numeric_detect = true;
};

namespace detail {

// Splits RFC-4180 records. Quoted fields may contain commas, doubled quotes
// and line breaks. Fully blank lines are skipped.
inline std::vector<std::vector<std::string>> read_records(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool field_started = false;
    std::size_t line = 1;

    auto end_record = [&] {
        if (record.empty() && field.empty() && !field_started) return;
        record.push_back(std::move(field));
        records.push_back(std::move(record));
        record.clear();
        field.clear();
        field_started = false;
    };

    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        const char c = text[i];
        if (c == '"') {
            if (!field.empty())
                throw DataError("csv: unexpected quote inside unquoted field at line " + std::to_string(line));
            field_started = true;
            ++i;
            for (;;) {
                if (i >= n) throw DataError("csv: unterminated quoted field");
                const char q = text[i++];
                if (q == '"') {
                    if (i < n && text[i] == '"') {
                        field.push_back('"');
                        ++i;
                        continue;
                    }
                    break;
                }
                if (q == '\n') ++line;
                field.push_back(q);
            }
            continue;
        }
        if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            field_started = true;
            ++i;
            continue;
        }
        if (c == '\r' || c == '\n') {
            i += (c == '\r' && i + 1 < n && text[i + 1] == '\n') ? 2 : 1;
            end_record();
            ++line;
            continue;
        }
        // Plain run up to the next delimiter.
        const auto stop = text.find_first_of(",\r\n\"", i);
        const auto end = stop == std::string_view::npos ? n : stop;
        field.append(text.substr(i, end - i));
        field_started = true;
        i = end;
    }
    end_record();
    return records;
}

inline bool parse_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto res = std::from_chars(first, s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool needs_quotes(std::string_view s) {
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void write_field(std::ostream& out, std::string_view s) {
    if (!needs_quotes(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

} // namespace detail

inline Dataset parse_csv(std::string_view text, const CsvOptions& opts = {}) {
    auto records = detail::read_records(text);
    if (records.empty()) throw DataError("csv: empty input");

    std::vector<std::string> schema;
    std::size_t first = 0;
    const std::size_t k = records.front().size();
    if (opts.header) {
        schema = std::move(records.front());
        first = 1;
    } else {
        for (std::size_t j = 0; j < k; ++j) schema.push_back("A" + std::to_string(j));
    }
    if (records.size() <= first) throw DataError("csv: header present but no data rows");

    std::vector<Dataset::Column> columns(k);
    for (auto& c : columns) c.reserve(records.size() - first);
    for (std::size_t r = first; r < records.size(); ++r) {
        if (records[r].size() != k)
            throw DataError("csv: record " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                            " fields, expected " + std::to_string(k));
        for (std::size_t j = 0; j < k; ++j) {
            auto& tok = records[r][j];
            if (opts.na_tokens.contains(tok))
                columns[j].emplace_back(Missing{});
            else
                columns[j].emplace_back(std::move(tok));
        }
    }

    if (opts.numeric_detect) {
        for (auto& col : columns) {
            std::vector<double> values(col.size());
            bool numeric = false;
            for (std::size_t i = 0; i < col.size(); ++i) {
                if (col[i].is_missing()) continue;
                if (!detail::parse_number(col[i].as_categorical(), values[i])) {
                    numeric = false;
                    break;
                }
                numeric = true;
            }
            if (!numeric) continue;
            for (std::size_t i = 0; i < col.size(); ++i)
                if (!col[i].is_missing()) col[i] = CellValue(values[i]);
        }
    }
    return Dataset(std::move(schema), std::move(columns));
}

inline Dataset parse_csv(std::istream& in, const CsvOptions& opts = {}) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(std::string_view(buf.str()), opts);
}

inline Dataset load_csv(const std::string& path, const CsvOptions& opts = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("csv: cannot open '" + path + "'");
    try {
        return parse_csv(in, opts);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void write_csv(std::ostream& out, const Dataset& d, std::string_view na_token = "", bool header = true) {
    const auto k = d.cols();
    if (header) {
        for (std::size_t j = 0; j < k; ++j) {
            if (j) out << ',';
            detail::write_field(out, d.name(j));
        }
        out << '\n';
    }
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (j) out << ',';
            detail::write_field(out, to_string(d.at(i, j), na_token));
        }
        out << '\n';
    }
}

inline void save_csv(const std::string& path, const Dataset& d, std::string_view na_token = "") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("csv: cannot write '" + path + "'");
    write_csv(out, d, na_token);
    if (!out) throw DataError("csv: write failed for '" + path + "'");
}

} // namespace sparsefd
