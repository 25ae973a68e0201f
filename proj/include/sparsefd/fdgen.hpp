#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsefd/error.hpp"
#include "sparsefd/factorize.hpp"

namespace sparsefd {

struct FD {
    std::vector<std::string> lhs;
    std::string rhs;
    std::vector<double> weights;

    friend bool operator==(const FD&, const FD&) = default;
};

struct FDSet {
    std::vector<FD> fds;
    std::vector<std::string> schema;
    double threshold = 0.0;

    std::size_t size() const noexcept { return fds.size(); }
    bool empty() const noexcept { return fds.empty(); }
};

// One FD per column j of B: lhs = attributes i < j with |b_ij| > tau.
inline FDSet generate_fds(const AutoregressionMatrix& b, double tau) {
    if (!(tau >= 0.0)) throw UsageError("generate_fds: tau must be >= 0");
    const Eigen::Index k = b.b.rows();
    auto name = [&](Eigen::Index i) {
        return static_cast<std::size_t>(i) < b.schema.size() ? b.schema[static_cast<std::size_t>(i)]
                                                             : "A" + std::to_string(i);
    };
    FDSet out;
    out.schema = b.schema;
    out.threshold = tau;
    for (Eigen::Index j = 0; j < k; ++j) {
        FD fd;
        for (Eigen::Index i = 0; i < j; ++i) {
            const double w = b.b(i, j);
            if (std::abs(w) > tau) {
                fd.lhs.push_back(name(i));
                fd.weights.push_back(w);
            }
        }
        if (fd.lhs.empty()) continue;
        fd.rhs = name(j);
        out.fds.push_back(std::move(fd));
    }
    return out;
}

enum class FDFormat { JsonLines, Human };

inline nlohmann::json to_json(const FD& fd) {
    return nlohmann::json{{"lhs", fd.lhs}, {"rhs", fd.rhs}, {"weights", fd.weights}};
}

inline std::string serialize_fds(const FDSet& set, FDFormat format) {
    std::ostringstream out;
    if (format == FDFormat::JsonLines) {
        for (const auto& fd : set.fds) out << to_json(fd).dump() << '\n';
        return out.str();
    }
    std::vector<const FD*> sorted;
    for (const auto& fd : set.fds) sorted.push_back(&fd);
    auto rank = [&](const FD* fd) {
        auto it = std::find(set.schema.begin(), set.schema.end(), fd->rhs);
        return static_cast<std::size_t>(it - set.schema.begin());
    };
    std::stable_sort(sorted.begin(), sorted.end(), [&](auto a, auto b) { return rank(a) < rank(b); });
    for (const auto* fd : sorted) {
        for (std::size_t i = 0; i < fd->lhs.size(); ++i) out << (i ? ", " : "") << fd->lhs[i];
        out << " -> " << fd->rhs << '\n';
    }
    return out.str();
}

// Inverse of the json-lines form. Blank lines are ignored; weights are optional.
inline FDSet parse_fds(std::string_view text, std::vector<std::string> schema = {}) {
    FDSet out;
    out.schema = std::move(schema);
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            FD fd;
            fd.lhs = j.at("lhs").get<std::vector<std::string>>();
            fd.rhs = j.at("rhs").get<std::string>();
            if (j.contains("weights")) fd.weights = j.at("weights").get<std::vector<double>>();
            if (fd.lhs.empty()) throw DataError("empty lhs");
            if (!fd.weights.empty() && fd.weights.size() != fd.lhs.size())
                throw DataError("weights length differs from lhs length");
            out.fds.push_back(std::move(fd));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("fd parse error at line " + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("fd parse error at line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace sparsefd
