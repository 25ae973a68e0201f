#pragma once

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsefd/error.hpp"
#include "sparsefd/fdgen.hpp"

namespace sparsefd {

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<FD> matched;
    std::vector<FD> spurious;
    std::vector<FD> missed;
    // Set when the corresponding denominator was zero.
    bool precision_undefined = false;
    bool recall_undefined = false;
};

inline double f1_score(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

// Exact-match scoring: a predicted FD is correct iff some truth FD has the
// same rhs and the same lhs as a set.
inline EvalReport score(const FDSet& predicted, const FDSet& truth) {
    if (!predicted.schema.empty() && !truth.schema.empty() && predicted.schema != truth.schema)
        throw DataError("score: predicted and truth FD sets use different schemas");

    auto key = [](const FD& fd) {
        std::set<std::string> lhs(fd.lhs.begin(), fd.lhs.end());
        return std::make_pair(fd.rhs, lhs);
    };
    std::vector<bool> used(truth.fds.size(), false);
    EvalReport out;
    for (const auto& fd : predicted.fds) {
        const auto k = key(fd);
        bool hit = false;
        for (std::size_t t = 0; t < truth.fds.size(); ++t) {
            if (!used[t] && key(truth.fds[t]) == k) {
                used[t] = true;
                hit = true;
                break;
            }
        }
        (hit ? out.matched : out.spurious).push_back(fd);
    }
    for (std::size_t t = 0; t < truth.fds.size(); ++t)
        if (!used[t]) out.missed.push_back(truth.fds[t]);

    const auto m = static_cast<double>(out.matched.size());
    if (predicted.fds.empty()) {
        out.precision_undefined = true;
        out.precision = truth.fds.empty() ? 1.0 : 0.0;
    } else {
        out.precision = m / static_cast<double>(predicted.fds.size());
    }
    if (truth.fds.empty()) {
        out.recall_undefined = true;
        out.recall = 1.0;
    } else {
        out.recall = m / static_cast<double>(truth.fds.size());
    }
    out.f1 = f1_score(out.precision, out.recall);
    return out;
}

// The report whose F1 is the (lower) median, returned whole so P, R and F1
// stay coupled. Among equal F1s the earliest report wins.
inline EvalReport median_aggregate(std::span<const EvalReport> reports) {
    if (reports.empty()) throw UsageError("median_aggregate: no reports");
    std::vector<double> f1s;
    for (const auto& r : reports) f1s.push_back(r.f1);
    std::sort(f1s.begin(), f1s.end());
    const double median = f1s[(f1s.size() - 1) / 2];
    for (const auto& r : reports)
        if (r.f1 == median) return r;
    return reports.front(); // unreachable
}

inline nlohmann::json to_json(const EvalReport& r) {
    auto list = [](const std::vector<FD>& fds) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& fd : fds) a.push_back(to_json(fd));
        return a;
    };
    return {{"precision", r.precision},
            {"recall", r.recall},
            {"f1", r.f1},
            {"precision_undefined", r.precision_undefined},
            {"recall_undefined", r.recall_undefined},
            {"matched", list(r.matched)},
            {"spurious", list(r.spurious)},
            {"missed", list(r.missed)}};
}

struct ReportRow {
    std::string label;
    EvalReport report;
};

// Aligned text table, one row per setting: label | P | R | F1.
inline std::string format_table(std::span<const ReportRow> rows) {
    std::size_t width = 7;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-*s  %9s  %9s  %9s\n", static_cast<int>(width), "setting", "P", "R", "F1");
    out += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-*s  %9.3f  %9.3f  %9.3f\n", static_cast<int>(width), r.label.c_str(),
                      r.report.precision, r.report.recall, r.report.f1);
        out += buf;
    }
    return out;
}

} // namespace sparsefd
