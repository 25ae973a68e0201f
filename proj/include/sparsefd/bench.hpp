#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sparsefd/dataset.hpp"
#include "sparsefd/eval.hpp"
#include "sparsefd/pipeline.hpp"
#include "sparsefd/synth.hpp"

namespace sparsefd {

// Least-squares slope of log(y) against log(x); nullopt with fewer than two points.
inline std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2 || x.size() != y.size()) return std::nullopt;
    double mx = 0, my = 0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

struct ScalingRow {
    std::size_t k = 0;
    double total_sec = 0.0; // CSV load + full pipeline
    double sl_sec = 0.0;    // covariance + glasso + factorization + FD generation
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    std::optional<double> total_slope;
    std::optional<double> sl_slope;

    std::string csv() const {
        std::ostringstream out;
        out << "k,total_sec,sl_sec\n";
        for (const auto& r : rows) out << r.k << ',' << r.total_sec << ',' << r.sl_sec << '\n';
        return out.str();
    }
};

struct ScalingOptions {
    std::vector<std::size_t> k_list{8, 16, 32, 64};
    std::size_t reps = 3;
    std::size_t n_tuples = 1000;
    Range<std::size_t> card{64, 216};
    std::uint64_t seed = 0;
    DiscoverOptions discover;
};

// Column-scalability sweep. Each rep generates a fresh zero-noise instance,
// serializes it to CSV, and times loading plus discovery.
inline ScalingResult bench_scaling(const ScalingOptions& opts) {
    for (std::size_t i = 1; i < opts.k_list.size(); ++i)
        if (opts.k_list[i] <= opts.k_list[i - 1]) throw UsageError("bench_scaling: k list must be strictly ascending");
    if (opts.reps == 0) throw UsageError("bench_scaling: reps must be >= 1");

    ScalingResult out;
    for (std::size_t ki = 0; ki < opts.k_list.size(); ++ki) {
        ScalingRow row;
        row.k = opts.k_list[ki];
        for (std::size_t rep = 0; rep < opts.reps; ++rep) {
            SynthConfig cfg;
            cfg.n_attributes = row.k;
            cfg.n_tuples = opts.n_tuples;
            cfg.domain_card_range = opts.card;
            cfg.seed = detail::derive_seed(opts.seed, ki * 1000 + rep);
            const auto data = generate(cfg);
            std::ostringstream csv;
            write_csv(csv, data.dataset);
            const std::string text = csv.str();

            const auto start = std::chrono::steady_clock::now();
            const auto loaded = parse_csv(text);
            const auto result = discover(loaded, opts.discover);
            const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const auto& t = result.timings;
            row.total_sec += total;
            row.sl_sec += t.get("covariance") + t.get("glasso") + t.get("factorize") + t.get("generate");
        }
        row.total_sec /= static_cast<double>(opts.reps);
        row.sl_sec /= static_cast<double>(opts.reps);
        out.rows.push_back(row);
    }
    std::vector<double> k, total, sl;
    for (const auto& r : out.rows) {
        k.push_back(static_cast<double>(r.k));
        total.push_back(r.total_sec);
        sl.push_back(r.sl_sec);
    }
    out.total_slope = loglog_slope(k, total);
    out.sl_slope = loglog_slope(k, sl);
    return out;
}

struct SettingRun {
    SynthSetting setting;
    std::vector<EvalReport> instances;
    EvalReport median;
};

// Generates `instances` datasets for a setting, runs discovery on each and
// scores against the generator's truth. A noise override keeps the setting's
// instance seeds, so only the injected noise differs between rates.
inline SettingRun run_setting(const SynthSetting& setting, std::size_t instances, std::uint64_t seed,
                              const DiscoverOptions& opts, std::optional<double> noise_override = std::nullopt) {
    SettingRun out{setting, {}, {}};
    if (noise_override) out.setting.noise_rate = *noise_override;
    for (std::size_t i = 0; i < instances; ++i) {
        auto cfg = make_config(setting, i, seed);
        if (noise_override) cfg.noise_rate = *noise_override;
        const auto data = generate(cfg);
        auto run_opts = opts;
        run_opts.seed = cfg.seed;
        const auto result = discover(data.dataset, run_opts);
        out.instances.push_back(score(result.fds, data.truth));
    }
    out.median = median_aggregate(out.instances);
    return out;
}

// Noise-rate sweep over a fixed t/r/d setting.
inline std::vector<SettingRun> bench_noise(SynthSetting base, const std::vector<double>& rates, std::size_t instances,
                                           std::uint64_t seed, const DiscoverOptions& opts) {
    std::vector<SettingRun> out;
    for (double rate : rates) {
        auto run = run_setting(base, instances, seed, opts, rate);
        std::ostringstream label;
        label << "noise=" << rate;
        run.setting.noise_label = label.str();
        out.push_back(std::move(run));
    }
    return out;
}

} // namespace sparsefd
