#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsefd/covariance.hpp"
#include "sparsefd/dataset.hpp"
#include "sparsefd/error.hpp"
#include "sparsefd/factorize.hpp"
#include "sparsefd/fdgen.hpp"
#include "sparsefd/glasso.hpp"
#include "sparsefd/transform.hpp"

namespace sparsefd {

inline constexpr const char* kVersion = "0.3.0";

struct DiscoverOptions {
    // Unset means default_lambda(k, N, lambda_scale).
    std::optional<double> lambda;
    double lambda_scale = 0.5;
    double tau = 0.05;
    double ridge = 1e-6;
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_rows;
    std::vector<std::string> column_order;
    GlassoConfig glasso;
    bool keep_samples = false;
};

struct StageTimings {
    std::vector<std::pair<std::string, double>> seconds;

    void add(std::string stage, double s) { seconds.emplace_back(std::move(stage), s); }
    double get(const std::string& stage) const {
        for (const auto& [k, v] : seconds)
            if (k == stage) return v;
        return 0.0;
    }
    double total() const {
        double t = 0.0;
        for (const auto& [k, v] : seconds) t += v;
        return t;
    }
};

struct DiscoverResult {
    std::vector<std::string> schema; // attribute order used for factorization
    std::size_t n_rows = 0;          // after subsampling
    double lambda = 0.0;
    std::optional<BinarySampleMatrix> samples;
    CovarianceMatrix covariance;     // after ridge
    PrecisionMatrix precision;
    UDUFactorization factorization;
    AutoregressionMatrix autoregression;
    FDSet fds;
    std::vector<std::string> zero_variance;
    StageTimings timings;
};

// Moves the named attributes to the front in the given order; the rest keep
// their relative order.
inline Dataset apply_column_order(const Dataset& d, const std::vector<std::string>& front) {
    if (front.empty()) return d;
    std::vector<std::size_t> order;
    std::vector<bool> taken(d.cols(), false);
    for (const auto& name : front) {
        const auto j = d.index_of(name);
        if (taken[j]) throw UsageError("column order lists '" + name + "' twice");
        taken[j] = true;
        order.push_back(j);
    }
    for (std::size_t j = 0; j < d.cols(); ++j)
        if (!taken[j]) order.push_back(j);
    return d.select_columns(order);
}

namespace detail {

template <typename F>
auto run_stage(const std::string& stage, StageTimings& timings, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    try {
        auto result = f();
        timings.add(stage, elapsed());
        return result;
    } catch (const UsageError& e) {
        throw UsageError(stage + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(stage + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(stage + ": " + e.what());
    }
}

} // namespace detail

// subsample -> transform -> covariance + ridge -> graphical lasso ->
// UDU' factorization -> B = I - U -> thresholded FDs.
inline DiscoverResult discover(const Dataset& input, const DiscoverOptions& opts = {}) {
    if (input.cols() < 2) throw DataError("discover: need at least 2 attributes");
    if (!(opts.tau >= 0.0)) throw UsageError("discover: tau must be >= 0");
    if (!(opts.ridge >= 0.0)) throw UsageError("discover: ridge must be >= 0");

    DiscoverResult out;
    auto& t = out.timings;
    std::optional<Dataset> reordered;
    if (!opts.column_order.empty()) reordered = apply_column_order(input, opts.column_order);
    const Dataset& ordered = reordered ? *reordered : input;
    out.schema = ordered.schema();

    std::optional<Dataset> subsampled;
    if (opts.max_rows && ordered.rows() > *opts.max_rows) {
        subsampled = detail::run_stage("subsample", t, [&] { return subsample_rows(ordered, *opts.max_rows, opts.seed); });
    }
    const Dataset& data = subsampled ? *subsampled : ordered;
    out.n_rows = data.rows();

    auto samples = detail::run_stage("transform", t, [&] { return transform(data, opts.seed); });

    out.covariance = detail::run_stage("covariance", t, [&] {
        auto s = empirical_covariance(samples);
        return ridge_regularize(std::move(s), opts.ridge);
    });
    for (auto j : zero_variance_columns(out.covariance, opts.ridge + 1e-15)) out.zero_variance.push_back(out.schema[j]);
    if (opts.keep_samples) out.samples = std::move(samples);

    GlassoConfig cfg = opts.glasso;
    cfg.lambda = opts.lambda.value_or(default_lambda(data.cols(), out.covariance.n_samples, opts.lambda_scale));
    out.lambda = cfg.lambda;
    out.precision = detail::run_stage("glasso", t, [&] { return graphical_lasso(out.covariance, cfg); });

    out.factorization = detail::run_stage("factorize", t, [&] { return udu_factorize(out.precision); });
    out.autoregression = autoregression(out.factorization, out.schema);

    out.fds = detail::run_stage("generate", t, [&] { return generate_fds(out.autoregression, opts.tau); });
    return out;
}

inline nlohmann::json options_json(const DiscoverOptions& o, double resolved_lambda) {
    nlohmann::json j{{"lambda", resolved_lambda},
                     {"lambda_explicit", o.lambda.has_value()},
                     {"lambda_scale", o.lambda_scale},
                     {"tau", o.tau},
                     {"ridge", o.ridge},
                     {"seed", o.seed},
                     {"column_order", o.column_order},
                     {"glasso",
                      {{"tol", o.glasso.tol},
                       {"max_sweeps", o.glasso.max_sweeps},
                       {"inner_tol", o.glasso.inner_tol},
                       {"inner_max_iter", o.glasso.inner_max_iter}}}};
    j["max_rows"] = o.max_rows ? nlohmann::json(*o.max_rows) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json diagnostics_json(const DiscoverResult& r) {
    std::vector<double> d(r.factorization.d.data(), r.factorization.d.data() + r.factorization.d.size());
    return {{"schema", r.schema},
            {"n_rows", r.n_rows},
            {"n_samples", r.covariance.n_samples},
            {"zero_variance_columns", r.zero_variance},
            {"glasso_sweeps", r.precision.iterations},
            {"glasso_converged", r.precision.converged},
            {"udu_d", d},
            {"n_fds", r.fds.size()}};
}

inline nlohmann::json timings_json(const StageTimings& t) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : t.seconds) j[k] = v;
    return j;
}

} // namespace sparsefd
