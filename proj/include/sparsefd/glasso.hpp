#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparsefd/covariance.hpp"
#include "sparsefd/error.hpp"

namespace sparsefd {

struct GlassoConfig {
    double lambda = 0.01;
    // Stop when the mean absolute change of W over one sweep drops below tol.
    double tol = 1e-4;
    int max_sweeps = 100;
    double inner_tol = 1e-7;
    int inner_max_iter = 1000;

    void validate() const {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw UsageError("glasso: lambda must be a positive finite number");
        if (!(tol > 0.0)) throw UsageError("glasso: tol must be positive");
        if (max_sweeps < 1) throw UsageError("glasso: max_sweeps must be >= 1");
        if (!(inner_tol > 0.0)) throw UsageError("glasso: inner_tol must be positive");
        if (inner_max_iter < 1) throw UsageError("glasso: inner_max_iter must be >= 1");
    }
};

struct SweepRecord {
    int sweep = 0;
    double objective = 0.0;
    double max_change = 0.0;
    double mean_change = 0.0;
};

struct PrecisionMatrix {
    Eigen::MatrixXd theta;
    Eigen::MatrixXd w;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<SweepRecord> trace;
};

// c * sqrt(log k / N), the usual high-dimensional rate.
inline double default_lambda(std::size_t k, std::size_t n_samples, double c = 0.5) {
    if (k < 2 || n_samples == 0) return c;
    return c * std::sqrt(std::log(static_cast<double>(k)) / static_cast<double>(n_samples));
}

inline double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

// min_b 1/2 b'Gb - b'y + lambda |b|_1 by cyclic coordinate descent.
// `beta` is the warm start and is overwritten with the solution.
inline void lasso_cd_inplace(const Eigen::MatrixXd& gram, const Eigen::VectorXd& target, double lambda,
                             double inner_tol, int inner_max_iter, Eigen::VectorXd& beta) {
    const Eigen::Index p = target.size();
    if (beta.size() != p) beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd fitted = gram * beta;
    for (int it = 0; it < inner_max_iter; ++it) {
        double max_delta = 0.0;
        for (Eigen::Index m = 0; m < p; ++m) {
            const double diag = gram(m, m);
            const double partial = target(m) - (fitted(m) - diag * beta(m));
            const double next = soft_threshold(partial, lambda) / diag;
            const double delta = next - beta(m);
            if (!std::isfinite(next)) throw NumericalError("lasso: non-finite coefficient");
            if (delta != 0.0) {
                fitted.noalias() += gram.col(m) * delta;
                beta(m) = next;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        if (max_delta < inner_tol) break;
    }
}

inline Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& gram, const Eigen::VectorXd& target, double lambda,
                                double inner_tol = 1e-7, int inner_max_iter = 1000) {
    if (gram.rows() != gram.cols() || gram.rows() != target.size())
        throw UsageError("lasso: gram must be square and match the target length");
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(target.size());
    lasso_cd_inplace(gram, target, lambda, inner_tol, inner_max_iter, beta);
    return beta;
}

// -log det(theta) + tr(S theta) + lambda * sum_ij |theta_ij|, diagonal included.
inline double objective(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& s, double lambda) {
    Eigen::LLT<Eigen::MatrixXd> llt(theta);
    if (llt.info() != Eigen::Success) throw NumericalError("objective: theta is not positive definite");
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -log_det + (s.cwiseProduct(theta)).sum() + lambda * theta.cwiseAbs().sum();
}

inline double objective(const PrecisionMatrix& p, const CovarianceMatrix& s, double lambda) {
    return objective(p.theta, s.s, lambda);
}

namespace detail {

inline bool is_positive_definite(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    return llt.info() == Eigen::Success;
}

// Copy of `m` with row and column j removed.
inline Eigen::MatrixXd drop_index(const Eigen::MatrixXd& m, Eigen::Index j) {
    const Eigen::Index k = m.rows();
    const Eigen::Index a = j, b = k - j - 1;
    Eigen::MatrixXd out(k - 1, k - 1);
    out.topLeftCorner(a, a) = m.topLeftCorner(a, a);
    out.topRightCorner(a, b) = m.topRightCorner(a, b);
    out.bottomLeftCorner(b, a) = m.bottomLeftCorner(b, a);
    out.bottomRightCorner(b, b) = m.bottomRightCorner(b, b);
    return out;
}

inline Eigen::VectorXd drop_entry(const Eigen::VectorXd& v, Eigen::Index j) {
    Eigen::VectorXd out(v.size() - 1);
    out.head(j) = v.head(j);
    out.tail(v.size() - j - 1) = v.tail(v.size() - j - 1);
    return out;
}

// theta_jj = 1 / (w_jj - w_12' beta_j), theta_12 = -beta_j * theta_jj,
// then symmetrized by averaging.
inline Eigen::MatrixXd recover_theta(const Eigen::MatrixXd& w, const std::vector<Eigen::VectorXd>& betas) {
    const Eigen::Index k = w.rows();
    Eigen::MatrixXd theta(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::VectorXd w12 = drop_entry(w.col(j), j);
        const double denom = w(j, j) - w12.dot(betas[j]);
        if (!(denom > 0.0) || !std::isfinite(denom))
            throw NumericalError("glasso: non-positive Schur complement while recovering theta column " +
                                 std::to_string(j));
        const double tjj = 1.0 / denom;
        theta(j, j) = tjj;
        for (Eigen::Index i = 0, r = 0; i < k; ++i) {
            if (i == j) continue;
            theta(i, j) = -betas[j](r++) * tjj;
        }
    }
    return 0.5 * (theta + theta.transpose());
}

} // namespace detail

// Graphical Lasso by block coordinate descent on W = inverse(theta):
// each column j solves a LASSO with gram W_{-j,-j}, response s_{-j,j}.
inline PrecisionMatrix graphical_lasso(const CovarianceMatrix& cov, const GlassoConfig& cfg) {
    cfg.validate();
    const Eigen::MatrixXd& s = cov.s;
    const Eigen::Index k = s.rows();
    if (k == 0 || s.cols() != k) throw UsageError("glasso: covariance must be square and nonempty");
    if (!s.allFinite()) throw NumericalError("glasso: covariance has non-finite entries");
    if (!detail::is_positive_definite(s))
        throw NumericalError("glasso: covariance is not positive definite (raise the ridge)");

    PrecisionMatrix out;
    out.lambda = cfg.lambda;
    out.w = s;
    out.w.diagonal().array() += cfg.lambda;
    std::vector<Eigen::VectorXd> betas(static_cast<std::size_t>(k), Eigen::VectorXd::Zero(k - 1));

    if (k == 1) {
        out.theta = out.w.cwiseInverse();
        out.converged = true;
        out.trace.push_back({0, objective(out.theta, s, cfg.lambda), 0.0, 0.0});
        return out;
    }

    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        const Eigen::MatrixXd previous = out.w;
        for (Eigen::Index j = 0; j < k; ++j) {
            const Eigen::MatrixXd gram = detail::drop_index(out.w, j);
            const Eigen::VectorXd target = detail::drop_entry(s.col(j), j);
            auto& beta = betas[static_cast<std::size_t>(j)];
            lasso_cd_inplace(gram, target, cfg.lambda, cfg.inner_tol, cfg.inner_max_iter, beta);
            const Eigen::VectorXd w12 = gram * beta;
            for (Eigen::Index i = 0, r = 0; i < k; ++i) {
                if (i == j) continue;
                out.w(i, j) = w12(r);
                out.w(j, i) = w12(r);
                ++r;
            }
        }
        if (!out.w.allFinite()) throw NumericalError("glasso: non-finite values in W at sweep " + std::to_string(sweep));
        if (!detail::is_positive_definite(out.w))
            throw NumericalError("glasso: W lost positive definiteness at sweep " + std::to_string(sweep));

        const Eigen::MatrixXd change = (out.w - previous).cwiseAbs();
        SweepRecord rec;
        rec.sweep = sweep;
        rec.max_change = change.maxCoeff();
        rec.mean_change = change.mean();
        out.theta = detail::recover_theta(out.w, betas);
        Eigen::LLT<Eigen::MatrixXd> llt(out.theta);
        rec.objective = llt.info() == Eigen::Success ? objective(out.theta, s, cfg.lambda)
                                                     : std::numeric_limits<double>::infinity();
        out.trace.push_back(rec);
        out.iterations = sweep;
        if (rec.mean_change < cfg.tol) {
            out.converged = true;
            break;
        }
    }
    if (!detail::is_positive_definite(out.theta))
        throw NumericalError("glasso: recovered precision matrix is not positive definite");
    return out;
}

} // namespace sparsefd
