#pragma once

#include <bit>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparsefd/error.hpp"
#include "sparsefd/transform.hpp"

namespace sparsefd {

struct CovarianceMatrix {
    Eigen::MatrixXd s;
    std::size_t n_samples = 0;
    std::vector<std::string> schema;

    Eigen::Index size() const noexcept { return s.rows(); }
};

// Population (1/N) covariance of the sample columns. For {0,1} data
//   s_ij = c_ij / N - p_i p_j,  c_ij = #rows with both bits set, p_i = c_ii / N,
// which equals (1/N) sum (z_i - mean_i)(z_j - mean_j) exactly in real arithmetic.
inline CovarianceMatrix empirical_covariance(const BinarySampleMatrix& m) {
    if (m.rows() < 2) throw DataError("covariance: need at least 2 sample rows, got " + std::to_string(m.rows()));
    const auto k = static_cast<Eigen::Index>(m.cols());
    const double n = static_cast<double>(m.rows());

    Eigen::VectorXd mean(k);
    for (Eigen::Index j = 0; j < k; ++j) mean(j) = static_cast<double>(m.column_count(j)) / n;

    CovarianceMatrix out{Eigen::MatrixXd(k, k), m.rows(), m.schema()};
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto wi = m.column_words(i);
        for (Eigen::Index j = i; j < k; ++j) {
            const auto wj = m.column_words(j);
            std::size_t both = 0;
            for (std::size_t w = 0; w < wi.size(); ++w) both += static_cast<std::size_t>(std::popcount(wi[w] & wj[w]));
            const double v = static_cast<double>(both) / n - mean(i) * mean(j);
            out.s(i, j) = v;
            out.s(j, i) = v;
        }
    }
    return out;
}

inline CovarianceMatrix ridge_regularize(CovarianceMatrix s, double eps) {
    if (!(eps >= 0.0)) throw UsageError("ridge: eps must be >= 0");
    s.s.diagonal().array() += eps;
    return s;
}

// Attributes whose sample column is constant (always agree or never agree).
inline std::vector<std::size_t> zero_variance_columns(const CovarianceMatrix& s, double tol = 1e-15) {
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < s.size(); ++j)
        if (s.s(j, j) <= tol) out.push_back(static_cast<std::size_t>(j));
    return out;
}

} // namespace sparsefd
