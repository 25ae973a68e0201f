#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparsefd/error.hpp"
#include "sparsefd/glasso.hpp"

namespace sparsefd {

// theta = U diag(d) U' with U unit upper triangular.
struct UDUFactorization {
    Eigen::MatrixXd u;
    Eigen::VectorXd d;

    Eigen::MatrixXd reconstruct() const { return u * d.asDiagonal() * u.transpose(); }
};

// Strictly upper triangular; column j holds the coefficients of attribute j
// on the attributes that precede it.
struct AutoregressionMatrix {
    Eigen::MatrixXd b;
    std::vector<std::string> schema;
};

// Pivot-free upper LDL': eliminates from the last index upward so the
// attribute order is preserved. Requires a positive definite input.
inline UDUFactorization udu_factorize(const Eigen::MatrixXd& theta) {
    const Eigen::Index k = theta.rows();
    if (theta.cols() != k) throw UsageError("udu: matrix must be square");
    if (!theta.allFinite()) throw NumericalError("udu: non-finite entries");

    Eigen::MatrixXd a = theta;
    UDUFactorization f{Eigen::MatrixXd::Identity(k, k), Eigen::VectorXd(k)};
    for (Eigen::Index j = k - 1; j >= 0; --j) {
        const double pivot = a(j, j);
        if (!(pivot > 0.0) || !std::isfinite(pivot))
            throw NumericalError("udu: non-positive pivot at index " + std::to_string(j) +
                                 " (matrix is not positive definite; raise lambda or the ridge)");
        f.d(j) = pivot;
        if (j == 0) break;
        auto col = f.u.col(j).head(j);
        col = a.col(j).head(j) / pivot;
        a.topLeftCorner(j, j).noalias() -= pivot * col * col.transpose();
    }
    return f;
}

inline UDUFactorization udu_factorize(const PrecisionMatrix& p) { return udu_factorize(p.theta); }

inline AutoregressionMatrix autoregression(const UDUFactorization& f, std::vector<std::string> schema = {}) {
    const Eigen::Index k = f.u.rows();
    AutoregressionMatrix out{Eigen::MatrixXd::Identity(k, k) - f.u, std::move(schema)};
    // I - U is exactly zero on and below the diagonal for a unit upper U;
    // pin it so the triangularity invariant holds bit-for-bit.
    out.b.triangularView<Eigen::Lower>().setZero();
    return out;
}

} // namespace sparsefd
