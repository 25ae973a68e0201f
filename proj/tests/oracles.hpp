#pragma once

// Reference implementations used only by tests. Each one is deliberately
// naive and shares no code path with the library under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparsefd/dataset.hpp"
#include "sparsefd/fdgen.hpp"
#include "sparsefd/transform.hpp"

namespace oracle {

// Column covariance with 1/N normalization, from unpacked bits.
inline Eigen::MatrixXd covariance(const sparsefd::BinarySampleMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.rows());
    const auto k = static_cast<Eigen::Index>(m.cols());
    Eigen::MatrixXd x(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            x(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) ? 1.0 : 0.0;
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - mean;
    return (c.transpose() * c) / static_cast<double>(n);
}

// Well-conditioned random SPD matrix: Q diag(eigs) Q' with eigs in [lo, hi].
inline Eigen::MatrixXd random_spd(Eigen::Index k, std::mt19937_64& rng, double lo = 0.2, double hi = 2.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd a(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd eig(k);
    for (Eigen::Index i = 0; i < k; ++i) eig(i) = u(rng);
    Eigen::MatrixXd s = q * eig.asDiagonal() * q.transpose();
    return (s + s.transpose()) / 2.0;
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().minCoeff();
}

inline double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Lasso objective 0.5 b'Gb - t'b + lambda |b|_1.
inline double lasso_objective(const Eigen::MatrixXd& g, const Eigen::VectorXd& t, double lambda,
                              const Eigen::VectorXd& b) {
    return 0.5 * b.dot(g * b) - t.dot(b) + lambda * b.cwiseAbs().sum();
}

// Proximal gradient (ISTA) with step 1/L, run to a fixed iteration count.
inline Eigen::VectorXd lasso_ista(const Eigen::MatrixXd& g, const Eigen::VectorXd& t, double lambda,
                                  int iters = 200000) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const double step = 1.0 / es.eigenvalues().maxCoeff();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(t.size());
    for (int it = 0; it < iters; ++it) {
        const Eigen::VectorXd z = b - step * (g * b - t);
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const double a = std::abs(z(i)) - step * lambda;
            b(i) = a > 0 ? std::copysign(a, z(i)) : 0.0;
        }
    }
    return b;
}

// Glasso objective evaluated through a dense eigendecomposition.
inline double glasso_objective(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& s, double lambda) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) logdet += std::log(es.eigenvalues()(i));
    return -logdet + (s * theta).trace() + lambda * theta.cwiseAbs().sum();
}

// Largest violation of the stationarity conditions of the glasso problem
// (diagonal penalized): W = inv(Theta) must satisfy
//   W_ii = S_ii + lambda,
//   W_ij = S_ij + lambda*sign(Theta_ij)      where Theta_ij != 0,
//   |W_ij - S_ij| <= lambda                   where Theta_ij == 0.
inline double kkt_violation(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& s, double lambda,
                            double zero_tol = 1e-10) {
    const Eigen::MatrixXd w = theta.inverse();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            const double g = w(i, j) - s(i, j);
            double v;
            if (i == j)
                v = std::abs(g - lambda);
            else if (std::abs(theta(i, j)) > zero_tol)
                v = std::abs(g - lambda * (theta(i, j) > 0 ? 1.0 : -1.0));
            else
                v = std::max(0.0, std::abs(g) - lambda);
            worst = std::max(worst, v);
        }
    }
    return worst;
}

// Exact FD check by grouping rows on the lhs values.
inline bool fd_holds(const sparsefd::Dataset& d, const sparsefd::FD& fd) {
    std::vector<std::size_t> lhs;
    for (const auto& a : fd.lhs) lhs.push_back(d.index_of(a));
    const auto y = d.index_of(fd.rhs);
    std::map<std::vector<std::string>, std::string> seen;
    for (std::size_t r = 0; r < d.rows(); ++r) {
        std::vector<std::string> key;
        for (auto c : lhs) key.push_back(sparsefd::to_string(d.at(r, c), "\x01"));
        const auto val = sparsefd::to_string(d.at(r, y), "\x01");
        auto [it, inserted] = seen.emplace(key, val);
        if (!inserted && it->second != val) return false;
    }
    return true;
}

// Transform written straight from the algorithm: shuffle, then for each key a
// stable sort and a compare of every row with its circular predecessor.
inline std::vector<std::vector<int>> transform(const sparsefd::Dataset& d, std::uint64_t seed) {
    const std::size_t n = d.rows(), k = d.cols();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    auto type_rank = [](const sparsefd::CellValue& v) { return v.is_missing() ? 0 : v.is_numeric() ? 1 : 2; };
    auto less = [&](const sparsefd::CellValue& a, const sparsefd::CellValue& b) {
        if (type_rank(a) != type_rank(b)) return type_rank(a) < type_rank(b);
        if (a.is_numeric()) return a.as_numeric() < b.as_numeric();
        if (a.is_categorical()) return a.as_categorical() < b.as_categorical();
        return false;
    };

    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < k; ++i) {
        auto order = perm;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return less(d.at(a, i), d.at(b, i)); });
        for (std::size_t j = 0; j < n; ++j) {
            const auto row = order[j], prev = order[(j + n - 1) % n];
            std::vector<int> bits(k);
            for (std::size_t l = 0; l < k; ++l) bits[l] = sparsefd::equality(d.at(row, l), d.at(prev, l)) ? 1 : 0;
            out.push_back(bits);
        }
    }
    return out;
}

} // namespace oracle
