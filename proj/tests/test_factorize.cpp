#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sparsefd/factorize.hpp"
#include "sparsefd/pipeline.hpp"
#include "sparsefd/synth.hpp"

using namespace sparsefd;

TEST(Udu, Identity) {
    const auto f = udu_factorize(Eigen::MatrixXd::Identity(4, 4));
    EXPECT_EQ(f.u, Eigen::MatrixXd::Identity(4, 4));
    EXPECT_EQ(f.d, Eigen::VectorXd::Ones(4));
}

TEST(Udu, TwoByTwo) {
    Eigen::Matrix2d t;
    t << 2, 1, 1, 1;
    const auto f = udu_factorize(t);
    Eigen::Matrix2d u;
    u << 1, 1, 0, 1;
    EXPECT_EQ(f.u, Eigen::MatrixXd(u));
    EXPECT_EQ(f.d, Eigen::Vector2d(1, 1));
}

TEST(Udu, RandomReconstruction) {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        const auto t = oracle::random_spd(4, rng);
        const auto f = udu_factorize(t);
        EXPECT_LE(oracle::inf_norm(t - f.reconstruct()), 1e-10);
        EXPECT_TRUE(f.u.isUpperTriangular(0.0));
        EXPECT_EQ(f.u.diagonal(), Eigen::VectorXd::Ones(4));
        EXPECT_GT(f.d.minCoeff(), 0.0);
    }
}

TEST(Udu, RejectsIndefinite) {
    Eigen::Matrix2d t;
    t << 1, 2, 2, 1;
    EXPECT_THROW(udu_factorize(t), NumericalError);
    EXPECT_THROW(udu_factorize(Eigen::MatrixXd::Zero(2, 3)), UsageError);
}

TEST(Autoregression, Basics) {
    UDUFactorization id{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3)};
    EXPECT_EQ(autoregression(id).b, Eigen::MatrixXd::Zero(3, 3));

    Eigen::Matrix2d u;
    u << 1, 1, 0, 1;
    const auto b = autoregression({u, Eigen::Vector2d(1, 1)}, {"A", "B"});
    Eigen::Matrix2d expected;
    expected << 0, -1, 0, 0;
    EXPECT_EQ(b.b, Eigen::MatrixXd(expected));
    EXPECT_EQ(b.schema, (std::vector<std::string>{"A", "B"}));
}

TEST(Autoregression, FdEdgeDominatesItsColumn) {
    SynthConfig cfg;
    cfg.n_attributes = 2;
    cfg.fd_lhs_size_range = {1, 1};
    cfg.seed = 3;
    const auto out = generate(cfg);
    ASSERT_EQ(out.truth.size(), 1u);
    DiscoverOptions opts;
    opts.lambda = 0.01;
    const auto r = discover(out.dataset, opts);
    EXPECT_GT(std::abs(r.autoregression.b(0, 1)), 0.05);
    EXPECT_EQ(std::abs(r.autoregression.b(0, 1)), r.autoregression.b.col(1).cwiseAbs().maxCoeff());
}
