#include <gtest/gtest.h>

#include <cmath>

#include "orlx/lowrank.hpp"
#include "orlx/random.hpp"
#include "orlx/simulate.hpp"

using orlx::LowRankOptions;
using orlx::LowRankVariant;
using orlx::MatrixHandle;
using orlx::RandomEngine;
using orlx::SeedSpec;

namespace {

Eigen::MatrixXd random_dense(RandomEngine& rng, Eigen::Index n, Eigen::Index d) {
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rng.gaussian();
    return m;
}

// alternating least squares on min ||C X Y Dm - M||_F with random restarts;
// independent oracle for the closed-form subproblem solver
double als_oracle(const Eigen::MatrixXd& C, const Eigen::MatrixXd& Dm, const Eigen::MatrixXd& M,
                  Eigen::Index k, int restarts, RandomEngine& rng) {
    const auto pinv = [](const Eigen::MatrixXd& A) {
        return A.completeOrthogonalDecomposition().pseudoInverse();
    };
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Eigen::MatrixXd Y = random_dense(rng, k, Dm.rows());
        Eigen::MatrixXd X;
        for (int it = 0; it < 60; ++it) {
            const Eigen::MatrixXd N = Y * Dm;         // k x b
            X = pinv(C) * M * pinv(N);                // r x k
            const Eigen::MatrixXd L = C * X;          // a x k
            Y = pinv(L) * M * pinv(Dm);               // k x s
        }
        best = std::min(best, (C * X * Y * Dm - M).norm());
    }
    return best;
}

}  // namespace

TEST(EntrywiseLp, Basics) {
    Eigen::MatrixXd a(1, 2);
    a << 3, 4;
    EXPECT_NEAR(orlx::entrywise_lp(a, 2.0), 5.0, 1e-12);
    Eigen::MatrixXd b(2, 2);
    b << 1, -2, 3, 0;
    EXPECT_NEAR(orlx::entrywise_lp(b, 1.0), 6.0, 1e-12);
    RandomEngine rng({1, 0});
    const Eigen::MatrixXd c = random_dense(rng, 8, 5);
    EXPECT_NEAR(orlx::entrywise_lp(c, 2.0), c.norm(), 1e-12 * c.norm());
}

TEST(EntrywiseLp, SparseSkipsImplicitZeros) {
    const auto h = MatrixHandle::sparse(100, 100, {{3, 4, -2.0}, {50, 60, 2.0}});
    EXPECT_NEAR(orlx::entrywise_lp(h, 1.0), 4.0, 1e-12);
    EXPECT_NEAR(orlx::entrywise_lp(h, 1.5), std::pow(2.0 * std::pow(2.0, 1.5), 1.0 / 1.5), 1e-12);
}

TEST(RankConstrainedLs, IdentityProjectionsGiveTruncatedSvd) {
    RandomEngine rng({2, 0});
    const Eigen::MatrixXd M = random_dense(rng, 6, 5);
    const Eigen::Index k = 2;
    const auto [X, Y] = orlx::rank_constrained_ls(Eigen::MatrixXd::Identity(6, 6),
                                                  Eigen::MatrixXd::Identity(5, 5), M, k);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd truncated = svd.matrixU().leftCols(k) *
                                      svd.singularValues().head(k).asDiagonal() *
                                      svd.matrixV().leftCols(k).transpose();
    EXPECT_LT((X * Y - truncated).norm(), 1e-9 * truncated.norm());
}

TEST(RankConstrainedLs, RepresentableInstanceIsExact) {
    RandomEngine rng({2, 1});
    const Eigen::MatrixXd C = random_dense(rng, 7, 4);
    const Eigen::MatrixXd Dm = random_dense(rng, 3, 6);
    const Eigen::MatrixXd Z0 = random_dense(rng, 4, 2) * random_dense(rng, 2, 3);
    const Eigen::MatrixXd M = C * Z0 * Dm;
    const auto [X, Y] = orlx::rank_constrained_ls(C, Dm, M, 2);
    EXPECT_LT((C * X * Y * Dm - M).norm(), 1e-9 * M.norm());
}

TEST(RankConstrainedLs, MatchesAlternatingLeastSquares) {
    RandomEngine rng({2, 2});
    for (int rep = 0; rep < 5; ++rep) {
        const Eigen::MatrixXd C = random_dense(rng, 6, 4);
        const Eigen::MatrixXd Dm = random_dense(rng, 3, 5);
        const Eigen::MatrixXd M = random_dense(rng, 6, 5);
        const auto [X, Y] = orlx::rank_constrained_ls(C, Dm, M, 2);
        const double closed = (C * X * Y * Dm - M).norm();
        const double als = als_oracle(C, Dm, M, 2, 50, rng);
        EXPECT_LE(closed, als * (1.0 + 1e-6)) << "rep " << rep;
    }
}

TEST(RankConstrainedLs, RankValidation) {
    EXPECT_THROW(orlx::rank_constrained_ls(Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(2, 3),
                                           Eigen::MatrixXd::Ones(3, 3), 3),
                 std::invalid_argument);
}

TEST(LpLowRank, ExactRankKRecovery) {
    RandomEngine rng({3, 0});
    Eigen::MatrixXd planted;
    const auto A = orlx::simulate_lowrank(60, 40, 3, 0, 0.0, rng, &planted);
    for (const auto variant : {LowRankVariant::experimental, LowRankVariant::theoretical}) {
        LowRankOptions opts;
        opts.variant = variant;
        opts.restarts = 3;
        const auto f = orlx::lp_lowrank(A, 3, 1.0, opts, SeedSpec{3, 1});
        const double total = std::pow(orlx::entrywise_lp(A, 1.0), 1.0);
        EXPECT_LT(f.loss_p, 1e-6 * total);
    }
}

TEST(LpLowRank, NeverBeatsPcaInFrobenius) {
    RandomEngine rng({3, 2});
    const auto A = orlx::simulate_lowrank(50, 30, 4, 60, 10.0, rng);
    LowRankOptions opts;
    opts.restarts = 5;
    const auto ours = orlx::lp_lowrank(A, 4, 2.0, opts, SeedSpec{3, 3});
    const auto pca = orlx::pca_baseline(A, 4, 2.0);
    EXPECT_GE(ours.loss_p, pca.loss_p * (1.0 - 1e-9));
}

TEST(LpLowRank, OutputRankBounded) {
    RandomEngine rng({3, 4});
    const auto A = orlx::simulate_lowrank(40, 30, 5, 30, 5.0, rng);
    LowRankOptions opts;
    opts.restarts = 2;
    const auto f = orlx::lp_lowrank(A, 5, 1.0, opts, SeedSpec{3, 5});
    EXPECT_EQ(f.U.cols(), 5);
    EXPECT_EQ(f.V.rows(), 5);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(f.U * f.V);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++rank;
    EXPECT_LE(rank, 5);
}

TEST(LpLowRank, LossFieldConsistent) {
    RandomEngine rng({3, 6});
    const auto A = orlx::simulate_lowrank(30, 20, 2, 20, 3.0, rng);
    LowRankOptions opts;
    opts.restarts = 2;
    const double p = 1.5;
    const auto f = orlx::lp_lowrank(A, 2, p, opts, SeedSpec{3, 7});
    const double re = std::pow(orlx::entrywise_lp(Eigen::MatrixXd(f.U * f.V - A.dense_data()), p), p);
    EXPECT_NEAR(f.loss_p, re, 1e-9 * std::max(1.0, re));
}

TEST(LpLowRank, BestOfRestartsMonotone) {
    RandomEngine rng({3, 8});
    const auto A = orlx::simulate_lowrank(40, 40, 3, 40, 20.0, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (int m : {1, 3, 6, 12}) {
        LowRankOptions opts;
        opts.restarts = m;
        const auto f = orlx::lp_lowrank(A, 3, 1.0, opts, SeedSpec{3, 9});
        EXPECT_LE(f.loss_p, prev + 1e-12);
        prev = f.loss_p;
    }
}

TEST(LpLowRank, Validation) {
    RandomEngine rng({3, 10});
    const auto A = orlx::simulate_lowrank(10, 8, 2, 0, 0.0, rng);
    EXPECT_THROW(orlx::lp_lowrank(A, 0, 1.0, {}, SeedSpec{}), std::invalid_argument);
    EXPECT_THROW(orlx::lp_lowrank(A, 9, 1.0, {}, SeedSpec{}), std::invalid_argument);
    EXPECT_THROW(orlx::lp_lowrank(A, 2, 2.5, {}, SeedSpec{}), std::invalid_argument);
}

TEST(PcaBaseline, ExactOnRankK) {
    RandomEngine rng({4, 0});
    const auto A = orlx::simulate_lowrank(25, 20, 3, 0, 0.0, rng);
    EXPECT_LT(orlx::pca_baseline(A, 3, 2.0).loss_p, 1e-10);
}

TEST(PcaBaseline, IdentityRank4L1LossIsOne) {
    const auto A = MatrixHandle::dense(Eigen::MatrixXd::Identity(5, 5));
    const auto f = orlx::pca_baseline(A, 4, 1.0);
    EXPECT_NEAR(f.loss_p, 1.0, 1e-9);
}

TEST(PcaBaseline, FrobeniusOptimal) {
    RandomEngine rng({4, 1});
    const auto A = orlx::simulate_lowrank(30, 25, 4, 50, 8.0, rng);
    LowRankOptions opts;
    opts.restarts = 10;
    const auto ours = orlx::lp_lowrank(A, 4, 2.0, opts, SeedSpec{4, 2});
    const auto pca = orlx::pca_baseline(A, 4, 2.0);
    EXPECT_LE(pca.loss_p, ours.loss_p * (1.0 + 1e-9));
}
