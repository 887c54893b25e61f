#pragma once

// Entrywise-l_p low-rank approximation.
//
// lp_lowrank sketches the row and column spaces (exponential-embedding
// composites and p-stable maps), solves the small rank-constrained Frobenius
// problem in closed form, and lifts the factors back. Two operator layouts are
// available: the `theoretical` one (exponential composites on the left,
// p-stable on the right) and the `experimental` one (dense p-stable on the
// left, exponential composites on the right, with the literal 4k / 32k stage
// sizes). pca_baseline is the truncated-SVD reference.

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "orlx/matrix.hpp"
#include "orlx/orlicz.hpp"
#include "orlx/random.hpp"
#include "orlx/sketch.hpp"

namespace orlx {

/// Entrywise l_p norm (sum |a_ij|^p)^{1/p}, p in [1,2]; implicit zeros of a
/// sparse handle contribute nothing.
inline double entrywise_lp(const Eigen::Ref<const Eigen::MatrixXd>& A, double p) {
    if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("entrywise_lp: require 1 <= p <= 2");
    double s = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const double a = std::abs(A(i, j));
            s += (p == 1.0) ? a : (p == 2.0 ? a * a : std::pow(a, p));
        }
    return (p == 1.0) ? s : (p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p));
}

inline double entrywise_lp(const MatrixHandle& A, double p) {
    if (A.is_dense()) return entrywise_lp(A.dense_data(), p);
    if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("entrywise_lp: require 1 <= p <= 2");
    double s = 0.0;
    for (const auto& t : A.triplets()) {
        const double a = std::abs(t.value);
        s += (p == 1.0) ? a : (p == 2.0 ? a * a : std::pow(a, p));
    }
    return (p == 1.0) ? s : (p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p));
}

struct LowRankFactors {
    Eigen::MatrixXd U;  // n x k
    Eigen::MatrixXd V;  // k x d
    Eigen::Index k = 0;
    double loss_p = 0.0;  // ||U V - A||_p^p
};

namespace detail {

// Orthonormal column basis with 1e-12 * sigma_max rank cut.
inline Eigen::MatrixXd column_basis(const Eigen::Ref<const Eigen::MatrixXd>& M,
                                    Eigen::MatrixXd* pinv_factor = nullptr) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() ? 1e-12 * sv[0] : 0.0;
    Eigen::Index r = 0;
    while (r < sv.size() && sv[r] > cutoff && sv[r] > 0.0) ++r;
    if (pinv_factor) {
        // V_r diag(1/sigma_r): maps the basis coordinates back through M^+.
        *pinv_factor = svd.matrixV().leftCols(r) *
                       sv.head(r).cwiseInverse().asDiagonal();
    }
    return svd.matrixU().leftCols(r);
}

}  // namespace detail

/// argmin over rank-k Z = X Y of ||C Z Dm - M||_F, solved in closed form:
/// project M onto the column space of C and the row space of Dm, truncate the
/// projected matrix to rank k, and pull the factors back through the
/// pseudoinverses. Returns X (cols(C) x k) and Y (k x rows(Dm)).
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> rank_constrained_ls(
    const Eigen::Ref<const Eigen::MatrixXd>& C, const Eigen::Ref<const Eigen::MatrixXd>& Dm,
    const Eigen::Ref<const Eigen::MatrixXd>& M, Eigen::Index k) {
    if (k < 1 || k > std::min(C.cols(), Dm.rows()))
        throw std::invalid_argument("rank_constrained_ls: k out of range");
    if (C.rows() != M.rows() || Dm.cols() != M.cols())
        throw std::invalid_argument("rank_constrained_ls: dimension mismatch");

    Eigen::MatrixXd c_back;  // cols(C) x rc, equals C^+ Q_c
    const Eigen::MatrixXd Qc = detail::column_basis(C, &c_back);
    Eigen::MatrixXd d_back;  // cols(Dm^T) x rd
    const Eigen::MatrixXd Qd = detail::column_basis(Dm.transpose(), &d_back);
    // P is the projected target in the bases; its best rank-k truncation is
    // the optimal middle factor.
    const Eigen::MatrixXd P = Qc.transpose() * M * Qd;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index kk = std::min<Eigen::Index>(k, svd.singularValues().size());
    const Eigen::VectorXd sq = svd.singularValues().head(kk).cwiseMax(0.0).cwiseSqrt();

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(C.cols(), k);
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(k, Dm.rows());
    X.leftCols(kk) = c_back * (svd.matrixU().leftCols(kk) * sq.asDiagonal());
    Y.topRows(kk) = (sq.asDiagonal() * svd.matrixV().leftCols(kk).transpose()) * d_back.transpose();
    return {std::move(X), std::move(Y)};
}

enum class LowRankVariant { theoretical, experimental };

struct LowRankOptions {
    LowRankVariant variant = LowRankVariant::experimental;
    int restarts = 1;
    double c1 = 10.0, c2 = 20.0, c3 = 8.0;  // theoretical stage multipliers
};

namespace detail {

// d x t map equal to (Gaussian . D^{-1})^T with D from CDF 1 - exp(-t^p):
// scale the coordinates by the reciprocal exponential diagonal, then mix with
// a dense Gaussian stage scaled 1/sqrt(t).
inline Eigen::MatrixXd exponential_composite_transposed(const OrliczFunction& Gp, Eigen::Index d,
                                                        Eigen::Index t, RandomEngine& rng) {
    const double u_floor = Gp.inverse(1e-300);
    Eigen::VectorXd u = sample_generalized_exponential(Gp, rng, d);
    Eigen::VectorXd dinv(d);
    for (Eigen::Index i = 0; i < d; ++i) dinv[i] = 1.0 / std::max(u[i], u_floor);
    Eigen::MatrixXd W(d, t);
    const double scale = 1.0 / std::sqrt(double(t));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < t; ++j) W(i, j) = scale * rng.gaussian();
    return dinv.asDiagonal() * W;
}

inline Eigen::MatrixXd p_stable_matrix(double p, Eigen::Index rows, Eigen::Index cols,
                                       RandomEngine& rng) {
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = rng.p_stable(p);
    return M;
}

struct LowRankSolve {
    Eigen::MatrixXd U, V;
    double loss_pow;  // ||UV - A||_p^p
};

inline double loss_power(const Eigen::Ref<const Eigen::MatrixXd>& U,
                         const Eigen::Ref<const Eigen::MatrixXd>& V,
                         const Eigen::Ref<const Eigen::MatrixXd>& Adense, double p) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < Adense.cols(); ++j)
        for (Eigen::Index i = 0; i < Adense.rows(); ++i) {
            const double e = std::abs(U.row(i).dot(V.col(j)) - Adense(i, j));
            s += (p == 1.0) ? e : (p == 2.0 ? e * e : std::pow(e, p));
        }
    return s;
}

inline LowRankSolve lp_lowrank_once(const MatrixHandle& A, const Eigen::MatrixXd& Adense,
                                    Eigen::Index k, double p, const LowRankOptions& opts,
                                    RandomEngine& rng) {
    const Eigen::Index n = A.rows(), d = A.cols();
    const auto Gp = OrliczFunction::power(p);
    Eigen::MatrixXd SA, T1A, R, T2;

    if (opts.variant == LowRankVariant::theoretical) {
        const auto t1 = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(std::ceil(opts.c1 * double(k) * double(k))));
        const auto t2 = std::min<Eigen::Index>(t1, static_cast<Eigen::Index>(std::ceil(opts.c2 * double(k))));
        const auto t3 = static_cast<Eigen::Index>(8.0 * double(k) * std::ceil(std::log2(double(k) + 1.0)));
        const auto S = ComposedSketch::build_dims(Gp, n, t1, t2, rng);
        const auto T1 = ComposedSketch::build_dims(Gp, n, t1, t2, rng);
        R = p_stable_matrix(p, d, t3, rng);
        T2 = p_stable_matrix(p, d, t3, rng);
        SA = S.apply(A);
        T1A = T1.apply(A);
    } else {
        const Eigen::Index t1 = 4 * k, t2 = 8 * t1;
        const Eigen::MatrixXd S = p_stable_matrix(p, t1, n, rng);
        const Eigen::MatrixXd T1 = p_stable_matrix(p, t2, n, rng);
        R = exponential_composite_transposed(Gp, d, t1, rng);
        T2 = exponential_composite_transposed(Gp, d, t2, rng);
        SA = S * Adense;
        T1A = T1 * Adense;
    }

    // Only the small products are formed: T1A R, SA T2, T1A T2.
    const Eigen::MatrixXd C = T1A * R;
    const Eigen::MatrixXd Dm = SA * T2;
    const Eigen::MatrixXd M = T1A * T2;
    auto [X, Y] = rank_constrained_ls(C, Dm, M, k);

    LowRankSolve sol;
    sol.U = A.multiply(Eigen::MatrixXd(R * X));  // n x k, nnz(A) * k work
    sol.V = Y * SA;                              // k x d
    sol.loss_pow = loss_power(sol.U, sol.V, Adense, p);
    return sol;
}

}  // namespace detail

/// Algorithm: sketch, solve the rank-constrained Frobenius subproblem, lift.
/// Restart r uses substream seed.child(r); the best (smallest loss) factors
/// win, so best-of-m is nonincreasing in m for nested seed sets.
inline LowRankFactors lp_lowrank(const MatrixHandle& A, Eigen::Index k, double p,
                                 const LowRankOptions& opts, SeedSpec seed) {
    const Eigen::Index n = A.rows(), d = A.cols();
    if (k < 1 || k > std::min(n, d)) throw std::invalid_argument("lp_lowrank: k out of range");
    if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("lp_lowrank: require 1 <= p <= 2");
    const Eigen::MatrixXd Adense = A.to_dense();

    LowRankFactors best;
    best.k = k;
    bool have = false;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        RandomEngine eng(seed.child(r));
        auto sol = detail::lp_lowrank_once(A, Adense, k, p, opts, eng);
        if (!have || sol.loss_pow < best.loss_p) {
            best.U = std::move(sol.U);
            best.V = std::move(sol.V);
            best.loss_p = sol.loss_pow;
            have = true;
        }
    }
    return best;
}

/// Rank-k truncated SVD baseline; loss evaluated entrywise for the requested p.
inline LowRankFactors pca_baseline(const MatrixHandle& A, Eigen::Index k, double p = 2.0) {
    const Eigen::Index n = A.rows(), d = A.cols();
    if (k < 1 || k > std::min(n, d)) throw std::invalid_argument("pca_baseline: k out of range");
    const Eigen::MatrixXd Adense = A.to_dense();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Adense, Eigen::ComputeThinU | Eigen::ComputeThinV);
    LowRankFactors f;
    f.k = k;
    f.U = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal();
    f.V = svd.matrixV().leftCols(k).transpose();
    f.loss_p = detail::loss_power(f.U, f.V, Adense, p);
    return f;
}

}  // namespace orlx
