#pragma once

// Embedding operators.
//
// ComposedSketch is the operator Pi_2 Pi_1 D^{-1}:
//   D^{-1}  - diagonal of reciprocals of draws with CDF 1 - exp(-G(t)),
//   Pi_1    - CountSketch (one signed nonzero per input coordinate),
//   Pi_2    - dense i.i.d. Gaussian scaled by 1/sqrt(t2).
// The Pi_1 D^{-1} stage touches each stored nonzero exactly once, so applying
// the sketch costs O(nnz(A)) + O(t2 t1 d).
//
// L2ToL1Map is the dense Gaussian map B = (sqrt(pi/2)/t3) Q whose image
// approximates the l2 norm of the input by the l1 norm of the output.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "orlx/matrix.hpp"
#include "orlx/orlicz.hpp"
#include "orlx/random.hpp"

namespace orlx {

struct SketchOptions {
    double c1 = 10.0;           // t1 = min(n, ceil(c1 d^2))
    double c2 = 20.0;           // t2 = min(t1, ceil(c2 d))
    bool diagonal_only = false; // apply only D^{-1} (skip Pi_2 Pi_1)
};

class ComposedSketch {
public:
    /// Sketch for an n x d input. Draw order: diagonal (the
    /// sample_generalized_exponential stream), then hash/sign pairs, then the
    /// Gaussian stage row by row.
    static ComposedSketch build(const OrliczFunction& G, Eigen::Index n, Eigen::Index d,
                                const SketchOptions& opts, RandomEngine& rng) {
        if (n < d) throw std::invalid_argument("ComposedSketch::build: n < d");
        if (d < 1) throw std::invalid_argument("ComposedSketch::build: d < 1");
        const auto t1 = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(std::ceil(opts.c1 * double(d) * double(d))));
        const auto t2 = std::min<Eigen::Index>(t1, static_cast<Eigen::Index>(std::ceil(opts.c2 * double(d))));
        return build_dims(G, n, t1, t2, rng, opts.diagonal_only);
    }

    /// Sketch with explicit stage dimensions t1 >= t2.
    static ComposedSketch build_dims(const OrliczFunction& G, Eigen::Index n, Eigen::Index t1,
                                     Eigen::Index t2, RandomEngine& rng, bool diagonal_only = false) {
        if (t1 < t2 || t2 < 1) throw std::invalid_argument("ComposedSketch::build_dims: need t1 >= t2 >= 1");
        ComposedSketch s;
        s.n_ = n;
        s.t1_ = t1;
        s.t2_ = t2;
        s.diagonal_only_ = diagonal_only;
        s.pi1_identity_ = (t1 >= n);

        // Entries below G^{-1}(1e-300) would overflow the reciprocal.
        const double u_floor = G.inverse(1e-300);
        Eigen::VectorXd u = sample_generalized_exponential(G, rng, n);
        s.diag_inv_.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) s.diag_inv_[i] = 1.0 / std::max(u[i], u_floor);

        if (!diagonal_only) {
            if (!s.pi1_identity_) {
                s.hash_.resize(n);
                s.sign_.resize(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    s.hash_[i] = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(t1));
                    s.sign_[i] = (rng.next_u64() & 1u) ? 1.0 : -1.0;
                }
            }
            const double scale = 1.0 / std::sqrt(double(t2));
            s.gauss_.resize(t2, t1);
            for (Eigen::Index i = 0; i < t2; ++i)
                for (Eigen::Index j = 0; j < t1; ++j) s.gauss_(i, j) = scale * rng.gaussian();
        }
        return s;
    }

    Eigen::Index input_rows() const { return n_; }
    Eigen::Index t1() const { return t1_; }
    Eigen::Index t2() const { return t2_; }
    bool diagonal_only() const { return diagonal_only_; }
    bool pi1_identity() const { return pi1_identity_; }
    /// Sketched row count of apply()'s output.
    Eigen::Index output_rows() const { return diagonal_only_ ? n_ : t2_; }
    const Eigen::VectorXd& diag_inv() const { return diag_inv_; }
    const Eigen::MatrixXd& gauss() const { return gauss_; }

    /// Pi_1 D^{-1} A (or D^{-1} A in diagonal-only mode): one multiply and one
    /// signed accumulate per stored nonzero.
    Eigen::MatrixXd apply_first_stage(const MatrixHandle& A) const {
        if (A.rows() != n_) throw std::invalid_argument("ComposedSketch::apply: row mismatch");
        const Eigen::Index out_rows = (diagonal_only_ || pi1_identity_) ? n_ : t1_;
        Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(out_rows, A.cols());
        const bool direct = diagonal_only_ || pi1_identity_;
        if (A.is_dense()) {
            const auto& M = A.dense_data();
            for (Eigen::Index j = 0; j < M.cols(); ++j)
                for (Eigen::Index i = 0; i < M.rows(); ++i) {
                    const double v = M(i, j) * diag_inv_[i];
                    if (direct)
                        Y(i, j) = v;
                    else
                        Y(hash_[i], j) += sign_[i] * v;
                }
        } else {
            for (const auto& t : A.triplets()) {
                const double v = t.value * diag_inv_[t.row];
                if (direct)
                    Y(t.row, t.col) = v;
                else
                    Y(hash_[t.row], t.col) += sign_[t.row] * v;
            }
        }
        return Y;
    }

    /// Pi_2 Pi_1 D^{-1} A, a dense t2 x d matrix (n x d in diagonal-only mode).
    Eigen::MatrixXd apply(const MatrixHandle& A) const {
        Eigen::MatrixXd Y = apply_first_stage(A);
        if (diagonal_only_) return Y;
        return gauss_ * Y;
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& b) const {
        if (b.size() != n_) throw std::invalid_argument("ComposedSketch::apply: size mismatch");
        Eigen::VectorXd y;
        if (diagonal_only_ || pi1_identity_) {
            y = diag_inv_.cwiseProduct(b);
        } else {
            y = Eigen::VectorXd::Zero(t1_);
            for (Eigen::Index i = 0; i < n_; ++i) y[hash_[i]] += sign_[i] * diag_inv_[i] * b[i];
        }
        if (diagonal_only_) return y;
        return gauss_ * y;
    }

    /// Explicit t2 x n (or n x n diagonal-only) operator; for tests and for
    /// transposed use in the low-rank composites.
    Eigen::MatrixXd dense_operator() const {
        if (diagonal_only_) return Eigen::MatrixXd(diag_inv_.asDiagonal());
        Eigen::MatrixXd P1D = Eigen::MatrixXd::Zero(t1_, n_);
        for (Eigen::Index i = 0; i < n_; ++i) {
            if (pi1_identity_)
                P1D(i, i) = diag_inv_[i];
            else
                P1D(hash_[i], i) = sign_[i] * diag_inv_[i];
        }
        return gauss_ * P1D;
    }

private:
    Eigen::Index n_ = 0, t1_ = 0, t2_ = 0;
    bool diagonal_only_ = false, pi1_identity_ = false;
    Eigen::VectorXd diag_inv_;
    std::vector<Eigen::Index> hash_;
    std::vector<double> sign_;
    Eigen::MatrixXd gauss_;
};

/// Dense Gaussian l2 -> l1 map, B = (sqrt(pi/2)/t3) Q with Q i.i.d. N(0,1).
class L2ToL1Map {
public:
    static L2ToL1Map build(Eigen::Index t2, double c3, RandomEngine& rng) {
        if (t2 < 1) throw std::invalid_argument("L2ToL1Map::build: t2 >= 1 required");
        L2ToL1Map m;
        m.t2_ = t2;
        m.t3_ = static_cast<Eigen::Index>(std::ceil(c3 * double(t2) * std::log2(double(t2) + 1.0)));
        const double scale = std::sqrt(M_PI / 2.0) / double(m.t3_);
        m.b_.resize(m.t3_, t2);
        for (Eigen::Index i = 0; i < m.t3_; ++i)
            for (Eigen::Index j = 0; j < t2; ++j) m.b_(i, j) = scale * rng.gaussian();
        return m;
    }

    Eigen::Index source_dim() const { return t2_; }
    Eigen::Index target_dim() const { return t3_; }
    const Eigen::MatrixXd& matrix() const { return b_; }

    template <class Derived>
    Eigen::Matrix<double, Eigen::Dynamic, Derived::ColsAtCompileTime> apply(
        const Eigen::MatrixBase<Derived>& x) const {
        return b_ * x;
    }

private:
    Eigen::Index t2_ = 0, t3_ = 0;
    Eigen::MatrixXd b_;
};

}  // namespace orlx
