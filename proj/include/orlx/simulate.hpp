#pragma once

// Synthetic data generation for the experiment drivers.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "orlx/matrix.hpp"
#include "orlx/random.hpp"

namespace orlx {

struct NoiseSpec {
    enum class Kind { gaussian, sparse, mixed };
    Kind kind = Kind::gaussian;
    double sigma = 0.0;     // stddev of the Gaussian component
    double fraction = 0.0;  // fraction of entries hit by sparse noise
    double scale = 0.0;     // sparse noise ~ U(-scale ||Ax*||_2, scale ||Ax*||_2)

    static NoiseSpec gaussian(double sigma) {
        NoiseSpec s;
        s.kind = Kind::gaussian;
        s.sigma = sigma;
        return s;
    }
    static NoiseSpec sparse(double fraction, double scale) {
        NoiseSpec s;
        s.kind = Kind::sparse;
        s.fraction = fraction;
        s.scale = scale;
        return s;
    }
    static NoiseSpec mixed(double sigma, double fraction, double scale) {
        NoiseSpec s;
        s.kind = Kind::mixed;
        s.sigma = sigma;
        s.fraction = fraction;
        s.scale = scale;
        return s;
    }
    void validate() const {
        if (fraction < 0.0 || fraction > 1.0) throw std::invalid_argument("NoiseSpec: fraction in [0,1]");
        if (sigma < 0.0 || scale < 0.0) throw std::invalid_argument("NoiseSpec: sigma, scale >= 0");
    }
};

struct RegressionInstance {
    MatrixHandle A;
    Eigen::VectorXd b;
    Eigen::VectorXd x_star;
};

namespace detail {

/// `count` distinct indices in [0, n) by partial Fisher-Yates.
inline std::vector<Eigen::Index> distinct_indices(Eigen::Index n, Eigen::Index count,
                                                  RandomEngine& rng) {
    std::vector<Eigen::Index> pool(n);
    for (Eigen::Index i = 0; i < n; ++i) pool[i] = i;
    for (Eigen::Index i = 0; i < count; ++i) {
        const Eigen::Index j = i + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

}  // namespace detail

/// Regression instance: the first d+5 rows of A and all of x* are i.i.d.
/// standard Gaussian; every later row copies a uniformly chosen one of the
/// first d+5. b = A x* plus the requested noise (Gaussian on every entry,
/// sparse on ceil(fraction n) distinct entries, or both).
inline RegressionInstance simulate_regression(Eigen::Index n, Eigen::Index d, const NoiseSpec& noise,
                                              RandomEngine& rng) {
    if (n < d + 6) throw std::invalid_argument("simulate_regression: n >= d+6 required");
    noise.validate();
    const Eigen::Index base = d + 5;
    Eigen::MatrixXd A(n, d);
    for (Eigen::Index i = 0; i < base; ++i)
        for (Eigen::Index j = 0; j < d; ++j) A(i, j) = rng.gaussian();
    Eigen::VectorXd x_star(d);
    for (Eigen::Index j = 0; j < d; ++j) x_star[j] = rng.gaussian();
    for (Eigen::Index i = base; i < n; ++i) {
        const Eigen::Index p = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(base));
        A.row(i) = A.row(p);
    }
    Eigen::VectorXd b = A * x_star;
    const double signal = b.norm();
    if (noise.kind == NoiseSpec::Kind::gaussian || noise.kind == NoiseSpec::Kind::mixed)
        for (Eigen::Index i = 0; i < n; ++i) b[i] += noise.sigma * rng.gaussian();
    if (noise.kind == NoiseSpec::Kind::sparse || noise.kind == NoiseSpec::Kind::mixed) {
        const auto count = static_cast<Eigen::Index>(std::ceil(noise.fraction * double(n)));
        for (Eigen::Index idx : detail::distinct_indices(n, count, rng))
            b[idx] += rng.uniform(-noise.scale * signal, noise.scale * signal);
    }
    return {MatrixHandle::dense(std::move(A)), std::move(b), std::move(x_star)};
}

/// Planted low-rank matrix: A = U V with U (n x k), V (k x d) entries
/// U(0,1), plus additive U(-scale, scale) outliers on `outliers` distinct
/// entries. `planted`, when given, receives the clean product.
inline MatrixHandle simulate_lowrank(Eigen::Index n, Eigen::Index d, Eigen::Index k,
                                     Eigen::Index outliers, double outlier_scale, RandomEngine& rng,
                                     Eigen::MatrixXd* planted = nullptr) {
    if (k < 1 || k > std::min(n, d)) throw std::invalid_argument("simulate_lowrank: k out of range");
    if (outliers < 0 || outliers > n * d) throw std::invalid_argument("simulate_lowrank: outliers > n*d");
    Eigen::MatrixXd U(n, k), V(k, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) U(i, j) = rng.uniform01();
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < d; ++j) V(i, j) = rng.uniform01();
    Eigen::MatrixXd A = U * V;
    if (planted) *planted = A;
    for (Eigen::Index flat : detail::distinct_indices(n * d, outliers, rng)) {
        const Eigen::Index i = flat / d, j = flat % d;
        A(i, j) += rng.uniform(-outlier_scale, outlier_scale);
    }
    return MatrixHandle::dense(std::move(A));
}

}  // namespace orlx
