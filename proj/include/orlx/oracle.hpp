#pragma once

// Gradient-descent oracle for min_x ||A x - b||_G and the approximation-ratio
// measurement against it. The oracle is deliberately plain: fixed learning
// rate, step halving on any increase (so the loss sequence is monotone
// nonincreasing), stop when a step improves the loss by less than `stop`.

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "orlx/matrix.hpp"
#include "orlx/orlicz.hpp"
#include "orlx/regression.hpp"

namespace orlx {

struct OracleOptions {
    double lr = 0.001;
    double stop = 1e-7;
    long max_iter = 100000;
};

struct OracleResult {
    Eigen::VectorXd x;
    double loss = 0.0;
    long iterations = 0;
    bool converged = false;
};

inline OracleResult oracle_solve(const OrliczFunction& G, const MatrixHandle& A,
                                 const Eigen::Ref<const Eigen::VectorXd>& b,
                                 const OracleOptions& opts = {}) {
    const Eigen::Index n = A.rows(), d = A.cols();
    if (n * d > 10'000'000) throw std::invalid_argument("oracle_solve: instance too large to densify");
    if (b.size() != n) throw std::invalid_argument("oracle_solve: b length mismatch");
    const Eigen::MatrixXd Ad = A.to_dense();

    OracleResult res;
    res.x = least_squares(Ad, b);
    Eigen::VectorXd r = Ad * res.x - b;
    double alpha = 0.0;  // warm-start bracket for the norm bisection
    res.loss = orlicz_norm(G, r);
    alpha = res.loss;
    const double zero_floor = 1e-14 * std::max(1.0, orlicz_norm(G, b));
    if (res.loss <= zero_floor) {
        res.converged = true;
        return res;
    }

    for (long it = 0; it < opts.max_iter; ++it) {
        res.iterations = it + 1;
        double a = alpha;
        const Eigen::VectorXd g = Ad.transpose() * orlicz_norm_gradient(G, r, &a);
        double step = opts.lr;
        bool accepted = false;
        for (int h = 0; h <= 30; ++h) {
            const Eigen::VectorXd x_try = res.x - step * g;
            const Eigen::VectorXd r_try = Ad * x_try - b;
            const double loss_try = orlicz_norm(G, r_try, alpha);
            if (loss_try < res.loss) {
                const double improvement = res.loss - loss_try;
                res.x = x_try;
                r = r_try;
                res.loss = loss_try;
                alpha = loss_try;
                accepted = true;
                if (improvement < opts.stop) {
                    res.converged = true;
                    return res;
                }
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {  // no step of any size improves: treat as converged
            res.converged = true;
            return res;
        }
        if (res.loss <= zero_floor) {
            res.converged = true;
            return res;
        }
    }
    res.converged = false;  // hit max_iter; final loss still returned
    return res;
}

/// ||A x_hat - b||_G / ||A x_opt - b||_G. Ratios marginally below 1 (within
/// the oracle's own tolerance) are clamped to 1; the clamped amount is
/// reported through `clamp_delta`. A zero oracle loss with a nonzero
/// candidate loss yields +infinity.
inline double approximation_ratio(const OrliczFunction& G, const MatrixHandle& A,
                                  const Eigen::Ref<const Eigen::VectorXd>& b,
                                  const Eigen::Ref<const Eigen::VectorXd>& x_hat,
                                  const OracleResult& oracle, double* clamp_delta = nullptr) {
    if (clamp_delta) *clamp_delta = 0.0;
    const double cand = orlicz_norm(G, A.multiply(x_hat) - b);
    const double zero_floor = 1e-12 * std::max(1.0, orlicz_norm(G, b));
    if (oracle.loss <= zero_floor)
        return cand > zero_floor ? std::numeric_limits<double>::infinity() : 1.0;
    const double ratio = cand / oracle.loss;
    if (ratio < 1.0 && ratio >= 1.0 - 1e-3) {
        if (clamp_delta) *clamp_delta = 1.0 - ratio;
        return 1.0;
    }
    return ratio;
}

}  // namespace orlx
