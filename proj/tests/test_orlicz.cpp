#include <gtest/gtest.h>

#include <cmath>

#include "orlx/orlicz.hpp"
#include "orlx/random.hpp"

using orlx::OrliczFunction;
using orlx::orlicz_norm;
using orlx::orlicz_norm_gradient;

namespace {

std::vector<OrliczFunction> builtin_families() {
    return {OrliczFunction::power(1.5), OrliczFunction::huber(0.75), OrliczFunction::l1l2(),
            OrliczFunction::fair(1.4), OrliczFunction::l15(0.25)};
}

Eigen::VectorXd random_vector(orlx::RandomEngine& rng, Eigen::Index n, double spread = 1.0) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = spread * rng.gaussian();
    return v;
}

// Orlicz norm for a raw (unnormalized) generator, by direct bisection on the
// defining equation. Independent of the normalized evaluation path.
double raw_orlicz_norm(const std::function<double(double)>& f, const Eigen::VectorXd& x) {
    double hi = x.cwiseAbs().maxCoeff();
    auto level = [&](double a) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) s += f(std::abs(x[i]) / a);
        return s;
    };
    while (level(hi) > 1.0) hi *= 2.0;
    double lo = hi / 2.0;
    while (level(lo) < 1.0) {
        hi = lo;
        lo /= 2.0;
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (level(mid) >= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Family, PowerBasics) {
    const auto g = OrliczFunction::power(2.0);
    EXPECT_DOUBLE_EQ(g(0.5), 0.25);
    EXPECT_DOUBLE_EQ(g.tail_slope(), 2.0);
    EXPECT_DOUBLE_EQ(g.normalizer(), 1.0);
    EXPECT_THROW(OrliczFunction::power(2.5), std::invalid_argument);
    EXPECT_THROW(OrliczFunction::power(0.5), std::invalid_argument);
}

TEST(Family, HuberNormalizer) {
    // independent route: bisect the raw Huber generator to f(x) = 1
    const double delta = 0.75;
    auto raw = [delta](double x) {
        const double a = std::abs(x);
        return a <= delta ? 0.5 * a * a : delta * (a - 0.5 * delta);
    };
    const double q_bisect = orlx::detail::bisect_increasing(raw, 1.0);
    const auto g = OrliczFunction::huber(delta);
    EXPECT_NEAR(g.normalizer(), q_bisect, 1e-10);
    EXPECT_NEAR(g.normalizer(), 1.0 / delta + delta / 2.0, 1e-12);
    EXPECT_NEAR(g.normalizer(), 1.708333333333333, 1e-12);
    EXPECT_NEAR(g(1.0), 1.0, 1e-14);
    EXPECT_NEAR(g(0.0), 0.0, 1e-14);
}

TEST(Family, HuberLargeDeltaIsL2OnUnitInterval) {
    const auto g = OrliczFunction::huber(2.0);
    for (double x : {0.1, 0.3, 0.7, 1.0}) EXPECT_NEAR(g(x), x * x, 1e-13);
}

TEST(Family, L15RawContinuityAtKink) {
    // delta^{1.5}/1.5 = sqrt(delta) (delta - delta/3) is an identity of the
    // piecewise generator; the normalized function must be continuous there.
    const double delta = 0.25;
    EXPECT_NEAR(std::pow(delta, 1.5) / 1.5, std::sqrt(delta) * (delta - delta / 3.0), 1e-15);
    const auto g = OrliczFunction::l15(delta);
    const double xk = delta / g.normalizer();
    EXPECT_NEAR(g(xk - 1e-12), g(xk + 1e-12), 1e-9);
}

TEST(Family, ParamValidation) {
    EXPECT_THROW(OrliczFunction::huber(0.0), std::invalid_argument);
    EXPECT_THROW(OrliczFunction::huber(-1.0), std::invalid_argument);
    EXPECT_THROW(OrliczFunction::fair(0.0), std::invalid_argument);
    EXPECT_THROW(OrliczFunction::l15(-0.25), std::invalid_argument);
}

TEST(Family, InvariantsOnGrid) {
    for (const auto& g : builtin_families()) {
        SCOPED_TRACE(g.name());
        EXPECT_NEAR(g(0.0), 0.0, 1e-12);
        EXPECT_NEAR(g(1.0), 1.0, 1e-12);
        // inverse round trip on (0, 10]
        for (int i = 1; i <= 100; ++i) {
            const double x = 0.1 * i;
            EXPECT_NEAR(g.inverse(g(x)), x, 1e-10 * std::max(1.0, x));
        }
        // monotone + the Lemma-style ratio bounds
        double prev = 0.0;
        for (int i = 1; i <= 200; ++i) {
            const double x = 0.05 * i;
            const double v = g(x);
            EXPECT_GE(v, prev - 1e-12);
            prev = v;
        }
        const double cg = g.growth_constant();
        for (int i = 1; i <= 100; ++i) {
            const double x = 0.01 * i;
            EXPECT_LE(g(x), x + 1e-12);
            EXPECT_GE(g(x), x * x / (cg * 1.01) - 1e-12);
        }
        for (int i = 1; i < 100; ++i) {
            const double x = 0.1 * i, y = 0.1 * (i + 1);
            EXPECT_LE(y / x, g(y) / g(x) + 1e-9);
        }
        // linear tail past 1 (pure powers keep x^p there instead)
        if (g.kind() != orlx::GKind::power) {
            const double s = g.tail_slope();
            for (double x : {1.5, 2.0, 5.0, 9.0}) EXPECT_NEAR(g(x), s * x + 1.0 - s, 1e-9 * g(x));
        }
    }
}

TEST(Norm, LpSpecialCases) {
    Eigen::VectorXd x(2);
    x << 3, 4;
    EXPECT_NEAR(orlicz_norm(OrliczFunction::power(2.0), x), 5.0, 1e-10);
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    EXPECT_NEAR(orlicz_norm(OrliczFunction::power(1.0), y), 6.0, 1e-10);
}

TEST(Norm, SingleNonzeroPinsAlpha) {
    for (const auto& g : builtin_families()) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(7);
        x[5] = -3.25;
        EXPECT_DOUBLE_EQ(orlicz_norm(g, x), 3.25) << g.name();
    }
}

TEST(Norm, ZeroAndNonFinite) {
    const auto g = OrliczFunction::huber(0.75);
    EXPECT_EQ(orlicz_norm(g, Eigen::VectorXd::Zero(4)), 0.0);
    Eigen::VectorXd bad(2);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(orlicz_norm(g, bad), std::invalid_argument);
}

TEST(Norm, AxiomsAndDefiningEquation) {
    orlx::RandomEngine rng({42, 1});
    for (const auto& g : builtin_families()) {
        SCOPED_TRACE(g.name());
        const double cg = g.growth_constant() * 1.01;
        for (int rep = 0; rep < 1000; ++rep) {
            const Eigen::Index n = 2 + (rng.next_u64() % 30);
            const Eigen::VectorXd x = random_vector(rng, n, 3.0);
            const Eigen::VectorXd y = random_vector(rng, n, 3.0);
            const double nx = orlicz_norm(g, x), ny = orlicz_norm(g, y);
            const double c = rng.uniform(-4.0, 4.0);
            if (std::abs(c) > 1e-6 && nx > 0)
                EXPECT_NEAR(orlicz_norm(g, Eigen::VectorXd(c * x)), std::abs(c) * nx,
                            1e-9 * std::abs(c) * nx);
            EXPECT_LE(orlicz_norm(g, Eigen::VectorXd(x + y)), nx + ny + 1e-9 * (nx + ny));
            // sandwich: ||x||_2 / sqrt(C_G) <= ||x||_G <= ||x||_1
            EXPECT_LE(x.norm() / std::sqrt(cg), nx * (1 + 1e-9));
            EXPECT_LE(nx, x.lpNorm<1>() * (1 + 1e-9));
            // defining-equation residual at the returned level
            if (nx > 0) {
                double s = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) s += g(std::abs(x[i]) / nx);
                EXPECT_NEAR(s, 1.0, 1e-9);
            }
        }
    }
}

TEST(Norm, RawVsNormalizedConsistency) {
    // the normalization preserves the induced norm up to the factor f^{-1}(1)
    const double delta = 0.75;
    auto raw = [delta](double x) {
        const double a = std::abs(x);
        return a <= delta ? 0.5 * a * a : delta * (a - 0.5 * delta);
    };
    const auto g = OrliczFunction::huber(delta);
    orlx::RandomEngine rng({7, 0});
    for (int rep = 0; rep < 100; ++rep) {
        const Eigen::VectorXd x = random_vector(rng, 2 + (rng.next_u64() % 20), 2.0);
        if (x.lpNorm<1>() == 0) continue;
        EXPECT_NEAR(raw_orlicz_norm(raw, x), orlicz_norm(g, x) / g.normalizer(),
                    1e-9 * raw_orlicz_norm(raw, x));
    }
}

TEST(Gradient, L2Case) {
    Eigen::VectorXd r(2);
    r << 3, 4;
    const Eigen::VectorXd grad = orlicz_norm_gradient(OrliczFunction::power(2.0), r);
    EXPECT_NEAR(grad[0], 0.6, 1e-10);
    EXPECT_NEAR(grad[1], 0.8, 1e-10);
}

TEST(Gradient, MatchesFiniteDifferences) {
    orlx::RandomEngine rng({99, 3});
    for (const auto& g : builtin_families()) {
        SCOPED_TRACE(g.name());
        for (int rep = 0; rep < 100; ++rep) {
            const Eigen::Index n = 4 + (rng.next_u64() % 12);
            Eigen::VectorXd r = random_vector(rng, n, 2.0);
            if (r.cwiseAbs().minCoeff() < 1e-3) continue;  // keep away from the origin kinks
            const Eigen::VectorXd grad = orlicz_norm_gradient(g, r);
            const double h = 1e-6 * r.cwiseAbs().maxCoeff();
            for (Eigen::Index i = 0; i < n; ++i) {
                Eigen::VectorXd rp = r, rm = r;
                rp[i] += h;
                rm[i] -= h;
                const double fd = (orlicz_norm(g, rp) - orlicz_norm(g, rm)) / (2 * h);
                EXPECT_NEAR(grad[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST(Gradient, ZeroHomogeneous) {
    orlx::RandomEngine rng({5, 5});
    for (const auto& g : builtin_families()) {
        const Eigen::VectorXd r = random_vector(rng, 9, 1.5);
        const Eigen::VectorXd g1 = orlicz_norm_gradient(g, r);
        const Eigen::VectorXd g2 = orlicz_norm_gradient(g, Eigen::VectorXd(2.0 * r));
        for (Eigen::Index i = 0; i < r.size(); ++i) EXPECT_DOUBLE_EQ(g1[i], g2[i]) << g.name();
    }
}

TEST(Gradient, RejectsOrigin) {
    EXPECT_THROW(orlicz_norm_gradient(OrliczFunction::huber(0.75), Eigen::VectorXd::Zero(3)),
                 std::invalid_argument);
}

TEST(PropertyReport, PowerFamilies) {
    const auto rep2 = orlx::verify_property_P(OrliczFunction::power(2.0));
    EXPECT_TRUE(rep2.monotone);
    EXPECT_TRUE(rep2.midpoint_convex);
    EXPECT_TRUE(rep2.normalized);
    EXPECT_NEAR(rep2.c_g, 1.0, 1e-9);
    EXPECT_TRUE(rep2.passed(/*exempt_tail=*/true));

    const auto rep1 = orlx::verify_property_P(OrliczFunction::power(1.0));
    EXPECT_NEAR(rep1.alpha_g, 1.0, 1e-9);
    EXPECT_TRUE(rep1.linear_tail);  // slope 1: x^1 is its own linear tail
}

TEST(PropertyReport, HuberBaselines) {
    const auto g = OrliczFunction::huber(0.75);
    const auto rep = orlx::verify_property_P(g, 300);
    EXPECT_TRUE(rep.passed());
    EXPECT_TRUE(std::isfinite(rep.c_g));
    EXPECT_TRUE(std::isfinite(rep.alpha_g));
    // frozen grid baselines: C_G = 1 (G dominates x^2 on [0,1]) and the
    // Lemma-6 ratio peaks at the quadratic curvature q^2/2
    EXPECT_NEAR(rep.c_g, 1.0, 1e-6);
    const double q = g.normalizer();
    EXPECT_NEAR(rep.alpha_g, 0.5 * q * q, 0.02);
}

TEST(PropertyReport, CustomGenerator) {
    const auto g = OrliczFunction::custom([](double x) { return std::abs(x) * std::abs(x); }, "sq");
    EXPECT_NEAR(g.normalizer(), 1.0, 1e-10);
    EXPECT_NEAR(g(0.5), 0.25, 1e-9);
    EXPECT_NEAR(g.inverse(0.25), 0.5, 1e-9);
    EXPECT_NEAR(g.tail_slope(), 2.0, 1e-4);
    const auto rep = orlx::verify_property_P(g);
    EXPECT_TRUE(rep.monotone);
    EXPECT_TRUE(rep.normalized);
}

TEST(PropertyReport, GridSizeValidation) {
    EXPECT_THROW(orlx::verify_property_P(OrliczFunction::l1l2(), 50), std::invalid_argument);
}
