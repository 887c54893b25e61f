#pragma once

// Normalized Orlicz functions and the Orlicz norm.
//
// An OrliczFunction G is normalized so that G(0) = 0, G(1) = 1, G is even,
// convex and nondecreasing on [0, inf), and grows linearly past 1 (except for
// the pure power family, which keeps G(x) = x^p everywhere so that the induced
// norm is exactly the l_p norm and the associated exponential distribution has
// CDF 1 - exp(-t^p)).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace orlx {

enum class GKind { power, huber, l1l2, fair, l15, custom };

namespace detail {

// Root of a monotone increasing function on [0, hi_start] with bracket
// expansion. Used to invert raw M-estimators.
template <class F>
double bisect_increasing(F&& f, double target, double hi_start = 1.0) {
    double lo = 0.0, hi = hi_start;
    int expand = 0;
    while (f(hi) < target) {
        hi *= 2.0;
        if (++expand > 200) throw std::runtime_error("bisect_increasing: bracket expansion failed");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

class OrliczFunction {
public:
    /// l_p generator G(x) = |x|^p, 1 <= p <= 2. Kept as a pure power (no
    /// linear tail) so the norm is exactly l_p and G^{-1}(Exp) has CDF
    /// 1 - exp(-t^p).
    static OrliczFunction power(double p) {
        if (!(p >= 1.0 && p <= 2.0))
            throw std::invalid_argument("OrliczFunction::power: require 1 <= p <= 2, got " + std::to_string(p));
        OrliczFunction g;
        g.kind_ = GKind::power;
        g.param_ = p;
        g.q_ = 1.0;
        g.s_ = p;  // sup of difference quotients on [0,1]
        g.name_ = "power:" + std::to_string(p);
        g.finish();
        return g;
    }

    /// Normalized Huber: f(x) = x^2/2 on |x| <= delta, delta(|x| - delta/2) beyond.
    static OrliczFunction huber(double delta) {
        if (!(delta > 0.0)) throw std::invalid_argument("OrliczFunction::huber: delta must be > 0");
        OrliczFunction g;
        g.kind_ = GKind::huber;
        g.param_ = delta;
        g.q_ = (delta >= std::sqrt(2.0)) ? std::sqrt(2.0) : (1.0 / delta + delta / 2.0);
        g.kink_x_ = delta / g.q_;  // may lie past 1, then [0,1] is purely quadratic
        g.kink_y_ = 0.5 * delta * delta;
        g.s_ = (g.kink_x_ >= 1.0) ? g.q_ * g.q_ : g.q_ * delta;
        g.name_ = "huber:" + std::to_string(delta);
        g.finish();
        return g;
    }

    /// Normalized l1-l2 estimator: f(x) = 2(sqrt(1 + x^2/2) - 1).
    static OrliczFunction l1l2() {
        OrliczFunction g;
        g.kind_ = GKind::l1l2;
        g.q_ = std::sqrt(2.5);  // f(q) = 1
        g.s_ = g.q_ * g.q_ / 1.5;
        g.name_ = "l1l2";
        g.finish();
        return g;
    }

    /// Normalized Fair estimator: f(x) = c^2 (|x|/c - log(1 + |x|/c)).
    static OrliczFunction fair(double c) {
        if (!(c > 0.0)) throw std::invalid_argument("OrliczFunction::fair: c must be > 0");
        OrliczFunction g;
        g.kind_ = GKind::fair;
        g.param_ = c;
        auto f = [c](double t) { return c * c * (t / c - std::log1p(t / c)); };
        g.q_ = detail::bisect_increasing(f, 1.0, std::max(1.0, c));
        g.s_ = g.q_ * (c * g.q_ / (c + g.q_));  // q * f'(q)
        g.name_ = "fair:" + std::to_string(c);
        g.finish();
        return g;
    }

    /// Normalized x^{1.5}-to-linear estimator:
    /// f(x) = x^{1.5}/1.5 on x <= delta, sqrt(delta)(|x| - delta/3) beyond.
    static OrliczFunction l15(double delta) {
        if (!(delta > 0.0)) throw std::invalid_argument("OrliczFunction::l15: delta must be > 0");
        OrliczFunction g;
        g.kind_ = GKind::l15;
        g.param_ = delta;
        const double f_delta = std::pow(delta, 1.5) / 1.5;
        g.q_ = (f_delta >= 1.0) ? std::pow(1.5, 2.0 / 3.0) : (1.0 / std::sqrt(delta) + delta / 3.0);
        g.kink_x_ = delta / g.q_;
        g.kink_y_ = f_delta;
        g.s_ = (g.kink_x_ >= 1.0) ? std::pow(g.q_, 1.5) : g.q_ * std::sqrt(delta);
        g.name_ = "l15:" + std::to_string(delta);
        g.finish();
        return g;
    }

    /// Normalize an arbitrary raw generator f (nonzero, nondecreasing, convex,
    /// f(0) = 0) through f(f^{-1}(1) x) with numeric inversion.
    static OrliczFunction custom(std::function<double(double)> raw, std::string name = "custom") {
        if (!raw) throw std::invalid_argument("OrliczFunction::custom: empty function");
        if (std::abs(raw(0.0)) > 1e-14) throw std::invalid_argument("OrliczFunction::custom: f(0) != 0");
        OrliczFunction g;
        g.kind_ = GKind::custom;
        g.raw_ = std::move(raw);
        g.q_ = detail::bisect_increasing(g.raw_, 1.0);
        const double h = 1e-6;
        g.s_ = (1.0 - g.raw_(g.q_ * (1.0 - h))) / h;
        g.name_ = std::move(name);
        g.finish();
        return g;
    }

    /// G(|x|).
    double operator()(double xin) const {
        const double x = std::abs(xin);
        if (kind_ == GKind::power) return pow_p(x);
        if (x > 1.0) return s_ * x + (1.0 - s_);
        return unit_eval(x);
    }

    /// G^{-1}(y) on [0, inf).
    double inverse(double y) const {
        if (!(y >= 0.0)) throw std::domain_error("OrliczFunction::inverse: y must be >= 0");
        if (y == 0.0) return 0.0;
        if (kind_ == GKind::power) {
            if (param_ == 1.0) return y;
            if (param_ == 2.0) return std::sqrt(y);
            return std::pow(y, 1.0 / param_);
        }
        if (y > 1.0) return (y - (1.0 - s_)) / s_;
        switch (kind_) {
            case GKind::huber:
                if (y <= kink_y_ || kink_x_ >= 1.0) return std::sqrt(2.0 * y) / q_;
                return (y + 0.5 * param_ * param_) / (q_ * param_);
            case GKind::l15:
                if (y <= kink_y_ || kink_x_ >= 1.0) return std::pow(1.5 * y, 2.0 / 3.0) / q_;
                return (y / std::sqrt(param_) + param_ / 3.0) / q_;
            case GKind::l1l2:
                return std::sqrt(2.0 * y + 0.5 * y * y) / q_;
            case GKind::fair: {
                const double c = param_;
                auto f = [c](double t) { return c * c * (t / c - std::log1p(t / c)); };
                return detail::bisect_increasing(f, y, q_) / q_;
            }
            case GKind::custom:
                return detail::bisect_increasing(raw_, y, q_) / q_;
            default:
                break;
        }
        return 0.0;  // unreachable
    }

    /// Right derivative of G at |x| (the subgradient convention at kinks).
    double derivative(double xin) const {
        const double x = std::abs(xin);
        if (kind_ == GKind::power) {
            if (param_ == 1.0) return 1.0;
            if (param_ == 2.0) return 2.0 * x;
            return param_ * std::pow(x, param_ - 1.0);
        }
        if (x >= 1.0) return s_;
        switch (kind_) {
            case GKind::huber:
                return (x < kink_x_) ? q_ * q_ * x : q_ * param_;
            case GKind::l15:
                return (x < kink_x_) ? std::pow(q_, 1.5) * std::sqrt(x) : q_ * std::sqrt(param_);
            case GKind::l1l2: {
                const double t = q_ * x;
                return q_ * t / std::sqrt(1.0 + 0.5 * t * t);
            }
            case GKind::fair: {
                const double t = q_ * x;
                return q_ * (param_ * t / (param_ + t));
            }
            case GKind::custom: {
                const double h = 1e-7 * std::max(1.0, x);
                return ((*this)(x + h) - (*this)(x)) / h;
            }
            default:
                break;
        }
        return 0.0;
    }

    GKind kind() const { return kind_; }
    double param() const { return param_; }
    /// Slope s of the linear segment past 1 (for power: sup difference quotient p).
    double tail_slope() const { return s_; }
    /// f^{-1}(1) of the raw generator used in the normalization.
    double normalizer() const { return q_; }
    /// Grid-estimated subquadratic-growth constant C_G (diagnostic only).
    double growth_constant() const { return cg_; }
    const std::string& name() const { return name_; }

private:
    OrliczFunction() = default;

    double pow_p(double x) const {
        if (param_ == 1.0) return x;
        if (param_ == 2.0) return x * x;
        return std::pow(x, param_);
    }

    // G on [0,1], family-specific closed forms.
    double unit_eval(double x) const {
        switch (kind_) {
            case GKind::power:
                return pow_p(x);
            case GKind::huber:
                return (x <= kink_x_) ? 0.5 * q_ * q_ * x * x : q_ * param_ * x - 0.5 * param_ * param_;
            case GKind::l15: {
                const double t = q_ * x;
                return (x <= kink_x_) ? std::pow(t, 1.5) / 1.5 : std::sqrt(param_) * (t - param_ / 3.0);
            }
            case GKind::l1l2: {
                const double t = q_ * x;
                return 2.0 * (std::sqrt(1.0 + 0.5 * t * t) - 1.0);
            }
            case GKind::fair: {
                const double t = q_ * x;
                return param_ * param_ * (t / param_ - std::log1p(t / param_));
            }
            case GKind::custom:
                return raw_(q_ * x);
        }
        return 0.0;
    }

    void finish() { cg_ = estimate_growth_constant(); }

    double estimate_growth_constant(int grid = 200) const {
        // max over grid pairs x < y of G(y) x^2 / (G(x) y^2); >= 1 by y -> x.
        std::vector<double> xs(grid), gs(grid);
        const double lo = std::log(1e-6), hi = std::log(10.0);
        for (int i = 0; i < grid; ++i) {
            xs[i] = std::exp(lo + (hi - lo) * (i + 1) / grid);
            gs[i] = (*this)(xs[i]);
        }
        double best = 1.0;
        for (int i = 0; i < grid; ++i) {
            if (gs[i] <= 0.0) continue;
            for (int j = i + 1; j < grid; ++j) {
                const double r = (gs[j] / gs[i]) * (xs[i] / xs[j]) * (xs[i] / xs[j]);
                best = std::max(best, r);
            }
        }
        return best;
    }

    GKind kind_ = GKind::custom;
    double param_ = 0.0;
    double q_ = 1.0;   // f^{-1}(1)
    double s_ = 1.0;   // tail slope
    double kink_x_ = std::numeric_limits<double>::infinity();
    double kink_y_ = std::numeric_limits<double>::infinity();
    double cg_ = 1.0;
    std::string name_;
    std::function<double(double)> raw_;
};

/// Parse "family" or "family:param" (e.g. "huber:0.75", "power:1.5", "l1l2").
inline OrliczFunction make_orlicz(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string fam = spec.substr(0, colon);
    const bool has_param = colon != std::string::npos;
    const double param = has_param ? std::stod(spec.substr(colon + 1)) : 0.0;
    if (fam == "power") return OrliczFunction::power(has_param ? param : 2.0);
    if (fam == "l1" || fam == "l_1") return OrliczFunction::power(1.0);
    if (fam == "l2" || fam == "l_2") return OrliczFunction::power(2.0);
    if (fam == "huber") return OrliczFunction::huber(has_param ? param : 0.75);
    if (fam == "l1l2") return OrliczFunction::l1l2();
    if (fam == "fair") return OrliczFunction::fair(has_param ? param : 1.4);
    if (fam == "l15") return OrliczFunction::l15(has_param ? param : 0.25);
    throw std::invalid_argument("make_orlicz: unknown family '" + fam + "'");
}

namespace detail {

inline double norm_level_sum(const OrliczFunction& G, const Eigen::Ref<const Eigen::VectorXd>& x,
                             double alpha) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += G(std::abs(x[i]) / alpha);
    return s;
}

}  // namespace detail

/// ||x||_G = inf{alpha > 0 : sum_i G(|x_i|/alpha) <= 1}. Bisection on
/// [||x||_inf, ||x||_1] to relative tolerance 1e-12 (<= 200 iterations).
/// `warm_hint`, when positive, narrows the initial bracket if still valid.
inline double orlicz_norm(const OrliczFunction& G, const Eigen::Ref<const Eigen::VectorXd>& x,
                          double warm_hint = 0.0) {
    if (!x.allFinite()) throw std::invalid_argument("orlicz_norm: non-finite input");
    double linf = 0.0, l1 = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double a = std::abs(x[i]);
        linf = std::max(linf, a);
        l1 += a;
    }
    if (l1 == 0.0) return 0.0;
    if (linf == l1) return linf;  // single nonzero: G(1) = 1 pins alpha exactly

    double lo = linf, hi = l1;
    if (warm_hint > 0.0) {
        const double wlo = std::max(lo, 0.5 * warm_hint), whi = std::min(hi, 2.0 * warm_hint);
        if (wlo < whi && detail::norm_level_sum(G, x, wlo) >= 1.0 &&
            detail::norm_level_sum(G, x, whi) <= 1.0) {
            lo = wlo;
            hi = whi;
        }
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (detail::norm_level_sum(G, x, mid) >= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Subgradient of r -> ||r||_G at r != 0, by implicit differentiation of
/// sum_i G(|r_i|/alpha) = 1:
///   d alpha / d r_i = alpha G'(|r_i|/alpha) sign(r_i) / sum_j G'(|r_j|/alpha) |r_j|.
inline Eigen::VectorXd orlicz_norm_gradient(const OrliczFunction& G,
                                            const Eigen::Ref<const Eigen::VectorXd>& r,
                                            double* alpha_out = nullptr) {
    if (r.size() == 0 || r.lpNorm<1>() == 0.0)
        throw std::invalid_argument("orlicz_norm_gradient: norm not differentiable at 0");
    const double alpha = orlicz_norm(G, r, alpha_out ? *alpha_out : 0.0);
    double denom = 0.0;
    Eigen::VectorXd g(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double a = std::abs(r[i]);
        const double gp = G.derivative(a / alpha);
        denom += gp * a;
        g[i] = gp * (r[i] < 0.0 ? -1.0 : (r[i] > 0.0 ? 1.0 : 0.0));
    }
    g *= alpha / denom;
    if (alpha_out) *alpha_out = alpha;
    return g;
}

/// Diagnostic report for the normalized-generator conditions.
struct PropertyReport {
    bool monotone = false;        // nondecreasing on the grid
    bool midpoint_convex = false; // G((a+b)/2) <= (G(a)+G(b))/2 on grid pairs
    bool normalized = false;      // G(0) = 0, G(1) = 1, even
    bool linear_tail = false;     // G(x) = s x + (1-s) on grid points > 1
    bool growth_ok = false;       // grid C_G estimate finite
    double c_g = 0.0;             // max G(y) x^2 / (G(x) y^2), x < y
    double alpha_g = 0.0;         // max G(a)G(b)/G(ab) over ab <= 1
    bool passed(bool exempt_tail = false) const {
        return monotone && midpoint_convex && normalized && growth_ok &&
               (linear_tail || exempt_tail);
    }
};

/// Grid diagnostics on a log-spaced grid in (1e-6, 10]. The constants are
/// estimates, never used in algorithm control flow.
inline PropertyReport verify_property_P(const OrliczFunction& G, int grid_size = 200) {
    if (grid_size < 100) throw std::invalid_argument("verify_property_P: grid_size >= 100 required");
    PropertyReport rep;
    std::vector<double> xs(grid_size), gs(grid_size);
    const double lo = std::log(1e-6), hi = std::log(10.0);
    for (int i = 0; i < grid_size; ++i) {
        xs[i] = std::exp(lo + (hi - lo) * (i + 1) / grid_size);
        gs[i] = G(xs[i]);
    }
    rep.monotone = true;
    for (int i = 0; i + 1 < grid_size; ++i)
        if (gs[i + 1] < gs[i] - 1e-12) rep.monotone = false;

    rep.midpoint_convex = true;
    for (int i = 0; i < grid_size; i += 3)
        for (int j = i + 1; j < grid_size; j += 3) {
            const double m = G(0.5 * (xs[i] + xs[j]));
            if (m > 0.5 * (gs[i] + gs[j]) + 1e-10 * std::max(1.0, gs[j])) rep.midpoint_convex = false;
        }

    rep.normalized = std::abs(G(0.0)) <= 1e-12 && std::abs(G(1.0) - 1.0) <= 1e-12 &&
                     G(-0.5) == G(0.5) && G(-2.0) == G(2.0);

    rep.linear_tail = true;
    const double s = G.tail_slope();
    for (int i = 0; i < grid_size; ++i)
        if (xs[i] > 1.0 && std::abs(gs[i] - (s * xs[i] + 1.0 - s)) > 1e-9 * std::max(1.0, gs[i]))
            rep.linear_tail = false;

    rep.c_g = 1.0;
    for (int i = 0; i < grid_size; ++i) {
        if (gs[i] <= 0.0) continue;
        for (int j = i + 1; j < grid_size; ++j)
            rep.c_g = std::max(rep.c_g, (gs[j] / gs[i]) * (xs[i] / xs[j]) * (xs[i] / xs[j]));
    }
    rep.growth_ok = std::isfinite(rep.c_g);

    rep.alpha_g = 0.0;
    for (int i = 0; i < grid_size; ++i)
        for (int j = 0; j < grid_size; ++j) {
            const double ab = xs[i] * xs[j];
            if (ab > 1.0) continue;
            const double gab = G(ab);
            if (gab > 0.0) rep.alpha_g = std::max(rep.alpha_g, gs[i] * gs[j] / gab);
        }
    return rep;
}

}  // namespace orlx
