#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semisup/errors.hpp"
#include "semisup/pmf.hpp"

namespace semisup {

// ---------------------------------------------------------------------------
// l^p_p losses
// ---------------------------------------------------------------------------

/// sum_x |a(x) - b(x)|^p for 1 <= p <= 2.
inline double lp_loss(double p, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("lp_loss: size mismatch");
    if (p < 1.0 || p > 2.0) throw ConfigError("lp_loss: exponent must be in [1, 2]");
    double s = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            s += d * d;
        }
    } else if (p == 1.0) {
        for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    } else {
        for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), p);
    }
    return s;
}

inline double lp_loss(double p, const Pmf& a, const Pmf& b) {
    return lp_loss(p, a.weights(), b.weights());
}

inline double lp_loss(double p, const JointPmf& a, const JointPmf& b) {
    if (a.k_x() != b.k_x() || a.k_y() != b.k_y()) throw DimensionMismatch("lp_loss: joint shape mismatch");
    return lp_loss(p, a.flat(), b.flat());
}

// ---------------------------------------------------------------------------
// f-divergences
// ---------------------------------------------------------------------------

/*
Convex generator of an f-divergence D_f(p||q) = sum_x q(x) f(p(x)/q(x)),
with f strictly convex and f(1) = 0. The boundary limits f(0+) and
lim t->0+ t*f'(t) must be finite; they drive the zero-handling conventions:

    p(x) = q(x) = 0      -> term 0
    p(x) = 0 < q(x)      -> term q(x) * f_at_zero
    q(x) = 0 < p(x)      -> AbsoluteContinuityViolation
*/
struct FGenerator {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> f_prime;
    std::function<double(double)> f_second;
    double f_at_zero = 0.0;
    double tf_prime_at_zero = 0.0;
};

enum class Divergence { kl, chi2, hellinger2, lecam };

/// The four built-in generators, in the usual conventions for these named
/// divergences (KL in nats), each with f(1) = 0 and the stated curvature:
///   kl         f(t) = t ln t            f''(1) = 1
///   chi2       f(t) = (t-1)^2           f''(1) = 2
///   hellinger2 f(t) = (sqrt(t)-1)^2     f''(1) = 1/2
///   lecam      f(t) = (1-t)/(2t+2)      f''(1) = 1/4
inline FGenerator builtin_generator(Divergence d) {
    switch (d) {
        case Divergence::kl:
            return FGenerator{
                "kl",
                [](double t) { return t == 0.0 ? 0.0 : t * std::log(t); },
                [](double t) { return std::log(t) + 1.0; },
                [](double t) { return 1.0 / t; },
                0.0,
                0.0,
            };
        case Divergence::chi2:
            return FGenerator{
                "chi2",
                [](double t) { return (t - 1.0) * (t - 1.0); },
                [](double t) { return 2.0 * (t - 1.0); },
                [](double) { return 2.0; },
                1.0,
                0.0,
            };
        case Divergence::hellinger2:
            return FGenerator{
                "hellinger2",
                [](double t) { const double s = std::sqrt(t) - 1.0; return s * s; },
                [](double t) { return 1.0 - 1.0 / std::sqrt(t); },
                [](double t) { return 0.5 / (t * std::sqrt(t)); },
                1.0,
                0.0,
            };
        case Divergence::lecam:
            return FGenerator{
                "lecam",
                [](double t) { return (1.0 - t) / (2.0 * t + 2.0); },
                [](double t) { const double u = t + 1.0; return -1.0 / (u * u); },
                [](double t) { const double u = t + 1.0; return 2.0 / (u * u * u); },
                0.5,
                0.0,
            };
    }
    throw UnknownGenerator("builtin_generator: bad enum");
}

inline FGenerator builtin_generator(std::string_view name) {
    if (name == "kl") return builtin_generator(Divergence::kl);
    if (name == "chi2") return builtin_generator(Divergence::chi2);
    if (name == "hellinger2") return builtin_generator(Divergence::hellinger2);
    if (name == "lecam") return builtin_generator(Divergence::lecam);
    throw UnknownGenerator("builtin_generator: unknown name '" + std::string(name) + "'");
}

/// D_f(p||q) with the zero conventions documented on FGenerator.
inline double f_divergence(const FGenerator& g, std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionMismatch("f_divergence: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (q[i] > 0.0) {
            s += p[i] > 0.0 ? q[i] * g.f(p[i] / q[i]) : q[i] * g.f_at_zero;
        } else if (p[i] > 0.0) {
            throw AbsoluteContinuityViolation("f_divergence: q(" + std::to_string(i) + ") = 0 < p(" +
                                              std::to_string(i) + ")");
        }
    }
    return s;
}

inline double f_divergence(const FGenerator& g, const Pmf& p, const Pmf& q) {
    return f_divergence(g, p.weights(), q.weights());
}

inline double f_divergence(const FGenerator& g, const JointPmf& p, const JointPmf& q) {
    if (p.k_x() != q.k_x() || p.k_y() != q.k_y()) throw DimensionMismatch("f_divergence: joint shape mismatch");
    return f_divergence(g, p.flat(), q.flat());
}

/// sum_x px(x) D_f(p_{Y|X=x} || q_{Y|X=x}); rows with px(x) = 0 are skipped.
inline double conditional_f_divergence(const FGenerator& g, const ConditionalPmf& p,
                                       const ConditionalPmf& q, const Pmf& px) {
    if (p.k_x() != q.k_x() || p.k_y() != q.k_y() || px.size() != p.k_x()) {
        throw DimensionMismatch("conditional_f_divergence: shape mismatch");
    }
    double s = 0.0;
    for (std::size_t x = 0; x < p.k_x(); ++x) {
        if (px[x] == 0.0) continue;
        try {
            s += px[x] * f_divergence(g, p.row(x), q.row(x));
        } catch (const AbsoluteContinuityViolation& e) {
            throw AbsoluteContinuityViolation("row " + std::to_string(x) + ": " + e.what());
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Loss dispatch
// ---------------------------------------------------------------------------

/// Either an l^p_p loss (1 <= p <= 2) or an f-divergence.
struct LossSpec {
    enum class Kind { lp, fdiv };

    Kind kind = Kind::lp;
    double exponent = 2.0;            // lp only
    std::optional<FGenerator> gen;    // fdiv only

    static LossSpec lp(double p) {
        if (p < 1.0 || p > 2.0) throw ConfigError("LossSpec: lp exponent must be in [1, 2]");
        LossSpec s;
        s.kind = Kind::lp;
        s.exponent = p;
        return s;
    }

    static LossSpec fdiv(FGenerator g) {
        LossSpec s;
        s.kind = Kind::fdiv;
        s.gen = std::move(g);
        return s;
    }

    bool is_lp() const { return kind == Kind::lp; }

    /// Decay exponent of the first-order risk: n^{-p/2} for lp, n^{-1} for fdiv.
    double rate_exponent() const { return is_lp() ? exponent / 2.0 : 1.0; }

    double evaluate(std::span<const double> truth, std::span<const double> estimate) const {
        return is_lp() ? lp_loss(exponent, truth, estimate) : f_divergence(*gen, truth, estimate);
    }

    std::string describe() const {
        if (is_lp()) {
            if (exponent == 1.0) return "l1";
            if (exponent == 2.0) return "l2";
            return "lp:" + std::to_string(exponent);
        }
        return gen->name;
    }
};

// ---------------------------------------------------------------------------
// Generator validation
// ---------------------------------------------------------------------------

struct GeneratorReport {
    bool f_one_is_zero = false;
    bool strictly_convex = false;
    bool derivative_consistent = false;
    bool second_derivative_consistent = false;
    bool zero_limits_finite = false;
    std::string detail;

    bool all_pass() const {
        return f_one_is_zero && strictly_convex && derivative_consistent &&
               second_derivative_consistent && zero_limits_finite;
    }
};

/// Check the regularity conditions on a sorted positive grid: f(1) = 0,
/// strict secant convexity, f' against a central difference of f (and f''
/// against a central difference of f') within 1e-6 relative, finite limits
/// at zero.
inline GeneratorReport validate_generator(const FGenerator& g, std::span<const double> grid) {
    GeneratorReport rep;
    rep.f_one_is_zero = std::abs(g.f(1.0)) <= 1e-12;

    rep.strictly_convex = grid.size() >= 3;
    for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
        const double t1 = grid[i], t2 = grid[i + 1], t3 = grid[i + 2];
        const double lam = (t3 - t2) / (t3 - t1);
        const double secant = lam * g.f(t1) + (1.0 - lam) * g.f(t3);
        const double gap = secant - g.f(t2);
        const double scale = std::max({1.0, std::abs(g.f(t1)), std::abs(g.f(t3))});
        if (!(gap > 1e-12 * scale)) {
            rep.strictly_convex = false;
            rep.detail += "convexity gap " + std::to_string(gap) + " at t=" + std::to_string(t2) + "; ";
            break;
        }
    }

    rep.derivative_consistent = true;
    rep.second_derivative_consistent = true;
    for (double t : grid) {
        const double h = 1e-5 * t;  // relative step: the builtins have f''' ~ t^{-a} near 0
        const double fd1 = (g.f(t + h) - g.f(t - h)) / (2.0 * h);
        if (std::abs(g.f_prime(t) - fd1) > 1e-6 * std::max(1.0, std::abs(fd1))) {
            rep.derivative_consistent = false;
            rep.detail += "f' off at t=" + std::to_string(t) + "; ";
        }
        const double fd2 = (g.f_prime(t + h) - g.f_prime(t - h)) / (2.0 * h);
        if (std::abs(g.f_second(t) - fd2) > 1e-6 * std::max(1.0, std::abs(fd2))) {
            rep.second_derivative_consistent = false;
            rep.detail += "f'' off at t=" + std::to_string(t) + "; ";
        }
    }

    rep.zero_limits_finite = std::isfinite(g.f_at_zero) && std::isfinite(g.tf_prime_at_zero);
    return rep;
}

/// Default validation grid: geometric sweep of (0, t_max].
inline std::vector<double> default_validation_grid(double t_max = 8.0, int points = 64) {
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double lo = 1e-3;
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            lo * std::pow(t_max / lo, static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return grid;
}

}  // namespace semisup
