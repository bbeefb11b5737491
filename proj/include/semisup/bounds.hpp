#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semisup/errors.hpp"
#include "semisup/losses.hpp"
#include "semisup/numeric.hpp"
#include "semisup/pmf.hpp"
#include "semisup/risk.hpp"

namespace semisup {

/*
Table of univariate risks r_i, i = 0..n_max, feeding the binomially weighted
sums below. r_0 is fixed by the zero-sample convention: the estimator outputs
uniform, and its worst case over the simplex sits at a corner, so
r_0 = loss(corner, uniform). Sources:

    exact                  every entry from the enumeration oracle
    calibrated_asymptotic  every entry C * i^{-rate}
    hybrid                 exact below `crossover`, asymptotic at and above
*/
struct RiskTable {
    enum class Source { exact, calibrated_asymptotic, hybrid };

    std::vector<double> values;
    Source source = Source::exact;
    int crossover = 0;          // first asymptotic index; values.size() if fully exact
    double constant = 0.0;      // C of the asymptotic branch (0 if fully exact)
    double rate_exponent = 1.0; // p/2 for lp, 1 for fdiv
    std::string warning;        // non-empty if the crossover seam is >10% discontinuous

    int n_max() const { return static_cast<int>(values.size()) - 1; }

    void require_covers(int n) const {
        if (n_max() < n) {
            throw TableTooShort("risk table covers 0.." + std::to_string(n_max()) + ", need " +
                                std::to_string(n));
        }
    }
};

// ---------------------------------------------------------------------------
// Binomially weighted risk sums (per-term log space, pairwise summation)
// ---------------------------------------------------------------------------

/// H^n_p(x) = sum_i C(n,i) r_i x^{i+p} (1-x)^{n-i}.
inline double H_np(double x, int n, double p, const RiskTable& table) {
    table.require_covers(n);
    if (x < 0.0 || x > 1.0) throw ConfigError("H_np: x must be in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return table.values[static_cast<std::size_t>(n)];
    const std::vector<double> lf = log_factorials(n);
    const double lx = std::log(x), l1x = std::log1p(-x);
    std::vector<double> terms(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        terms[static_cast<std::size_t>(i)] =
            std::exp(log_choose(lf, n, i) + (static_cast<double>(i) + p) * lx +
                     static_cast<double>(n - i) * l1x) *
            table.values[static_cast<std::size_t>(i)];
    }
    return pairwise_sum(terms);
}

/// G^n_p(x) = sum_i C(n,i) r_i x^i (i/n)^p (1-x)^{n-i}; the i = 0 term is 0.
inline double G_np(double x, int n, double p, const RiskTable& table) {
    table.require_covers(n);
    if (x < 0.0 || x > 1.0) throw ConfigError("G_np: x must be in [0, 1]");
    if (x == 0.0) return 0.0;
    const std::vector<double> lf = log_factorials(n);
    const double lx = std::log(x);
    const double l1x = x == 1.0 ? 0.0 : std::log1p(-x);
    std::vector<double> terms(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i <= n; ++i) {
        const double l1x_term = (n - i) == 0 ? 0.0 : static_cast<double>(n - i) * l1x;
        if (x == 1.0 && i != n) continue;
        terms[static_cast<std::size_t>(i) - 1] =
            std::exp(log_choose(lf, n, i) + static_cast<double>(i) * lx + l1x_term +
                     p * std::log(static_cast<double>(i) / static_cast<double>(n))) *
            table.values[static_cast<std::size_t>(i)];
    }
    return pairwise_sum(terms);
}

// ---------------------------------------------------------------------------
// Bar-risk closed forms
// ---------------------------------------------------------------------------

struct BarRisk {
    double at_uniform = 0.0;  // the value (maximizer is uniform for the cases covered)
    double grid_max = 0.0;    // cross-check: best value over a p_X grid
};

/// R-bar for l^p_p: sum_x H^m_p(p_X(x)) evaluated at uniform p_X. For p < 2
/// the uniform point is the maximizer (each summand is concave and the
/// objective is symmetric); at p = 2 the objective is first-order flat in
/// p_X and the finite-m grid max can sit at a corner instead, so the grid
/// cross-check field is the one to consult there.
inline BarRisk bar_risk_lp(int m, double p, const RiskTable& table, int k_x,
                           int grid_resolution = 64) {
    table.require_covers(m);
    if (k_x < 1) throw ConfigError("bar_risk_lp: k_x >= 1");
    BarRisk out;
    out.at_uniform = static_cast<double>(k_x) * H_np(1.0 / static_cast<double>(k_x), m, p, table);
    if (k_x == 1) {
        out.grid_max = out.at_uniform;
        return out;
    }
    out.grid_max = out.at_uniform;
    for_each_composition(grid_resolution, k_x, [&](std::span<const std::int64_t> t) {
        double v = 0.0;
        for (int i = 0; i < k_x; ++i) {
            v += H_np(static_cast<double>(t[static_cast<std::size_t>(i)]) /
                          static_cast<double>(grid_resolution),
                      m, p, table);
        }
        if (v > out.grid_max) out.grid_max = v;
    });
    return out;
}

/// R-bar for f-divergences: sum_x p_x sum_i C(m,i) p_x^i (1-p_x)^{m-i} r_i at
/// uniform p_X, which collapses to E[r_T] with T ~ Binomial(m, 1/k_x).
inline BarRisk bar_risk_f(int m, const RiskTable& table, int k_x, int grid_resolution = 64) {
    table.require_covers(m);
    if (k_x < 1) throw ConfigError("bar_risk_f: k_x >= 1");
    const std::vector<double> lf = log_factorials(m);
    auto weighted = [&](double px) {
        if (px == 0.0) return 0.0;
        if (px == 1.0) return table.values[static_cast<std::size_t>(m)];
        const double lx = std::log(px), l1x = std::log1p(-px);
        std::vector<double> terms(static_cast<std::size_t>(m) + 1);
        for (int i = 0; i <= m; ++i) {
            terms[static_cast<std::size_t>(i)] =
                std::exp(log_choose(lf, m, i) + static_cast<double>(i) * lx +
                         static_cast<double>(m - i) * l1x) *
                table.values[static_cast<std::size_t>(i)];
        }
        return pairwise_sum(terms);
    };
    BarRisk out;
    out.at_uniform = weighted(1.0 / static_cast<double>(k_x));  // k_x * (1/k_x) * E[r_T]
    out.grid_max = out.at_uniform;
    if (k_x == 1) return out;
    for_each_composition(grid_resolution, k_x, [&](std::span<const std::int64_t> t) {
        double v = 0.0;
        for (int i = 0; i < k_x; ++i) {
            const double px = static_cast<double>(t[static_cast<std::size_t>(i)]) /
                              static_cast<double>(grid_resolution);
            v += px * weighted(px);
        }
        if (v > out.grid_max) out.grid_max = v;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Bernstein polynomials and binomial tails
// ---------------------------------------------------------------------------

/// B_n(f, x) = sum_i C(n,i) f(i/n) x^i (1-x)^{n-i}; fvals holds f at the
/// nodes i/n, i = 0..n.
inline double bernstein_poly(std::span<const double> fvals, double x) {
    if (fvals.size() < 2) throw ConfigError("bernstein_poly: need degree >= 1");
    if (x < 0.0 || x > 1.0) throw ConfigError("bernstein_poly: x must be in [0, 1]");
    const int n = static_cast<int>(fvals.size()) - 1;
    if (x == 0.0) return fvals[0];
    if (x == 1.0) return fvals[static_cast<std::size_t>(n)];
    const std::vector<double> lf = log_factorials(n);
    const double lx = std::log(x), l1x = std::log1p(-x);
    std::vector<double> terms(fvals.size());
    for (int i = 0; i <= n; ++i) {
        terms[static_cast<std::size_t>(i)] =
            std::exp(log_choose(lf, n, i) + static_cast<double>(i) * lx +
                     static_cast<double>(n - i) * l1x) *
            fvals[static_cast<std::size_t>(i)];
    }
    return pairwise_sum(terms);
}

struct TailBounds {
    double lower = 1.0;  // bound on P(X <= E - lambda)
    double upper = 1.0;  // bound on P(X >= E + lambda)
};

/// Chernoff-type binomial tail bounds for a sum of independent indicators
/// with expectation E: P(X <= E - lambda) <= exp(-lambda^2 / (2E)) and
/// P(X >= E + lambda) <= exp(-lambda^2 / (2(E + lambda/3))).
inline TailBounds binomial_tail_bounds(double expectation, double lambda) {
    if (expectation < 0.0 || lambda < 0.0) throw ConfigError("binomial_tail_bounds: need E, lambda >= 0");
    TailBounds b;
    if (lambda == 0.0) return b;  // (1, 1)
    b.lower = expectation == 0.0 ? 0.0 : std::exp(-lambda * lambda / (2.0 * expectation));
    b.upper = std::exp(-lambda * lambda / (2.0 * (expectation + lambda / 3.0)));
    return b;
}

// ---------------------------------------------------------------------------
// First-order predictions and table construction
// ---------------------------------------------------------------------------

/// First-order semi-supervised risk: k_x^{1-p/2} C m^{-p/2} for l^p_p and
/// k_x C / m for f-divergences. The constant must belong to the Y alphabet.
inline double predicted_risk(const LossSpec& loss, int k_x, int k_y, std::int64_t m,
                             const RiskConstant& constant) {
    if (m < 1) throw ConfigError("predicted_risk: m >= 1");
    if (constant.k != k_y) {
        throw DimensionMismatch("predicted_risk: constant is for k = " + std::to_string(constant.k) +
                                ", need k_y = " + std::to_string(k_y));
    }
    if (loss.is_lp()) {
        const double p = loss.exponent;
        return std::pow(static_cast<double>(k_x), 1.0 - p / 2.0) * constant.C *
               std::pow(static_cast<double>(m), -p / 2.0);
    }
    return static_cast<double>(k_x) * constant.C / static_cast<double>(m);
}

/// Worst-case loss of the uniform output, attained at a corner of the
/// simplex; defines r_0.
inline double zero_sample_risk(const LossSpec& loss, int k) {
    const Pmf corner = Pmf::point_mass(static_cast<std::size_t>(k), 0);
    const Pmf uniform = Pmf::uniform(static_cast<std::size_t>(k));
    return loss.evaluate(corner.weights(), uniform.weights());
}

/// Default calibration grid: three increasing sizes ending at the largest n
/// whose enumeration stays under the oracle cap (at most 1e4).
inline std::vector<std::int64_t> default_calibration_sizes(int k) {
    std::int64_t n = 10000;
    while (n > 16 && composition_count(n, k) > 1e7) n /= 2;
    return {n / 4, n / 2, n};
}

/// Hybrid risk table: exact enumeration below `crossover`, calibrated
/// asymptote C i^{-rate} at and above. A >10% seam between the exact value
/// and the asymptote at the crossover attaches a warning (typical for
/// equalizer-type estimators, whose risk approaches the asymptote from
/// below).
inline RiskTable build_risk_table(const EstimatorSpec& spec, const LossSpec& loss, int k, int n_max,
                                  int crossover = 40, std::int64_t calibration_trials = 0,
                                  std::uint64_t seed = 1) {
    if (crossover < 1 || crossover > n_max + 1) {
        throw ConfigError("build_risk_table: need 1 <= crossover <= n_max + 1");
    }
    RiskTable table;
    table.rate_exponent = loss.rate_exponent();
    table.crossover = crossover;
    const Pmf uniform = Pmf::uniform(static_cast<std::size_t>(k));
    table.values.reserve(static_cast<std::size_t>(n_max) + 1);
    table.values.push_back(zero_sample_risk(loss, k));
    for (int i = 1; i < crossover && i <= n_max; ++i) {
        table.values.push_back(exact_risk_univariate(spec, loss, uniform, i).mean);
    }
    if (crossover <= n_max) {
        const RiskConstant c =
            calibrate_constant(spec, loss, k, default_calibration_sizes(k), calibration_trials, seed);
        table.constant = c.C;
        for (int i = crossover; i <= n_max; ++i) {
            table.values.push_back(c.C * std::pow(static_cast<double>(i), -table.rate_exponent));
        }
        table.source = RiskTable::Source::hybrid;
        const double exact_at_seam = exact_risk_univariate(spec, loss, uniform, crossover).mean;
        const double asym_at_seam = table.values[static_cast<std::size_t>(crossover)];
        const double rel = std::abs(exact_at_seam / asym_at_seam - 1.0);
        if (rel > 0.10) {
            table.warning = "crossover discontinuity " + std::to_string(rel * 100.0) + "% at i = " +
                            std::to_string(crossover);
        }
    } else {
        table.source = RiskTable::Source::exact;
        table.constant = 0.0;
        table.crossover = static_cast<int>(table.values.size());
    }
    return table;
}

}  // namespace semisup
