#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "semisup/bounds.hpp"
#include "semisup/errors.hpp"
#include "semisup/estimators.hpp"
#include "semisup/losses.hpp"
#include "semisup/numeric.hpp"
#include "semisup/pmf.hpp"
#include "semisup/risk.hpp"
#include "semisup/rng.hpp"

namespace semisup {

struct CheckResult {
    int criterion = 0;
    std::string name;
    double measured = 0.0;
    std::string target;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::int64_t trials = 200000;
    std::uint64_t seed = 0x5eedbea7c0ffee01ULL;
    int workers = 0;
    double delta = 0.01;
};

namespace verify_detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

inline std::uint64_t crit_seed(const VerifyOptions& o, int criterion) {
    return SplitMix64::substream_seed(o.seed, 1000 + static_cast<std::uint64_t>(criterion));
}

/// Exact Binomial(n, p) pmf vector via log-space terms.
inline std::vector<double> binomial_pmf(int n, double p) {
    const std::vector<double> lf = log_factorials(n);
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        out[static_cast<std::size_t>(i)] = std::exp(log_choose(lf, n, i) +
                                                    static_cast<double>(i) * std::log(p) +
                                                    static_cast<double>(n - i) * std::log1p(-p));
    }
    return out;
}

struct SweepPoint {
    std::int64_t m = 0;
    double ratio = 0.0;
    double ratio_se = 0.0;
    double mean = 0.0;
    double se = 0.0;
};

/// Run the m in {200, 400, 800}, n = 50 m composition sweep at uniform 2x2,
/// returning measured risk scaled by `scale(m)` so the target is 1.
template <typename ScaleFn>
std::vector<SweepPoint> composition_sweep(const EstimatorSpec& spec, const LossSpec& loss,
                                          const VerifyOptions& o, std::uint64_t seed,
                                          const ScaleFn& scale) {
    const JointPmf p = JointPmf::uniform(2, 2);
    std::vector<SweepPoint> pts;
    for (std::int64_t m : {200, 400, 800}) {
        const RiskEstimate r =
            mc_risk_semisupervised(spec, spec, loss, p, m, 50 * m, o.trials,
                                   SplitMix64::substream_seed(seed, static_cast<std::uint64_t>(m)),
                                   /*pool_x=*/true, SimplexConstraint{loss.is_lp() ? 0.0 : o.delta},
                                   o.workers);
        const double s = scale(m);
        pts.push_back({m, r.mean * s, r.std_error * s, r.mean, r.std_error});
    }
    return pts;
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

/// 1. KL composition risk lands on k_x C_f / m to first order and the scaled
/// ratio moves toward 1 across m.
inline CheckResult check_fdiv_composition(const VerifyOptions& o) {
    const auto t0 = verify_detail::Clock::now();
    const FGenerator kl = builtin_generator(Divergence::kl);
    const double c_f = fdiv_constant_formula(kl, 2).C;  // f''(1)(k_y - 1)/2 = 0.5
    const auto pts = verify_detail::composition_sweep(
        EstimatorSpec::add_constant(1.0), LossSpec::fdiv(kl), o, verify_detail::crit_seed(o, 1),
        [&](std::int64_t m) { return static_cast<double>(m) / (2.0 * c_f); });

    const auto& first = pts.front();
    const auto& last = pts.back();
    const bool in_band = last.ratio >= 0.85 && last.ratio <= 1.15;
    const double slack = 4.0 * std::hypot(first.ratio_se, last.ratio_se);
    const bool toward_one = std::abs(last.ratio - 1.0) <= std::abs(first.ratio - 1.0) + slack;

    CheckResult r;
    r.criterion = 1;
    r.name = "fdiv composition first-order constant (KL)";
    r.measured = last.ratio;
    r.target = "risk*m/(k_x*C_f) in [0.85, 1.15] at m=800, moving toward 1";
    r.pass = in_band && toward_one;
    for (const auto& pt : pts) {
        r.detail += "m=" + std::to_string(pt.m) + " ratio=" + verify_detail::fmt(pt.ratio) +
                    "+-" + verify_detail::fmt(pt.ratio_se) + "; ";
    }
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

/// 2. l2^2 composition risk lands on the calibrated C_2 / m; the calibration
/// itself must sit within 2% of the closed-form equalizer limit 0.5.
inline CheckResult check_l2_composition(const VerifyOptions& o) {
    const auto t0 = verify_detail::Clock::now();
    const std::vector<std::int64_t> sizes{2500, 5000, 10000};
    const RiskConstant c2 =
        calibrate_constant(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), 2, sizes, 0);
    const bool c2_ok = std::abs(c2.C / 0.5 - 1.0) <= 0.02;

    const auto pts = verify_detail::composition_sweep(
        EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), o, verify_detail::crit_seed(o, 2),
        [&](std::int64_t m) { return static_cast<double>(m) / c2.C; });
    const auto& last = pts.back();
    const bool in_band = last.ratio >= 0.9 && last.ratio <= 1.1;

    CheckResult r;
    r.criterion = 2;
    r.name = "l2^2 composition first-order constant";
    r.measured = last.ratio;
    r.target = "risk*m/C_2 in [0.9, 1.1] at m=800; C_2 within 2% of 0.5";
    r.pass = c2_ok && in_band;
    r.detail = "C_2=" + verify_detail::fmt(c2.C) + "; ";
    for (const auto& pt : pts) {
        r.detail += "m=" + std::to_string(pt.m) + " ratio=" + verify_detail::fmt(pt.ratio) + "; ";
    }
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

/// 3. l1 composition risk lands on k_x^{1/2} C_1 m^{-1/2} with calibrated C_1.
inline CheckResult check_l1_composition(const VerifyOptions& o) {
    const auto t0 = verify_detail::Clock::now();
    const std::vector<std::int64_t> sizes{2500, 5000, 10000};
    const RiskConstant c1 = calibrate_constant(EstimatorSpec::empirical(), LossSpec::lp(1.0), 2, sizes, 0);
    const auto pts = verify_detail::composition_sweep(
        EstimatorSpec::empirical(), LossSpec::lp(1.0), o, verify_detail::crit_seed(o, 3),
        [&](std::int64_t m) { return std::sqrt(static_cast<double>(m)) / (std::sqrt(2.0) * c1.C); });
    const auto& last = pts.back();

    CheckResult r;
    r.criterion = 3;
    r.name = "l1 composition first-order constant";
    r.measured = last.ratio;
    r.target = "risk*sqrt(m)/(sqrt(k_x)*C_1) in [0.85, 1.15] at m=800";
    r.pass = last.ratio >= 0.85 && last.ratio <= 1.15;
    r.detail = "C_1=" + verify_detail::fmt(c1.C) + "; ";
    for (const auto& pt : pts) {
        r.detail += "m=" + std::to_string(pt.m) + " ratio=" + verify_detail::fmt(pt.ratio) + "; ";
    }
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

/// 4. The closed-form bar-risk at m = 50 agrees with a direct simulation of
/// the conditional-composition risk at uniform p_XY.
inline CheckResult check_bar_risk_vs_simulation(const VerifyOptions& o) {
    const auto t0 = verify_detail::Clock::now();
    const RiskTable table =
        build_risk_table(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), 2, 50, /*crossover=*/51);
    const double bar = bar_risk_lp(50, 2.0, table, 2).at_uniform;
    const RiskEstimate mc =
        mc_risk_conditional(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), JointPmf::uniform(2, 2), 50,
                            o.trials, verify_detail::crit_seed(o, 4), o.workers);
    const double diff = std::abs(bar - mc.mean);

    CheckResult r;
    r.criterion = 4;
    r.name = "bar-risk closed form vs simulation (l2^2, m=50)";
    r.measured = diff / mc.std_error;
    r.target = "|bar - mc| <= 4*SE";
    r.pass = diff <= 4.0 * mc.std_error;
    r.detail = "bar=" + verify_detail::fmt(bar) + " mc=" + verify_detail::fmt(mc.mean) + "+-" +
               verify_detail::fmt(mc.std_error);
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

/// 5. Monte Carlo matches the exact enumeration oracle across estimators and
/// losses at small n, k; empirical is paired with lp losses only (its
/// estimates hit zero cells, where f-divergences are undefined).
inline CheckResult check_oracle_equivalence(const VerifyOptions& o) {
    const auto t0 = verify_detail::Clock::now();
    struct Combo {
        EstimatorSpec spec;
        LossSpec loss;
    };
    std::vector<Combo> combos;
    const std::vector<EstimatorSpec> specs{EstimatorSpec::empirical(), EstimatorSpec::add_constant(1.0),
                                           EstimatorSpec::minimax_l2()};
    const std::vector<LossSpec> losses{LossSpec::lp(1.0), LossSpec::lp(2.0),
                                       LossSpec::fdiv(builtin_generator(Divergence::kl)),
                                       LossSpec::fdiv(builtin_generator(Divergence::chi2))};
    for (const auto& s : specs) {
        for (const auto& l : losses) {
            if (s.kind == EstimatorSpec::Kind::empirical && !l.is_lp()) continue;
            combos.push_back({s, l});
        }
    }

    const std::int64_t trials = std::clamp<std::int64_t>(o.trials / 10, 2000, 20000);
    SplitMix64 gen(verify_detail::crit_seed(o, 5));
    double worst_sigma = 0.0;
    int comparisons = 0;
    bool all_ok = true;
    std::string first_fail;
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        for (int rep = 0; rep < 20; ++rep) {
            const int k = 2 + static_cast<int>(gen.next_u64() % 2);       // k in {2, 3}
            const std::int64_t n = 2 + static_cast<std::int64_t>(gen.next_u64() % 5);  // n in {2..6}
            std::vector<double> w(static_cast<std::size_t>(k));
            for (double& v : w) v = 0.05 + gen.next_double();
            const Pmf p = Pmf::from_weights(std::move(w), Normalize::on);
            const double exact = exact_risk_univariate(combos[ci].spec, combos[ci].loss, p, n).mean;
            const RiskEstimate mc =
                mc_risk_univariate(combos[ci].spec, combos[ci].loss, p, n, trials,
                                   gen.next_u64(), o.workers);
            const double sigma = std::abs(mc.mean - exact) / mc.std_error;
            worst_sigma = std::max(worst_sigma, sigma);
            ++comparisons;
            if (sigma > 4.0) {
                all_ok = false;
                if (first_fail.empty()) {
                    first_fail = combos[ci].spec.describe() + "/" + combos[ci].loss.describe() +
                                 " off by " + verify_detail::fmt(sigma) + " SE";
                }
            }
        }
    }

    CheckResult r;
    r.criterion = 5;
    r.name = "oracle equivalence (MC vs exact enumeration)";
    r.measured = worst_sigma;
    r.target = "|mc - exact| <= 4*SE over all combos";
    r.pass = all_ok;
    r.detail = std::to_string(comparisons) + " comparisons, worst " + verify_detail::fmt(worst_sigma) +
               " SE" + (first_fail.empty() ? "" : ("; " + first_fail));
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

/// 6. H^n_p(x) n^{p/2} -> C_p x^{p/2} at n = 4000 with the calibrated hybrid
/// tables; the table constant and the target constant are the same object.
inline CheckResult check_h_sum_convergence(const VerifyOptions&) {
    const auto t0 = verify_detail::Clock::now();
    const int n = 4000;
    double worst_dev = 0.0;
    std::string detail;
    bool ok = true;
    for (double p : {1.0, 1.5, 2.0}) {
        const EstimatorSpec spec = p == 2.0 ? EstimatorSpec::minimax_l2() : EstimatorSpec::empirical();
        const RiskTable table = build_risk_table(spec, LossSpec::lp(p), 2, n, 40);
        for (double x : {0.1, 0.3, 0.5, 0.9}) {
            const double ratio = H_np(x, n, p, table) * std::pow(static_cast<double>(n), p / 2.0) /
                                 (table.constant * std::pow(x, p / 2.0));
            worst_dev = std::max(worst_dev, std::abs(ratio - 1.0));
            if (ratio < 0.95 || ratio > 1.05) {
                ok = false;
                detail += "p=" + verify_detail::fmt(p) + " x=" + verify_detail::fmt(x) + " ratio=" +
                          verify_detail::fmt(ratio) + "; ";
            }
        }
    }

    CheckResult r;
    r.criterion = 6;
    r.name = "H^n_p convergence to C_p (x/n)^{p/2}";
    r.measured = 1.0 + worst_dev;
    r.target = "ratio in [0.95, 1.05] at n=4000 for p in {1,1.5,2}, x in {.1,.3,.5,.9}";
    r.pass = ok;
    r.detail = detail.empty() ? "worst |ratio-1| = " + verify_detail::fmt(worst_dev) : detail;
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

/// 7. n (B_n(f, x) - f(x)) approaches x(1-x) f''(x)/2 for f = t^{3/4}.
inline CheckResult check_bernstein_limit(const VerifyOptions&) {
    const auto t0 = verify_detail::Clock::now();
    const int n = 1600;
    const double x = 0.3;
    std::vector<double> fvals(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        fvals[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i) / n, 0.75);
    }
    const double measured = n * (bernstein_poly(fvals, x) - std::pow(x, 0.75));
    const double fpp = 0.75 * (0.75 - 1.0) * std::pow(x, 0.75 - 2.0);
    const double limit = x * (1.0 - x) * fpp / 2.0;

    CheckResult r;
    r.criterion = 7;
    r.name = "Bernstein second-order limit (f = t^{3/4}, x = 0.3)";
    r.measured = measured / limit;
    r.target = "n(B_n - f)/[x(1-x)f''/2] within 5% of 1 at n=1600";
    r.pass = std::abs(measured / limit - 1.0) <= 0.05;
    r.detail = "n(B_n-f)=" + verify_detail::fmt(measured) + " limit=" + verify_detail::fmt(limit);
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

/// 8. The exponential tail bounds dominate the exact Binomial(100, 0.1) tails
/// at lambda in {2, 4, 6}.
inline CheckResult check_tail_bounds(const VerifyOptions&) {
    const auto t0 = verify_detail::Clock::now();
    const std::vector<double> pmf = verify_detail::binomial_pmf(100, 0.1);
    const double expectation = 10.0;
    bool ok = true;
    double worst = 0.0;
    std::string detail;
    for (double lam : {2.0, 4.0, 6.0}) {
        const TailBounds b = binomial_tail_bounds(expectation, lam);
        double lower_exact = 0.0, upper_exact = 0.0;
        for (int i = 0; i <= static_cast<int>(expectation - lam); ++i) {
            lower_exact += pmf[static_cast<std::size_t>(i)];
        }
        for (int i = static_cast<int>(expectation + lam); i <= 100; ++i) {
            upper_exact += pmf[static_cast<std::size_t>(i)];
        }
        worst = std::max({worst, lower_exact / b.lower, upper_exact / b.upper});
        if (lower_exact > b.lower || upper_exact > b.upper) {
            ok = false;
            detail += "lambda=" + verify_detail::fmt(lam) + " violated; ";
        }
    }

    CheckResult r;
    r.criterion = 8;
    r.name = "binomial tail bounds dominate exact tails";
    r.measured = worst;
    r.target = "exact tail / bound <= 1 for lambda in {2,4,6}, both tails";
    r.pass = ok;
    r.detail = detail.empty() ? "max exact/bound = " + verify_detail::fmt(worst) : detail;
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

/// 9. With m fixed, more unlabeled samples cannot hurt: the risk at n = 1e4
/// is below the risk at n = 1e2, and the gap to the bar-risk shrinks
/// monotonically beyond Monte Carlo noise.
inline CheckResult check_unlabeled_direction(const VerifyOptions& o) {
    const auto t0 = verify_detail::Clock::now();
    const int m = 200;
    const RiskTable table =
        build_risk_table(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), 2, m, /*crossover=*/m + 1);
    const double bar = bar_risk_lp(m, 2.0, table, 2).at_uniform;
    const JointPmf p = JointPmf::uniform(2, 2);
    std::vector<RiskEstimate> risks;
    for (std::int64_t n : {100, 1000, 10000}) {
        risks.push_back(mc_risk_semisupervised(
            EstimatorSpec::minimax_l2(), EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), p, m, n,
            o.trials, SplitMix64::substream_seed(verify_detail::crit_seed(o, 9), static_cast<std::uint64_t>(n)),
            true, std::nullopt, o.workers));
    }
    const bool decreasing =
        risks[2].mean <= risks[0].mean + 4.0 * std::hypot(risks[2].std_error, risks[0].std_error);
    const double g0 = risks[0].mean - bar, g1 = risks[1].mean - bar, g2 = risks[2].mean - bar;
    const bool gap01 = g1 <= g0 + 4.0 * std::hypot(risks[0].std_error, risks[1].std_error);
    const bool gap12 = g2 <= g1 + 4.0 * std::hypot(risks[1].std_error, risks[2].std_error);

    CheckResult r;
    r.criterion = 9;
    r.name = "unlabeled data direction (m=200 fixed, l2^2)";
    r.measured = g2;
    r.target = "risk(n=1e4) <= risk(n=1e2) + 4*SE; gap to bar-risk shrinks across n";
    r.pass = decreasing && gap01 && gap12;
    r.detail = "bar=" + verify_detail::fmt(bar) + " gaps=" + verify_detail::fmt(g0) + ", " +
               verify_detail::fmt(g1) + ", " + verify_detail::fmt(g2);
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

/// 10. Loss axioms under fuzzing: non-negativity, identity of indiscernibles,
/// f''(1)/2 local curvature, the Le Cam <= Hellinger^2 <= KL <= chi^2 chain,
/// and generator validation for the four builtins.
inline CheckResult check_loss_axioms(const VerifyOptions& o) {
    const auto t0 = verify_detail::Clock::now();
    const std::vector<FGenerator> gens{
        builtin_generator(Divergence::lecam), builtin_generator(Divergence::hellinger2),
        builtin_generator(Divergence::kl), builtin_generator(Divergence::chi2)};
    SplitMix64 gen(verify_detail::crit_seed(o, 10));
    bool ok = true;
    std::string detail;
    double worst_quad = 0.0;

    const auto grid = default_validation_grid();
    for (const FGenerator& g : gens) {
        if (!validate_generator(g, grid).all_pass()) {
            ok = false;
            detail += g.name + " failed validation; ";
        }
    }

    auto random_pmf = [&](int k, double floor) {
        // Dirichlet(1,..,1) mixed with the floor, so min entry >= floor exactly.
        std::vector<double> w(static_cast<std::size_t>(k));
        double sum = 0.0;
        for (double& v : w) {
            v = -std::log(1.0 - gen.next_double());
            sum += v;
        }
        const double slack = 1.0 - floor * static_cast<double>(k);
        for (double& v : w) v = floor + slack * (v / sum);
        return Pmf::from_weights(std::move(w), Normalize::on);
    };

    const int cases = 10000;
    for (int c = 0; c < cases && ok; ++c) {
        const int k = 2 + static_cast<int>(gen.next_u64() % 5);
        const Pmf p = random_pmf(k, 1e-6);
        const Pmf q = random_pmf(k, 1e-6);

        for (const FGenerator& g : gens) {
            if (f_divergence(g, p, q) < -1e-12) { ok = false; detail += g.name + " negative; "; }
            if (f_divergence(g, p, p) != 0.0) { ok = false; detail += g.name + " identity; "; }
        }
        const double pe = 1.0 + (c % 3) * 0.5;  // p in {1, 1.5, 2}
        if (lp_loss(pe, p, q) < 0.0 || lp_loss(pe, p, p) != 0.0) { ok = false; detail += "lp axiom; "; }

        // ordering chain on a q bounded away from the boundary
        const Pmf qf = random_pmf(k, 0.05);
        const double lc = f_divergence(gens[0], p, qf), he = f_divergence(gens[1], p, qf),
                     kl = f_divergence(gens[2], p, qf), ch = f_divergence(gens[3], p, qf);
        if (!(lc <= he + 1e-12 && he <= kl + 1e-12 && kl <= ch + 1e-12)) {
            ok = false;
            detail += "ordering chain broke; ";
        }

        if (c % 20 == 0) {  // curvature probe: q = p + eps*v, sum(v) = 0, |v| <= 1/2
            const Pmf pf = random_pmf(k, 0.05);
            std::vector<double> v(static_cast<std::size_t>(k));
            double mean_v = 0.0;
            for (double& vi : v) { vi = 2.0 * gen.next_double() - 1.0; mean_v += vi; }
            mean_v /= static_cast<double>(k);
            double max_abs = 0.0;
            for (double& vi : v) { vi -= mean_v; max_abs = std::max(max_abs, std::abs(vi)); }
            double sum_v2_over_p = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] *= 0.5 / max_abs;
                sum_v2_over_p += v[i] * v[i] / pf[i];
            }
            for (double eps : {1e-3, 1e-4}) {
                std::vector<double> qw(pf.weights().begin(), pf.weights().end());
                for (std::size_t i = 0; i < qw.size(); ++i) qw[i] += eps * v[i];
                const Pmf qp = Pmf::from_weights(std::move(qw));
                for (const FGenerator& g : gens) {
                    const double predicted = g.f_second(1.0) / 2.0 * eps * eps * sum_v2_over_p;
                    const double dev = std::abs(f_divergence(g, pf, qp) / predicted - 1.0);
                    worst_quad = std::max(worst_quad, dev);
                    if (dev > 0.02) {
                        ok = false;
                        detail += g.name + " curvature off by " + verify_detail::fmt(dev) + "; ";
                    }
                }
            }
        }
    }

    CheckResult r;
    r.criterion = 10;
    r.name = "loss axioms and generator validation";
    r.measured = worst_quad;
    r.target = "all axioms hold over 1e4 fuzz cases; curvature within 2%";
    r.pass = ok;
    r.detail = detail.empty() ? "worst curvature deviation " + verify_detail::fmt(worst_quad) : detail;
    r.seconds = verify_detail::seconds_since(t0);
    return r;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_verify_suite(std::string_view suite, const VerifyOptions& o) {
    std::vector<int> ids;
    if (suite == "lp") ids = {2, 3, 4, 5, 9};
    else if (suite == "fdiv") ids = {1, 5, 10};
    else if (suite == "bounds") ids = {6, 7, 8};
    else if (suite == "all") ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    else throw ConfigError("unknown verify suite '" + std::string(suite) + "' (try lp, fdiv, bounds, all)");

    std::vector<CheckResult> out;
    for (int id : ids) {
        switch (id) {
            case 1: out.push_back(check_fdiv_composition(o)); break;
            case 2: out.push_back(check_l2_composition(o)); break;
            case 3: out.push_back(check_l1_composition(o)); break;
            case 4: out.push_back(check_bar_risk_vs_simulation(o)); break;
            case 5: out.push_back(check_oracle_equivalence(o)); break;
            case 6: out.push_back(check_h_sum_convergence(o)); break;
            case 7: out.push_back(check_bernstein_limit(o)); break;
            case 8: out.push_back(check_tail_bounds(o)); break;
            case 9: out.push_back(check_unlabeled_direction(o)); break;
            case 10: out.push_back(check_loss_axioms(o)); break;
        }
    }
    return out;
}

inline bool print_check_results(std::ostream& os, const std::vector<CheckResult>& results) {
    bool all_pass = true;
    for (const CheckResult& r : results) {
        all_pass = all_pass && r.pass;
        os << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.criterion << " — " << r.name
           << ": measured=" << verify_detail::fmt(r.measured) << "  target: " << r.target;
        if (!r.detail.empty()) os << "  [" << r.detail << "]";
        os << "  (" << std::fixed << std::setprecision(1) << r.seconds << "s)" << std::defaultfloat
           << "\n";
    }
    return all_pass;
}

}  // namespace semisup
