#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "semisup/errors.hpp"
#include "semisup/estimators.hpp"
#include "semisup/losses.hpp"
#include "semisup/numeric.hpp"
#include "semisup/pmf.hpp"
#include "semisup/rng.hpp"
#include "semisup/samples.hpp"

namespace semisup {

struct RiskEstimate {
    enum class Method { exact, monte_carlo };

    double mean = 0.0;
    double std_error = 0.0;      // 0 for exact
    std::int64_t trials = 0;     // MC trials, or enumerated outcomes for exact
    Method method = Method::exact;
};

namespace detail {

/*
Deterministic trial runner. Workers fill disjoint contiguous chunks of the
per-trial loss array; every trial derives its own RNG substream from
(seed, trial index), and the reduction is a fixed-order pairwise sum. The
result is therefore bitwise independent of the worker count.

make_worker() is invoked once per thread and must return a callable
double(std::int64_t trial_index) owning whatever scratch space it needs.
*/
template <typename MakeWorker>
RiskEstimate run_mc_trials(std::int64_t trials, int workers, const MakeWorker& make_worker) {
    if (trials < 2) throw ConfigError("Monte Carlo risk needs trials >= 2");
    int w_count = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    w_count = std::clamp<int>(w_count, 1, 16);
    w_count = static_cast<int>(std::min<std::int64_t>(w_count, trials));

    std::vector<double> losses(static_cast<std::size_t>(trials));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w_count));
    const std::int64_t chunk = (trials + w_count - 1) / w_count;

    auto run_range = [&](int w, std::int64_t lo, std::int64_t hi) {
        try {
            auto fn = make_worker();
            for (std::int64_t t = lo; t < hi; ++t) losses[static_cast<std::size_t>(t)] = fn(t);
        } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
    };

    if (w_count == 1) {
        run_range(0, 0, trials);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(w_count));
        for (int w = 0; w < w_count; ++w) {
            const std::int64_t lo = w * chunk;
            const std::int64_t hi = std::min<std::int64_t>(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, w, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    const double mean = pairwise_sum(losses) / static_cast<double>(trials);
    std::vector<double> sq(losses.size());
    for (std::size_t i = 0; i < losses.size(); ++i) {
        const double d = losses[i] - mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(trials - 1);
    RiskEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(var / static_cast<double>(trials));
    est.trials = trials;
    est.method = RiskEstimate::Method::monte_carlo;
    return est;
}

/// Draw `n` symbols from the cdf and bump counts; the elementary inverse-CDF
/// draw shared by all samplers.
inline void draw_counts(const std::vector<double>& cdf, std::int64_t n, SplitMix64& rng,
                        std::span<std::int64_t> counts) {
    const int last = static_cast<int>(cdf.size()) - 1;
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = rng.next_double();
        int s = 0;
        while (s < last && u >= cdf[static_cast<std::size_t>(s)]) ++s;
        ++counts[static_cast<std::size_t>(s)];
    }
}

inline std::vector<double> cdf_of(std::span<const double> weights) {
    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    return cdf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact enumeration oracle
// ---------------------------------------------------------------------------

/// E over T ~ Multinomial(n, p) of loss(p, estimate(T)), by full enumeration
/// of count vectors with multinomial weights computed in log space.
/// Requires C(n+k-1, k-1) <= 1e7.
inline RiskEstimate exact_risk_univariate(const EstimatorSpec& spec, const LossSpec& loss,
                                          const Pmf& p, std::int64_t n) {
    const int k = static_cast<int>(p.size());
    const double n_outcomes = composition_count(n, k);
    if (n_outcomes > 1e7) {
        throw EnumerationTooLarge("exact_risk_univariate: " + std::to_string(n_outcomes) + " outcomes");
    }
    const std::vector<double> lf = log_factorials(static_cast<int>(n));
    std::vector<double> logp(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) logp[i] = p[i] > 0.0 ? std::log(p[i]) : 0.0;

    std::vector<double> est(p.size());
    KahanSum acc;
    std::int64_t visited = 0;
    for_each_composition(n, k, [&](std::span<const std::int64_t> t) {
        ++visited;
        double lw = lf[static_cast<std::size_t>(n)];
        for (int i = 0; i < k; ++i) {
            const std::int64_t ti = t[static_cast<std::size_t>(i)];
            if (ti > 0) {
                if (p[static_cast<std::size_t>(i)] == 0.0) return;  // zero-probability outcome
                lw += static_cast<double>(ti) * logp[static_cast<std::size_t>(i)] -
                      lf[static_cast<std::size_t>(ti)];
            }
        }
        apply_univariate_into(spec, t, n, est);
        acc.add(std::exp(lw) * loss.evaluate(p.weights(), est));
    });
    RiskEstimate out;
    out.mean = acc.value();
    out.std_error = 0.0;
    out.trials = visited;
    out.method = RiskEstimate::Method::exact;
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo risks
// ---------------------------------------------------------------------------

/// Sampled version of exact_risk_univariate; trial t uses RNG substream
/// (seed, t).
inline RiskEstimate mc_risk_univariate(const EstimatorSpec& spec, const LossSpec& loss, const Pmf& p,
                                       std::int64_t n, std::int64_t trials, std::uint64_t seed,
                                       int workers = 0) {
    const auto cdf = detail::cdf_of(p.weights());
    const std::size_t k = p.size();
    auto make_worker = [&, cdf, k, n, seed]() {
        return [&spec, &loss, &p, cdf, k, n, seed, counts = std::vector<std::int64_t>(k),
                est = std::vector<double>(k)](std::int64_t t) mutable {
            std::fill(counts.begin(), counts.end(), 0);
            SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(t));
            detail::draw_counts(cdf, n, rng, counts);
            apply_univariate_into(spec, counts, n, est);
            return loss.evaluate(p.weights(), est);
        };
    };
    return detail::run_mc_trials(trials, workers, make_worker);
}

/// Risk of the conditional composition with the marginal known: per trial,
/// draw L^m from p, estimate q_{Y|X} per bucket, and score
/// loss(p, p_X * q_{Y|X}). This is the R_m-type objective the bar-risk
/// formulas expand.
inline RiskEstimate mc_risk_conditional(const EstimatorSpec& cond_spec, const LossSpec& loss,
                                        const JointPmf& p, std::int64_t m, std::int64_t trials,
                                        std::uint64_t seed, int workers = 0) {
    const auto joint_cdf = detail::cdf_of(p.flat());
    const Pmf px = p.marginal_x();
    const std::size_t kx = p.k_x(), ky = p.k_y();
    auto make_worker = [&, joint_cdf, kx, ky, m, seed]() {
        return [&cond_spec, &loss, &p, &px, joint_cdf, kx, ky, m, seed,
                cells = std::vector<std::int64_t>(kx * ky), qrow = std::vector<double>(ky),
                qjoint = std::vector<double>(kx * ky)](std::int64_t t) mutable {
            std::fill(cells.begin(), cells.end(), 0);
            SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(t));
            detail::draw_counts(joint_cdf, m, rng, cells);
            for (std::size_t x = 0; x < kx; ++x) {
                std::span<const std::int64_t> row(cells.data() + x * ky, ky);
                std::int64_t total = 0;
                for (std::int64_t c : row) total += c;
                apply_univariate_into(cond_spec, row, total, qrow);
                for (std::size_t y = 0; y < ky; ++y) qjoint[x * ky + y] = px[x] * qrow[y];
            }
            return loss.evaluate(p.flat(), qjoint);
        };
    };
    return detail::run_mc_trials(trials, workers, make_worker);
}

/// Semi-supervised joint risk: per trial draw L^m from p and U^n from its X
/// marginal, build the joint composition, and score loss(p, q_XY).
/// When the loss is an f-divergence and a simplex constraint is declared,
/// p must respect the floor.
inline RiskEstimate mc_risk_semisupervised(const EstimatorSpec& marginal_spec,
                                           const EstimatorSpec& cond_spec, const LossSpec& loss,
                                           const JointPmf& p, std::int64_t m, std::int64_t n,
                                           std::int64_t trials, std::uint64_t seed, bool pool_x = true,
                                           std::optional<SimplexConstraint> constraint = std::nullopt,
                                           int workers = 0) {
    if (!loss.is_lp() && constraint) {
        constraint->require_valid_for(p.k_x() * p.k_y());
        if (!constraint->admits(p.flat())) {
            throw ConstraintViolated("mc_risk_semisupervised: p_XY entry below delta = " +
                                     std::to_string(constraint->delta));
        }
    }
    const auto joint_cdf = detail::cdf_of(p.flat());
    const auto marg_cdf = detail::cdf_of(p.marginal_x().weights());
    const std::size_t kx = p.k_x(), ky = p.k_y();
    auto make_worker = [&, joint_cdf, marg_cdf, kx, ky, m, n, seed, pool_x]() {
        return [&marginal_spec, &cond_spec, &loss, &p, joint_cdf, marg_cdf, kx, ky, m, n, seed, pool_x,
                cells = std::vector<std::int64_t>(kx * ky), xcounts = std::vector<std::int64_t>(kx),
                qx = std::vector<double>(kx), qrow = std::vector<double>(ky),
                qjoint = std::vector<double>(kx * ky)](std::int64_t t) mutable {
            std::fill(cells.begin(), cells.end(), 0);
            std::fill(xcounts.begin(), xcounts.end(), 0);
            SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(t));
            detail::draw_counts(joint_cdf, m, rng, cells);
            detail::draw_counts(marg_cdf, n, rng, xcounts);  // unlabeled
            std::int64_t marg_total = n;
            if (pool_x) {
                for (std::size_t x = 0; x < kx; ++x) {
                    std::int64_t tx = 0;
                    for (std::size_t y = 0; y < ky; ++y) tx += cells[x * ky + y];
                    xcounts[x] += tx;
                }
                marg_total += m;
            }
            apply_univariate_into(marginal_spec, xcounts, marg_total, qx);
            for (std::size_t x = 0; x < kx; ++x) {
                std::span<const std::int64_t> row(cells.data() + x * ky, ky);
                std::int64_t total = 0;
                for (std::int64_t c : row) total += c;
                apply_univariate_into(cond_spec, row, total, qrow);
                for (std::size_t y = 0; y < ky; ++y) qjoint[x * ky + y] = qx[x] * qrow[y];
            }
            return loss.evaluate(p.flat(), qjoint);
        };
    };
    return detail::run_mc_trials(trials, workers, make_worker);
}

// ---------------------------------------------------------------------------
// Worst-case search
// ---------------------------------------------------------------------------

struct SearchConfig {
    int grid_resolution = 20;
    int refine_iterations = 30;
    SimplexConstraint constraint{0.0};
    std::uint64_t seed = 0;
};

struct WorstCase {
    Pmf argmax;
    RiskEstimate value;
};

/*
Best-effort maximization of risk_fn over the k-simplex (restricted by the
delta floor): a regular grid with entries that are multiples of
1/grid_resolution, followed by coordinate-pairwise mass-transfer ascent with
a halving step. The uniform distribution is always probed too, so the result
is a lower bound on the true max that never misses the conjectured uniform
maximizer.
*/
inline WorstCase worst_case_risk(const std::function<RiskEstimate(const Pmf&)>& risk_fn, int k,
                                 const SearchConfig& cfg) {
    if (cfg.grid_resolution < 2) throw ConfigError("worst_case_risk: grid_resolution must be >= 2");
    cfg.constraint.require_valid_for(static_cast<std::size_t>(k));
    const double delta = cfg.constraint.delta;
    if (composition_count(cfg.grid_resolution, k) > 1e6) {
        throw EnumerationTooLarge("worst_case_risk: grid too large");
    }

    std::optional<WorstCase> best;
    auto probe = [&](std::vector<double> w) {
        Pmf cand = Pmf::from_weights(std::move(w));
        RiskEstimate r = risk_fn(cand);
        if (!best || r.mean > best->value.mean) best = WorstCase{std::move(cand), r};
    };

    probe(std::vector<double>(static_cast<std::size_t>(k), 1.0 / static_cast<double>(k)));
    const int res = cfg.grid_resolution;
    for_each_composition(res, k, [&](std::span<const std::int64_t> t) {
        std::vector<double> w(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            w[static_cast<std::size_t>(i)] = static_cast<double>(t[static_cast<std::size_t>(i)]) /
                                             static_cast<double>(res);
            if (w[static_cast<std::size_t>(i)] < delta) return;
        }
        probe(std::move(w));
    });

    double step = 1.0 / static_cast<double>(res);
    for (int it = 0; it < cfg.refine_iterations && step > 1e-10; ++it) {
        bool improved = false;
        const Pmf base = best->argmax;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                if (i == j) continue;
                const double from = base[static_cast<std::size_t>(j)];
                if (from - step < delta) continue;
                std::vector<double> w(base.weights().begin(), base.weights().end());
                w[static_cast<std::size_t>(i)] += step;
                w[static_cast<std::size_t>(j)] -= step;
                const double before = best->value.mean;
                probe(std::move(w));
                if (best->value.mean > before) improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return *best;
}

struct JointWorstCase {
    JointPmf argmax;
    RiskEstimate value;
};

/// Same search over joint distributions: the k_x * k_y table is treated as
/// one flat simplex point.
inline JointWorstCase worst_case_risk(const std::function<RiskEstimate(const JointPmf&)>& risk_fn,
                                      int k_x, int k_y, const SearchConfig& cfg) {
    auto flat_fn = [&](const Pmf& flat) {
        std::vector<double> table(flat.weights().begin(), flat.weights().end());
        return risk_fn(JointPmf::from_table(std::move(table), static_cast<std::size_t>(k_x),
                                            static_cast<std::size_t>(k_y)));
    };
    WorstCase wc = worst_case_risk(flat_fn, k_x * k_y, cfg);
    std::vector<double> table(wc.argmax.weights().begin(), wc.argmax.weights().end());
    return JointWorstCase{JointPmf::from_table(std::move(table), static_cast<std::size_t>(k_x),
                                               static_cast<std::size_t>(k_y)),
                          wc.value};
}

// ---------------------------------------------------------------------------
// First-order constant calibration
// ---------------------------------------------------------------------------

struct RiskConstant {
    enum class Provenance { closed_form, calibrated };

    double C = 0.0;
    LossSpec loss;
    int k = 0;
    Provenance provenance = Provenance::calibrated;
};

/// C_f = f''(1) (k-1) / 2, the first-order f-divergence constant.
inline RiskConstant fdiv_constant_formula(const FGenerator& g, int k) {
    RiskConstant c;
    c.C = g.f_second(1.0) * static_cast<double>(k - 1) / 2.0;
    c.loss = LossSpec::fdiv(g);
    c.k = k;
    c.provenance = RiskConstant::Provenance::closed_form;
    return c;
}

/// Fit log risk = log C - rate * log n with the rate fixed by the loss kind
/// (p/2 for l^p_p, 1 for f-divergences), evaluating the risk at uniform p for
/// each n; returns C read off the largest n. trials = 0 selects the exact
/// enumeration oracle.
inline RiskConstant calibrate_constant(const EstimatorSpec& spec, const LossSpec& loss, int k,
                                       std::span<const std::int64_t> n_list, std::int64_t trials = 0,
                                       std::uint64_t seed = 1, int workers = 0) {
    if (n_list.size() < 3) throw ConfigError("calibrate_constant: need at least 3 sample sizes");
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1]) throw ConfigError("calibrate_constant: n_list must be increasing");
    }
    const Pmf uniform = Pmf::uniform(static_cast<std::size_t>(k));
    const double rate = loss.rate_exponent();
    double c_last = 0.0;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        const std::int64_t n = n_list[i];
        const double risk = trials == 0
                                ? exact_risk_univariate(spec, loss, uniform, n).mean
                                : mc_risk_univariate(spec, loss, uniform, n, trials,
                                                     SplitMix64::substream_seed(seed, i), workers)
                                      .mean;
        c_last = risk * std::pow(static_cast<double>(n), rate);
    }
    RiskConstant out;
    out.C = c_last;
    out.loss = loss;
    out.k = k;
    out.provenance = RiskConstant::Provenance::calibrated;
    return out;
}

}  // namespace semisup
