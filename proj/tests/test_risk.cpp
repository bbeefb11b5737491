#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "semisup/errors.hpp"
#include "semisup/estimators.hpp"
#include "semisup/losses.hpp"
#include "semisup/numeric.hpp"
#include "semisup/pmf.hpp"
#include "semisup/risk.hpp"
#include "semisup/rng.hpp"

using namespace semisup;

namespace {

// Test-only oracle: exact semi-supervised risk by joint enumeration over the
// labeled cell counts and the unlabeled counts. Feasible only for toy sizes;
// written against the public estimator surface and its own multinomial
// weights, independent of the Monte Carlo engine.
double lmultinomial(std::span<const std::int64_t> t, std::span<const double> p) {
    double lw = std::lgamma(static_cast<double>(std::accumulate(t.begin(), t.end(), std::int64_t{0})) + 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        lw -= std::lgamma(static_cast<double>(t[i]) + 1.0);
        if (t[i] > 0) lw += static_cast<double>(t[i]) * std::log(p[i]);
    }
    return lw;
}

double brute_force_semisup_risk(const EstimatorSpec& marg_spec, const EstimatorSpec& cond_spec,
                                const LossSpec& loss, const JointPmf& p, std::int64_t m,
                                std::int64_t n, bool pool_x) {
    const std::size_t kx = p.k_x(), ky = p.k_y();
    const Pmf px = p.marginal_x();
    double total = 0.0;
    for_each_composition(m, static_cast<int>(kx * ky), [&](std::span<const std::int64_t> cells) {
        const double lw_l = lmultinomial(cells, p.flat());
        for_each_composition(n, static_cast<int>(kx), [&](std::span<const std::int64_t> u) {
            const double w = std::exp(lw_l + lmultinomial(u, px.weights()));
            std::vector<std::int64_t> xc(u.begin(), u.end());
            if (pool_x) {
                for (std::size_t x = 0; x < kx; ++x) {
                    for (std::size_t y = 0; y < ky; ++y) xc[x] += cells[x * ky + y];
                }
            }
            const Pmf qx = apply_univariate(marg_spec, CountVector::from_counts(xc));
            std::vector<double> qflat(kx * ky);
            for (std::size_t x = 0; x < kx; ++x) {
                std::vector<std::int64_t> row(cells.begin() + static_cast<std::ptrdiff_t>(x * ky),
                                              cells.begin() + static_cast<std::ptrdiff_t>((x + 1) * ky));
                const Pmf qrow = apply_univariate(cond_spec, CountVector::from_counts(row));
                for (std::size_t y = 0; y < ky; ++y) qflat[x * ky + y] = qx[x] * qrow[y];
            }
            total += w * loss.evaluate(p.flat(), qflat);
        });
    });
    return total;
}

double brute_force_conditional_risk(const EstimatorSpec& cond_spec, const LossSpec& loss,
                                    const JointPmf& p, std::int64_t m) {
    const std::size_t kx = p.k_x(), ky = p.k_y();
    const Pmf px = p.marginal_x();
    double total = 0.0;
    for_each_composition(m, static_cast<int>(kx * ky), [&](std::span<const std::int64_t> cells) {
        const double w = std::exp(lmultinomial(cells, p.flat()));
        std::vector<double> qflat(kx * ky);
        for (std::size_t x = 0; x < kx; ++x) {
            std::vector<std::int64_t> row(cells.begin() + static_cast<std::ptrdiff_t>(x * ky),
                                          cells.begin() + static_cast<std::ptrdiff_t>((x + 1) * ky));
            const Pmf qrow = apply_univariate(cond_spec, CountVector::from_counts(row));
            for (std::size_t y = 0; y < ky; ++y) qflat[x * ky + y] = px[x] * qrow[y];
        }
        total += w * loss.evaluate(p.flat(), qflat);
    });
    return total;
}

}  // namespace

TEST_CASE("exact_risk_univariate: frozen cases") {
    // empirical, l2^2, Bernoulli(1/2), n = 2: 3-outcome enumeration gives 1/4
    const double r = exact_risk_univariate(EstimatorSpec::empirical(), LossSpec::lp(2.0),
                                           Pmf::from_weights({0.5, 0.5}), 2)
                         .mean;
    REQUIRE(r == Catch::Approx(0.25).epsilon(1e-12));

    // point-mass truth with empirical estimate: always exact
    const RiskEstimate zero = exact_risk_univariate(EstimatorSpec::empirical(), LossSpec::lp(1.0),
                                                    Pmf::point_mass(2, 0), 5);
    REQUIRE(zero.mean == 0.0);
    REQUIRE(zero.std_error == 0.0);

    // the l2^2 minimax rule is an equalizer: risk (1 - 1/k)/(1 + sqrt(n))^2 for every p
    for (double p0 : {0.1, 0.3, 0.5}) {
        const double v = exact_risk_univariate(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0),
                                               Pmf::from_weights({p0, 1.0 - p0}), 4)
                             .mean;
        REQUIRE(v == Catch::Approx(1.0 / 18.0).epsilon(1e-12));
    }

    REQUIRE_THROWS_AS(exact_risk_univariate(EstimatorSpec::empirical(), LossSpec::lp(2.0),
                                            Pmf::uniform(3), 10000),
                      EnumerationTooLarge);
}

TEST_CASE("exact risk of empirical under l2^2 is non-increasing in n") {
    const Pmf p = Pmf::from_weights({0.3, 0.7});
    double prev = std::numeric_limits<double>::infinity();
    for (std::int64_t n = 1; n <= 8; ++n) {
        const double r = exact_risk_univariate(EstimatorSpec::empirical(), LossSpec::lp(2.0), p, n).mean;
        REQUIRE(r <= prev + 1e-15);
        prev = r;
    }
}

TEST_CASE("mc_risk_univariate agrees with the oracle and is deterministic") {
    const Pmf p = Pmf::from_weights({0.5, 0.5});
    const RiskEstimate mc = mc_risk_univariate(EstimatorSpec::empirical(), LossSpec::lp(2.0), p, 2,
                                               100000, 4242);
    REQUIRE(std::abs(mc.mean - 0.25) <= 4.0 * mc.std_error);

    const RiskEstimate again = mc_risk_univariate(EstimatorSpec::empirical(), LossSpec::lp(2.0), p, 2,
                                                  100000, 4242);
    REQUIRE(mc.mean == again.mean);  // bitwise
    REQUIRE(mc.std_error == again.std_error);

    const RiskEstimate dirac = mc_risk_univariate(EstimatorSpec::empirical(), LossSpec::lp(1.0),
                                                  Pmf::point_mass(2, 1), 3, 1000, 7);
    REQUIRE(dirac.mean == 0.0);
    REQUIRE(dirac.std_error == 0.0);

    REQUIRE_THROWS_AS(mc_risk_univariate(EstimatorSpec::empirical(), LossSpec::lp(2.0), p, 2, 1, 1),
                      ConfigError);
}

TEST_CASE("mc risks are bitwise independent of the worker count") {
    const JointPmf p = JointPmf::uniform(2, 2);
    const RiskEstimate one = mc_risk_semisupervised(EstimatorSpec::minimax_l2(),
                                                    EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), p,
                                                    20, 50, 5000, 99, true, std::nullopt, 1);
    for (int workers : {2, 3, 7}) {
        const RiskEstimate multi = mc_risk_semisupervised(EstimatorSpec::minimax_l2(),
                                                          EstimatorSpec::minimax_l2(), LossSpec::lp(2.0),
                                                          p, 20, 50, 5000, 99, true, std::nullopt,
                                                          workers);
        REQUIRE(one.mean == multi.mean);
        REQUIRE(one.std_error == multi.std_error);
    }
}

TEST_CASE("oracle equivalence at unit scale") {
    SplitMix64 rng(246);
    struct Combo {
        EstimatorSpec spec;
        LossSpec loss;
    };
    const std::vector<Combo> combos{
        {EstimatorSpec::empirical(), LossSpec::lp(1.0)},
        {EstimatorSpec::add_constant(1.0), LossSpec::fdiv(builtin_generator(Divergence::kl))},
        {EstimatorSpec::minimax_l2(), LossSpec::lp(2.0)},
        {EstimatorSpec::minimax_l2(), LossSpec::fdiv(builtin_generator(Divergence::chi2))},
    };
    for (const auto& combo : combos) {
        for (int rep = 0; rep < 5; ++rep) {
            const int k = 2 + static_cast<int>(rng.next_u64() % 2);
            std::vector<double> w(static_cast<std::size_t>(k));
            for (double& v : w) v = 0.05 + rng.next_double();
            const Pmf p = Pmf::from_weights(std::move(w), Normalize::on);
            const std::int64_t n = 2 + static_cast<std::int64_t>(rng.next_u64() % 4);
            const double exact = exact_risk_univariate(combo.spec, combo.loss, p, n).mean;
            const RiskEstimate mc = mc_risk_univariate(combo.spec, combo.loss, p, n, 40000,
                                                       rng.next_u64());
            REQUIRE(std::abs(mc.mean - exact) <= 4.0 * mc.std_error);
        }
    }
}

TEST_CASE("mc_risk_semisupervised against the brute-force enumeration oracle") {
    std::vector<double> table{0.30, 0.20, 0.15, 0.35};
    const JointPmf p = JointPmf::from_table(std::move(table), 2, 2);

    SECTION("pooled, smoothed estimators, l2^2") {
        const double exact = brute_force_semisup_risk(EstimatorSpec::minimax_l2(),
                                                      EstimatorSpec::add_constant(1.0),
                                                      LossSpec::lp(2.0), p, 4, 4, true);
        const RiskEstimate mc = mc_risk_semisupervised(EstimatorSpec::minimax_l2(),
                                                       EstimatorSpec::add_constant(1.0),
                                                       LossSpec::lp(2.0), p, 4, 4, 200000, 1234, true);
        REQUIRE(std::abs(mc.mean - exact) <= 4.0 * mc.std_error);
    }
    SECTION("unpooled, KL") {
        const LossSpec kl = LossSpec::fdiv(builtin_generator(Divergence::kl));
        const double exact = brute_force_semisup_risk(EstimatorSpec::add_constant(1.0),
                                                      EstimatorSpec::add_constant(1.0), kl, p, 3, 5,
                                                      false);
        const RiskEstimate mc = mc_risk_semisupervised(EstimatorSpec::add_constant(1.0),
                                                       EstimatorSpec::add_constant(1.0), kl, p, 3, 5,
                                                       200000, 777, false);
        REQUIRE(std::abs(mc.mean - exact) <= 4.0 * mc.std_error);
    }
    SECTION("l1 with empirical marginal") {
        const double exact = brute_force_semisup_risk(EstimatorSpec::empirical(),
                                                      EstimatorSpec::add_constant(1.0),
                                                      LossSpec::lp(1.0), p, 4, 3, true);
        const RiskEstimate mc = mc_risk_semisupervised(EstimatorSpec::empirical(),
                                                       EstimatorSpec::add_constant(1.0),
                                                       LossSpec::lp(1.0), p, 4, 3, 200000, 31, true);
        REQUIRE(std::abs(mc.mean - exact) <= 4.0 * mc.std_error);
    }
}

TEST_CASE("mc_risk_conditional against its enumeration oracle") {
    const JointPmf p = JointPmf::uniform(2, 2);
    const double exact =
        brute_force_conditional_risk(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), p, 6);
    const RiskEstimate mc = mc_risk_conditional(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), p, 6,
                                                200000, 555);
    REQUIRE(std::abs(mc.mean - exact) <= 4.0 * mc.std_error);
}

TEST_CASE("mc_risk_semisupervised risk decays as datasets grow") {
    const JointPmf p = JointPmf::uniform(2, 2);
    const RiskEstimate coarse = mc_risk_semisupervised(EstimatorSpec::minimax_l2(),
                                                       EstimatorSpec::minimax_l2(), LossSpec::lp(2.0),
                                                       p, 40, 80, 4000, 11);
    const RiskEstimate fine = mc_risk_semisupervised(EstimatorSpec::minimax_l2(),
                                                     EstimatorSpec::minimax_l2(), LossSpec::lp(2.0),
                                                     p, 400, 800, 4000, 12);
    REQUIRE(fine.mean + 4.0 * std::hypot(fine.std_error, coarse.std_error) < coarse.mean);
    REQUIRE(fine.mean < 0.005);
}

TEST_CASE("mc_risk_semisupervised error paths") {
    const JointPmf p = JointPmf::uniform(2, 2);
    // zero labeled samples with an empirical conditional: no zero-sample output
    REQUIRE_THROWS_AS(mc_risk_semisupervised(EstimatorSpec::minimax_l2(), EstimatorSpec::empirical(),
                                             LossSpec::lp(2.0), p, 0, 10, 100, 1),
                      EmptySampleNoPrior);

    // declared simplex floor above the smallest joint entry
    std::vector<double> skewed{0.005, 0.495, 0.25, 0.25};
    const JointPmf sk = JointPmf::from_table(std::move(skewed), 2, 2);
    REQUIRE_THROWS_AS(mc_risk_semisupervised(EstimatorSpec::add_constant(1.0),
                                             EstimatorSpec::add_constant(1.0),
                                             LossSpec::fdiv(builtin_generator(Divergence::kl)), sk, 5,
                                             5, 100, 1, true, SimplexConstraint{0.01}),
                      ConstraintViolated);
}

TEST_CASE("worst_case_risk") {
    SearchConfig cfg;
    cfg.grid_resolution = 50;
    cfg.refine_iterations = 20;

    SECTION("constant risk function") {
        auto flat = [](const Pmf&) {
            RiskEstimate r;
            r.mean = 3.25;
            return r;
        };
        const WorstCase wc = worst_case_risk(flat, 2, cfg);
        REQUIRE(wc.value.mean == 3.25);
    }

    SECTION("equalizer: search value matches the exact oracle everywhere") {
        auto risk = [](const Pmf& p) {
            return exact_risk_univariate(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), p, 4);
        };
        const WorstCase wc = worst_case_risk(risk, 2, cfg);
        REQUIRE(wc.value.mean == Catch::Approx(1.0 / 18.0).epsilon(1e-9));
    }

    SECTION("l1 empirical at n=100 peaks at the uniform distribution") {
        auto risk = [](const Pmf& p) {
            return exact_risk_univariate(EstimatorSpec::empirical(), LossSpec::lp(1.0), p, 100);
        };
        const WorstCase wc = worst_case_risk(risk, 2, cfg);
        REQUIRE(std::abs(wc.argmax[0] - 0.5) <= 1.0 / 50.0);
    }

    SECTION("joint form searches the flattened table simplex") {
        SearchConfig small = cfg;
        small.grid_resolution = 8;
        small.refine_iterations = 10;
        auto mass_on_corner = [](const JointPmf& j) {
            RiskEstimate r;
            r.mean = j.at(0, 0);
            return r;
        };
        const JointWorstCase wc = worst_case_risk(mass_on_corner, 2, 2, small);
        REQUIRE(wc.value.mean == Catch::Approx(1.0).margin(1e-9));
        REQUIRE(wc.argmax.at(0, 0) == Catch::Approx(1.0).margin(1e-9));
    }

    SECTION("delta floor is honored") {
        SearchConfig floored = cfg;
        floored.constraint = SimplexConstraint{0.2};
        auto corner_seeking = [](const Pmf& p) {
            RiskEstimate r;
            r.mean = p[0];
            return r;
        };
        const WorstCase wc = worst_case_risk(corner_seeking, 2, floored);
        REQUIRE(wc.argmax[0] <= 0.8 + 1e-12);
        REQUIRE(wc.value.mean == Catch::Approx(0.8).margin(1e-9));
    }
}

TEST_CASE("calibrate_constant") {
    const std::vector<std::int64_t> sizes{2500, 5000, 10000};

    SECTION("l2^2 equalizer: closed form (1 - 1/k) n / (1 + sqrt n)^2") {
        const RiskConstant c =
            calibrate_constant(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), 2, sizes);
        REQUIRE(c.C == Catch::Approx(0.5 * 10000.0 / (101.0 * 101.0)).epsilon(1e-8));
        REQUIRE(std::abs(c.C / 0.5 - 1.0) <= 0.02);
        REQUIRE(c.provenance == RiskConstant::Provenance::calibrated);
    }

    SECTION("KL with add-one converges to the f-divergence formula constant") {
        const LossSpec kl = LossSpec::fdiv(builtin_generator(Divergence::kl));
        const RiskConstant c = calibrate_constant(EstimatorSpec::add_constant(1.0), kl, 2, sizes);
        const RiskConstant formula = fdiv_constant_formula(builtin_generator(Divergence::kl), 2);
        REQUIRE(formula.C == 0.5);
        REQUIRE(std::abs(c.C / formula.C - 1.0) < 0.005);
        // approach from below, tightening with n
        const RiskConstant c_small = calibrate_constant(EstimatorSpec::add_constant(1.0), kl, 2,
                                                        std::vector<std::int64_t>{625, 1250, 2500});
        REQUIRE(std::abs(c.C - formula.C) < std::abs(c_small.C - formula.C));
    }

    SECTION("l1 empirical approaches sqrt(2/pi)") {
        const RiskConstant c = calibrate_constant(EstimatorSpec::empirical(), LossSpec::lp(1.0), 2, sizes);
        REQUIRE(c.C == Catch::Approx(std::sqrt(2.0 / M_PI)).margin(2e-4));
    }

    SECTION("monte carlo path agrees with exact path") {
        const std::vector<std::int64_t> small{50, 100, 200};
        const RiskConstant exact =
            calibrate_constant(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), 2, small);
        const RiskConstant mc =
            calibrate_constant(EstimatorSpec::minimax_l2(), LossSpec::lp(2.0), 2, small, 200000, 10);
        REQUIRE(mc.C == Catch::Approx(exact.C).epsilon(0.02));
    }

    SECTION("input validation") {
        const std::vector<std::int64_t> two{10, 20};
        REQUIRE_THROWS_AS(calibrate_constant(EstimatorSpec::empirical(), LossSpec::lp(1.0), 2, two),
                          ConfigError);
        const std::vector<std::int64_t> unsorted{10, 5, 20};
        REQUIRE_THROWS_AS(calibrate_constant(EstimatorSpec::empirical(), LossSpec::lp(1.0), 2, unsorted),
                          ConfigError);
    }
}
