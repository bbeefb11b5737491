// semisup — estimate discrete joint pmfs from labeled + unlabeled samples and
// run minimax risk experiments against their first-order predictions.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semisup/bounds.hpp"
#include "semisup/errors.hpp"
#include "semisup/estimators.hpp"
#include "semisup/io.hpp"
#include "semisup/losses.hpp"
#include "semisup/pmf.hpp"
#include "semisup/risk.hpp"
#include "semisup/verify.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalFlags {
    std::uint64_t seed = 1;
    std::int64_t trials = 0;  // 0 = per-command default
    double delta = 0.01;
    std::string out;
    bool csv = false;
    bool json = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw semisup::ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw semisup::ConfigError("cannot write '" + path + "'");
    out << content;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string input;
    int k_x = 0;
    int k_y = 0;
    std::string marginal = "empirical";
    std::string conditional = "add_constant:1";
    bool pool_x = true;
};

int cmd_estimate(const GlobalFlags& g, const EstimateArgs& a) {
    std::istringstream in(read_file(a.input));
    const semisup::ParsedSamples parsed = semisup::parse_sample_csv(in);

    int k_x = a.k_x > 0 ? a.k_x : parsed.max_x + 1;
    int k_y = a.k_y > 0 ? a.k_y : parsed.max_y + 1;
    if (k_x < 2 || k_y < 2) {
        throw semisup::ConfigError(
            "alphabet sizes could not be inferred from the input; pass --kx and --ky");
    }
    const semisup::SampleSet s = semisup::SampleSet::create(parsed.labeled, parsed.unlabeled, k_x, k_y);

    const semisup::EstimatorSpec marg_spec = semisup::parse_estimator(a.marginal);
    const semisup::EstimatorSpec cond_spec = semisup::parse_estimator(a.conditional);

    std::vector<int> xs(s.unlabeled);
    if (a.pool_x) {
        for (const auto& [x, y] : s.labeled) xs.push_back(x);
    }
    const semisup::Pmf marginal =
        semisup::apply_univariate(marg_spec, semisup::counts_from_samples(xs, k_x));
    const semisup::ConditionalPmf conditional = semisup::conditional_composition(cond_spec, s);
    const semisup::JointPmf joint = semisup::joint_from_parts(marginal, conditional);

    std::cout << "m = " << s.m() << " labeled, n = " << s.n() << " unlabeled, alphabet " << k_x << " x "
              << k_y << "\n";
    std::cout << "marginal (" << marg_spec.describe() << "):";
    for (std::size_t x = 0; x < marginal.size(); ++x) std::cout << " " << marginal[x];
    std::cout << "\n";
    std::cout << "conditional rows (" << cond_spec.describe() << "):\n";
    for (std::size_t x = 0; x < conditional.k_x(); ++x) {
        std::cout << "  x=" << x << ":";
        for (std::size_t y = 0; y < conditional.k_y(); ++y) std::cout << " " << conditional.row(x)[y];
        std::cout << "\n";
    }

    const nlohmann::json j = semisup::joint_estimate_to_json(joint, marginal, conditional);
    if (!g.out.empty()) {
        write_file(g.out, j.dump(2) + "\n");
        std::cout << "joint estimate written to " << g.out << "\n";
    } else {
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config;
};

int cmd_sweep(const GlobalFlags& g, const SweepArgs& a, bool seed_given, bool trials_given,
              bool delta_given) {
    std::istringstream in(read_file(a.config));
    semisup::ExperimentConfig cfg = semisup::parse_experiment_config(in);
    if (seed_given) cfg.seed = g.seed;
    if (trials_given) cfg.trials = g.trials;
    if (delta_given) cfg.delta = g.delta;
    if (cfg.trials < 100) throw semisup::ConfigError("trials must be >= 100");

    if (!g.out.empty()) {
        cfg.out_csv = g.out + ".csv";
        cfg.out_json = g.out + ".json";
    }
    if (cfg.out_csv.empty()) cfg.out_csv = "sweep.csv";
    if (cfg.out_json.empty()) cfg.out_json = "sweep.json";

    // The sweep measures risk at the uniform joint, the first-order worst
    // case for every loss covered here.
    const semisup::JointPmf p = semisup::JointPmf::uniform(static_cast<std::size_t>(cfg.k_x),
                                                           static_cast<std::size_t>(cfg.k_y));
    semisup::RiskConstant constant =
        cfg.loss.is_lp()
            ? semisup::calibrate_constant(cfg.cond_estimator, cfg.loss, cfg.k_y,
                                          semisup::default_calibration_sizes(cfg.k_y))
            : semisup::fdiv_constant_formula(*cfg.loss.gen, cfg.k_y);

    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream csv;
    csv << "m,n,loss,risk_mc,risk_se,risk_theory,ratio\n";
    nlohmann::json records = nlohmann::json::array();
    for (std::size_t i = 0; i < cfg.m_list.size(); ++i) {
        const std::int64_t m = cfg.m_list[i];
        const std::int64_t n = cfg.n_list[i];
        const semisup::RiskEstimate r = semisup::mc_risk_semisupervised(
            cfg.marginal_estimator, cfg.cond_estimator, cfg.loss, p, m, n, cfg.trials,
            semisup::SplitMix64::substream_seed(cfg.seed, i), cfg.pool_x,
            semisup::SimplexConstraint{cfg.loss.is_lp() ? 0.0 : cfg.delta});
        const double theory = semisup::predicted_risk(cfg.loss, cfg.k_x, cfg.k_y, m, constant);
        const double ratio = theory > 0.0 ? r.mean / theory : 0.0;
        csv << m << "," << n << "," << cfg.loss_string << "," << semisup::format_double(r.mean) << ","
            << semisup::format_double(r.std_error) << "," << semisup::format_double(theory) << ","
            << semisup::format_double(ratio) << "\n";
        records.push_back({{"m", m},
                           {"n", n},
                           {"loss", cfg.loss_string},
                           {"risk_mc", r.mean},
                           {"risk_se", r.std_error},
                           {"risk_theory", theory},
                           {"ratio", ratio}});
        std::cout << "m=" << m << " n=" << n << " risk=" << r.mean << " +- " << r.std_error
                  << "  theory=" << theory << "  ratio=" << ratio << "\n";
    }

    nlohmann::json j;
    j["config"] = {{"loss", cfg.loss_string},
                   {"k_x", cfg.k_x},
                   {"k_y", cfg.k_y},
                   {"m_list", cfg.m_list},
                   {"n_list", cfg.n_list},
                   {"trials", cfg.trials},
                   {"seed", cfg.seed},
                   {"delta", cfg.delta},
                   {"marginal_estimator", cfg.marginal_estimator_string},
                   {"cond_estimator", cfg.cond_estimator_string},
                   {"pool_x", cfg.pool_x}};
    j["constant"] = {{"C", constant.C},
                     {"provenance", constant.provenance == semisup::RiskConstant::Provenance::calibrated
                                        ? "calibrated"
                                        : "closed_form"}};
    j["records"] = std::move(records);
    j["version"] = kVersion;
    j["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_file(cfg.out_csv, csv.str());
    write_file(cfg.out_json, j.dump(2) + "\n");
    std::cout << "results written to " << cfg.out_csv << " and " << cfg.out_json << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(const GlobalFlags& g, const std::string& suite, bool seed_given) {
    semisup::VerifyOptions opts;
    if (g.trials > 0) opts.trials = g.trials;
    if (seed_given) opts.seed = g.seed;
    opts.delta = g.delta;
    const auto results = semisup::run_verify_suite(suite, opts);
    if (g.json) {
        bool all_pass = true;
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& r : results) {
            all_pass = all_pass && r.pass;
            checks.push_back({{"criterion", r.criterion},
                              {"name", r.name},
                              {"measured", r.measured},
                              {"target", r.target},
                              {"pass", r.pass},
                              {"detail", r.detail},
                              {"seconds", r.seconds}});
        }
        const nlohmann::json j{{"suite", suite}, {"checks", checks}, {"all_pass", all_pass}};
        std::cout << j.dump(2) << "\n";
        return all_pass ? 0 : 1;
    }
    const bool all_pass = semisup::print_check_results(std::cout, results);
    std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

struct BoundsArgs {
    int n = 2000;
    double p = 1.5;
    std::vector<double> xs{0.1, 0.3, 0.5, 0.9};
    int k = 2;
    std::string estimator;  // empty = default for the exponent
    int crossover = 40;
};

int cmd_bounds(const GlobalFlags& g, const BoundsArgs& a) {
    if (a.n < 1 || a.p < 1.0 || a.p > 2.0 || a.k < 2 || a.crossover < 1) {
        throw semisup::ConfigError("bounds: need n >= 1, p in [1,2], k >= 2, crossover >= 1");
    }
    for (double x : a.xs) {
        if (x < 0.0 || x > 1.0) throw semisup::ConfigError("bounds: x values must be in [0, 1]");
    }
    const semisup::LossSpec loss = semisup::LossSpec::lp(a.p);
    const semisup::EstimatorSpec spec = a.estimator.empty() ? semisup::default_estimator_for(loss)
                                                            : semisup::parse_estimator(a.estimator);
    const int crossover = std::min(a.crossover, a.n);
    const semisup::RiskTable table = semisup::build_risk_table(spec, loss, a.k, a.n, crossover);
    if (!table.warning.empty()) std::cerr << "note: " << table.warning << "\n";

    std::ostringstream csv;
    csv << "h_np,g_np,gap_ratio,prediction\n";
    std::ostringstream human;
    human << std::setw(8) << "x" << std::setw(16) << "h_np" << std::setw(16) << "g_np" << std::setw(14)
          << "gap_ratio" << std::setw(16) << "prediction" << "\n";
    for (double x : a.xs) {
        const double h = semisup::H_np(x, a.n, a.p, table);
        const double gg = semisup::G_np(x, a.n, a.p, table);
        const double gap = h > 0.0 ? std::abs(h - gg) / h : 0.0;
        const double prediction =
            table.constant * std::pow(x / static_cast<double>(a.n), a.p / 2.0);
        csv << semisup::format_double(h) << "," << semisup::format_double(gg) << ","
            << semisup::format_double(gap) << "," << semisup::format_double(prediction) << "\n";
        human << std::setw(8) << x << std::setw(16) << h << std::setw(16) << gg << std::setw(14) << gap
              << std::setw(16) << prediction << "\n";
    }

    if (g.csv) {
        if (!g.out.empty()) {
            write_file(g.out, csv.str());
            std::cout << "written to " << g.out << "\n";
        } else {
            std::cout << csv.str();
        }
        return 0;
    }

    std::cout << "risk table: " << spec.describe() << ", p=" << a.p << ", k=" << a.k << ", n=" << a.n
              << ", crossover=" << crossover << ", C=" << table.constant << "\n";
    std::cout << human.str();

    // Bernstein diagnostics for f(t) = t^{p/2}, the function behind the
    // H-to-prediction convergence.
    std::cout << "\nBernstein check, f(t) = t^{" << a.p / 2.0 << "}:\n";
    std::vector<double> fvals(static_cast<std::size_t>(a.n) + 1);
    for (int i = 0; i <= a.n; ++i) {
        fvals[static_cast<std::size_t>(i)] =
            std::pow(static_cast<double>(i) / static_cast<double>(a.n), a.p / 2.0);
    }
    for (double x : a.xs) {
        if (x == 0.0 || x == 1.0) continue;
        const double bn = semisup::bernstein_poly(fvals, x);
        const double fx = std::pow(x, a.p / 2.0);
        const double limit =
            x * (1.0 - x) * (a.p / 2.0) * (a.p / 2.0 - 1.0) * std::pow(x, a.p / 2.0 - 2.0) / 2.0;
        std::cout << "  x=" << x << "  n(B_n - f)=" << a.n * (bn - fx) << "  limit=" << limit << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semi-supervised discrete joint pmf estimation and minimax risk experiments"};
    app.require_subcommand(1);

    GlobalFlags g;
    auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (default 1)");
    auto* trials_opt = app.add_option("--trials", g.trials, "Monte Carlo trials");
    auto* delta_opt = app.add_option("--delta", g.delta, "simplex floor for f-divergence runs");
    app.add_option("--out", g.out, "output path (or path stem for sweep)");
    app.add_flag("--csv", g.csv, "machine-readable CSV output");
    app.add_flag("--json", g.json, "JSON output where applicable");

    EstimateArgs est;
    auto* est_cmd = app.add_subcommand("estimate", "estimate a joint pmf from a sample CSV");
    est_cmd->fallthrough();
    est_cmd->add_option("--input", est.input, "sample CSV (header x,y; empty y = unlabeled)")
        ->required();
    est_cmd->add_option("--kx", est.k_x, "X alphabet size (default: inferred)");
    est_cmd->add_option("--ky", est.k_y, "Y alphabet size (default: inferred)");
    est_cmd->add_option("--marginal", est.marginal, "marginal estimator (default empirical)");
    est_cmd->add_option("--conditional", est.conditional, "conditional estimator (default add_constant:1)");
    est_cmd->add_option("--pool-x", est.pool_x, "pool labeled x's into the marginal (default 1)");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "risk sweep over (m, n) pairs from a config file");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--config", sweep.config, "experiment config file")->required();

    std::string suite;
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    verify_cmd->fallthrough();
    verify_cmd->add_option("suite", suite, "one of: lp, fdiv, bounds, all")->required();

    BoundsArgs bounds;
    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate H/G sums, predictions and diagnostics");
    bounds_cmd->fallthrough();
    bounds_cmd->add_option("--n", bounds.n, "sample-size parameter of the sums (default 2000)");
    bounds_cmd->add_option("--p", bounds.p, "loss exponent in [1, 2] (default 1.5)");
    bounds_cmd->add_option("--x", bounds.xs, "evaluation points in [0, 1]");
    bounds_cmd->add_option("--k", bounds.k, "alphabet size of the risk table (default 2)");
    bounds_cmd->add_option("--estimator", bounds.estimator, "risk-table estimator (default per loss)");
    bounds_cmd->add_option("--crossover", bounds.crossover, "exact/asymptotic table crossover (default 40)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (est_cmd->parsed()) return cmd_estimate(g, est);
        if (sweep_cmd->parsed())
            return cmd_sweep(g, sweep, seed_opt->count() > 0, trials_opt->count() > 0,
                             delta_opt->count() > 0);
        if (verify_cmd->parsed()) return cmd_verify(g, suite, seed_opt->count() > 0);
        if (bounds_cmd->parsed()) return cmd_bounds(g, bounds);
    } catch (const semisup::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const semisup::UnknownGenerator& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const semisup::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const semisup::Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
