#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semisup/errors.hpp"
#include "semisup/estimators.hpp"
#include "semisup/losses.hpp"
#include "semisup/pmf.hpp"

namespace semisup {

// ---------------------------------------------------------------------------
// Sample CSV: header "x,y"; labeled rows "x,y", unlabeled rows leave y empty.
// ---------------------------------------------------------------------------

struct ParsedSamples {
    std::vector<std::pair<int, int>> labeled;
    std::vector<int> unlabeled;
    int max_x = -1;
    int max_y = -1;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
    return s;
}

inline int parse_symbol(const std::string& field, std::size_t line_no) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(field, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + field + "' is not an integer");
    }
    if (pos != field.size() || v < 0) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + field +
                         "' is not a non-negative integer symbol");
    }
    return v;
}

}  // namespace detail

inline ParsedSamples parse_sample_csv(std::istream& in) {
    ParsedSamples out;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != "x,y") {
                throw ParseError("line " + std::to_string(line_no) + ": expected header 'x,y', got '" +
                                 line + "'");
            }
            saw_header = true;
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 'x,y' or 'x,'");
        }
        const std::string xs = detail::trim(line.substr(0, comma));
        const std::string ys = detail::trim(line.substr(comma + 1));
        const int x = detail::parse_symbol(xs, line_no);
        out.max_x = std::max(out.max_x, x);
        if (ys.empty()) {
            out.unlabeled.push_back(x);
        } else {
            const int y = detail::parse_symbol(ys, line_no);
            out.max_y = std::max(out.max_y, y);
            out.labeled.emplace_back(x, y);
        }
    }
    if (!saw_header) throw ParseError("empty input: missing 'x,y' header");
    return out;
}

// ---------------------------------------------------------------------------
// Joint estimate JSON
// ---------------------------------------------------------------------------

inline nlohmann::json joint_estimate_to_json(const JointPmf& joint, const Pmf& marginal,
                                             const ConditionalPmf& conditional) {
    nlohmann::json j;
    j["k_x"] = joint.k_x();
    j["k_y"] = joint.k_y();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t x = 0; x < joint.k_x(); ++x) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t y = 0; y < joint.k_y(); ++y) row.push_back(joint.at(x, y));
        rows.push_back(std::move(row));
    }
    j["joint"] = std::move(rows);
    j["marginal"] = std::vector<double>(marginal.weights().begin(), marginal.weights().end());
    nlohmann::json cond = nlohmann::json::array();
    for (std::size_t x = 0; x < conditional.k_x(); ++x) {
        cond.push_back(std::vector<double>(conditional.row(x).weights().begin(),
                                           conditional.row(x).weights().end()));
    }
    j["conditional"] = std::move(cond);
    return j;
}

inline JointPmf joint_estimate_from_json(const nlohmann::json& j) {
    try {
        const std::size_t kx = j.at("k_x").get<std::size_t>();
        const std::size_t ky = j.at("k_y").get<std::size_t>();
        std::vector<double> flat;
        flat.reserve(kx * ky);
        for (const auto& row : j.at("joint")) {
            for (const auto& v : row) flat.push_back(v.get<double>());
        }
        return JointPmf::from_table(std::move(flat), kx, ky);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("joint estimate JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Loss / estimator spec strings
// ---------------------------------------------------------------------------

/// "l1", "l2", "lp:<p>", or a built-in divergence name.
inline LossSpec parse_loss(const std::string& s) {
    if (s == "l1") return LossSpec::lp(1.0);
    if (s == "l2") return LossSpec::lp(2.0);
    if (s.rfind("lp:", 0) == 0) {
        try {
            return LossSpec::lp(std::stod(s.substr(3)));
        } catch (const std::exception&) {
            throw ConfigError("loss '" + s + "': bad exponent");
        }
    }
    try {
        return LossSpec::fdiv(builtin_generator(std::string_view(s)));
    } catch (const UnknownGenerator&) {
        throw ConfigError("loss '" + s + "': expected l1, l2, lp:<p>, kl, chi2, hellinger2 or lecam");
    }
}

/// "empirical", "add_constant:<beta>", or "minimax_l2".
inline EstimatorSpec parse_estimator(const std::string& s) {
    if (s == "empirical") return EstimatorSpec::empirical();
    if (s == "minimax_l2") return EstimatorSpec::minimax_l2();
    if (s.rfind("add_constant:", 0) == 0) {
        try {
            return EstimatorSpec::add_constant(std::stod(s.substr(13)));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("estimator '" + s + "': bad beta");
        }
    }
    throw ConfigError("estimator '" + s + "': expected empirical, add_constant:<beta> or minimax_l2");
}

/// The first-order-optimal default per loss: minimax_l2 for l2^2, empirical
/// for p in [1,2), add_constant(1) for f-divergences.
inline EstimatorSpec default_estimator_for(const LossSpec& loss) {
    if (loss.is_lp()) {
        return loss.exponent == 2.0 ? EstimatorSpec::minimax_l2() : EstimatorSpec::empirical();
    }
    return EstimatorSpec::add_constant(1.0);
}

// ---------------------------------------------------------------------------
// Experiment configuration: "key = value" lines mirroring the field names.
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::string loss_string = "l2";
    LossSpec loss = LossSpec::lp(2.0);
    int k_x = 0;
    int k_y = 0;
    std::vector<std::int64_t> m_list;
    std::vector<std::int64_t> n_list;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double delta = 0.01;
    std::string marginal_estimator_string;  // empty = default per loss
    std::string cond_estimator_string;
    EstimatorSpec marginal_estimator;
    EstimatorSpec cond_estimator;
    bool pool_x = true;
    std::string out_csv;
    std::string out_json;
};

namespace detail {

inline std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty entry in list '" + s + "'");
        out.push_back(std::stoll(item));
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

}  // namespace detail

/// Parse and validate; every violation is collected and reported in one
/// ConfigError rather than failing at the first problem.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::vector<std::string> problems;
    std::string line;
    std::size_t line_no = 0;
    bool saw_kx = false, saw_ky = false, saw_m = false, saw_n = false, saw_trials = false;

    auto complain = [&](const std::string& msg) {
        problems.push_back("line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            complain("expected 'key = value'");
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            if (key == "loss") {
                cfg.loss = parse_loss(value);
                cfg.loss_string = value;
            } else if (key == "k_x") {
                cfg.k_x = std::stoi(value);
                saw_kx = true;
            } else if (key == "k_y") {
                cfg.k_y = std::stoi(value);
                saw_ky = true;
            } else if (key == "m_list") {
                cfg.m_list = detail::parse_int_list(value);
                saw_m = true;
            } else if (key == "n_list") {
                cfg.n_list = detail::parse_int_list(value);
                saw_n = true;
            } else if (key == "trials") {
                cfg.trials = std::stoll(value);
                saw_trials = true;
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else if (key == "delta") {
                cfg.delta = std::stod(value);
            } else if (key == "marginal_estimator") {
                cfg.marginal_estimator_string = value;
            } else if (key == "cond_estimator") {
                cfg.cond_estimator_string = value;
            } else if (key == "pool_x") {
                if (value == "true" || value == "1") cfg.pool_x = true;
                else if (value == "false" || value == "0") cfg.pool_x = false;
                else complain("pool_x must be true/false");
            } else if (key == "out_csv") {
                cfg.out_csv = value;
            } else if (key == "out_json") {
                cfg.out_json = value;
            } else {
                complain("unknown key '" + key + "'");
            }
        } catch (const Error& e) {
            complain(e.what());
        } catch (const std::exception& e) {
            complain("value '" + value + "' for '" + key + "': " + e.what());
        }
    }

    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    };
    require(saw_kx && cfg.k_x >= 2, "k_x must be given and >= 2");
    require(saw_ky && cfg.k_y >= 2, "k_y must be given and >= 2");
    require(saw_m, "m_list must be given");
    require(saw_n, "n_list must be given");
    for (std::int64_t m : cfg.m_list) require(m > 0, "m_list entries must be positive");
    for (std::int64_t n : cfg.n_list) require(n > 0, "n_list entries must be positive");
    require(!saw_m || !saw_n || cfg.m_list.size() == cfg.n_list.size(),
            "m_list and n_list must pair up (equal lengths)");
    require(saw_trials && cfg.trials >= 100, "trials must be given and >= 100");
    require(cfg.delta >= 0.0 && (cfg.k_y < 2 || cfg.delta * cfg.k_y < 1.0), "need 0 <= delta*k_y < 1");

    try {
        cfg.marginal_estimator = cfg.marginal_estimator_string.empty()
                                     ? default_estimator_for(cfg.loss)
                                     : parse_estimator(cfg.marginal_estimator_string);
    } catch (const Error& e) {
        problems.push_back(e.what());
    }
    try {
        cfg.cond_estimator = cfg.cond_estimator_string.empty()
                                 ? default_estimator_for(cfg.loss)
                                 : parse_estimator(cfg.cond_estimator_string);
    } catch (const Error& e) {
        problems.push_back(e.what());
    }

    if (!problems.empty()) {
        std::string joined = "invalid experiment config:";
        for (const std::string& p : problems) joined += "\n  - " + p;
        throw ConfigError(joined);
    }
    if (cfg.marginal_estimator_string.empty()) cfg.marginal_estimator_string = cfg.marginal_estimator.describe();
    if (cfg.cond_estimator_string.empty()) cfg.cond_estimator_string = cfg.cond_estimator.describe();
    return cfg;
}

/// Fixed shortest-round-trip float formatting for deterministic CSV output.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace semisup
