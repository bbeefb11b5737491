#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semisup/errors.hpp"
#include "semisup/pmf.hpp"
#include "semisup/samples.hpp"

namespace semisup {

/*
Univariate estimator family mapping counts T over k symbols to a pmf:

    empirical        T_x / n
    add_constant(b)  (T_x + b) / (n + k b)
    minimax_l2       (T_x + sqrt(n)/k) / (n + sqrt(n))

minimax_l2 is the classical l2^2 minimax (equalizer) rule. With zero samples,
add_constant(b > 0) and minimax_l2 output the uniform distribution; empirical
(and add_constant(0)) has no zero-sample answer and raises EmptySampleNoPrior.
*/
struct EstimatorSpec {
    enum class Kind { empirical, add_constant, minimax_l2 };

    Kind kind = Kind::empirical;
    double beta = 0.0;

    static EstimatorSpec empirical() { return {Kind::empirical, 0.0}; }
    static EstimatorSpec add_constant(double beta) {
        if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("add_constant: beta must be finite, >= 0");
        return {Kind::add_constant, beta};
    }
    static EstimatorSpec minimax_l2() { return {Kind::minimax_l2, 0.0}; }

    std::string describe() const {
        switch (kind) {
            case Kind::empirical: return "empirical";
            case Kind::add_constant: return "add_constant:" + std::to_string(beta);
            case Kind::minimax_l2: return "minimax_l2";
        }
        return "?";
    }
};

/// Unvalidated kernel shared by the typed API and the Monte Carlo hot loops.
/// `out` must have counts.size() entries.
inline void apply_univariate_into(const EstimatorSpec& spec, std::span<const std::int64_t> counts,
                                  std::int64_t total, std::span<double> out) {
    const std::size_t k = counts.size();
    const double kd = static_cast<double>(k);
    switch (spec.kind) {
        case EstimatorSpec::Kind::empirical:
            if (total == 0) throw EmptySampleNoPrior("empirical estimator with zero samples");
            for (std::size_t i = 0; i < k; ++i) out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
            return;
        case EstimatorSpec::Kind::add_constant: {
            if (total == 0 && spec.beta == 0.0) {
                throw EmptySampleNoPrior("add_constant(0) estimator with zero samples");
            }
            const double denom = static_cast<double>(total) + kd * spec.beta;
            for (std::size_t i = 0; i < k; ++i) out[i] = (static_cast<double>(counts[i]) + spec.beta) / denom;
            return;
        }
        case EstimatorSpec::Kind::minimax_l2: {
            if (total == 0) {
                for (std::size_t i = 0; i < k; ++i) out[i] = 1.0 / kd;
                return;
            }
            const double root = std::sqrt(static_cast<double>(total));
            const double denom = static_cast<double>(total) + root;
            for (std::size_t i = 0; i < k; ++i) {
                out[i] = (static_cast<double>(counts[i]) + root / kd) / denom;
            }
            return;
        }
    }
}

inline Pmf apply_univariate(const EstimatorSpec& spec, const CountVector& counts) {
    std::vector<double> w(counts.counts.size());
    apply_univariate_into(spec, counts.counts, counts.total, w);
    return Pmf::from_weights(std::move(w));
}

/// Row x = the univariate rule applied to the y-counts of bucket x; empty
/// buckets get the rule's zero-sample output.
inline ConditionalPmf conditional_composition(const EstimatorSpec& spec, const SampleSet& s) {
    std::vector<std::vector<int>> buckets = split_labeled_by_x(s);
    std::vector<Pmf> rows;
    rows.reserve(buckets.size());
    for (const auto& bucket : buckets) {
        rows.push_back(apply_univariate(spec, counts_from_samples(bucket, s.k_y)));
    }
    return ConditionalPmf(std::move(rows));
}

/// q_XY(x, y) = q_X(x) * q_{Y|X=x}(y). The marginal is estimated from the
/// unlabeled x draws, pooled with the labeled x coordinates when pool_x is
/// set (the default; with m = o(n) the choice is first-order irrelevant and
/// pooling dominates at finite samples).
inline JointPmf joint_composition(const EstimatorSpec& marginal_spec, const EstimatorSpec& cond_spec,
                                  const SampleSet& s, bool pool_x = true) {
    std::vector<int> xs(s.unlabeled);
    if (pool_x) {
        xs.reserve(xs.size() + s.labeled.size());
        for (const auto& [x, y] : s.labeled) xs.push_back(x);
    }
    const Pmf marginal = apply_univariate(marginal_spec, counts_from_samples(xs, s.k_x));
    const ConditionalPmf conditional = conditional_composition(cond_spec, s);
    return joint_from_parts(marginal, conditional);
}

}  // namespace semisup
