#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semisup/errors.hpp"
#include "semisup/pmf.hpp"
#include "semisup/rng.hpp"

namespace semisup {

/// Non-negative per-symbol counts with their total.
struct CountVector {
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    static CountVector from_counts(std::vector<std::int64_t> c) {
        CountVector cv;
        cv.total = 0;
        for (std::int64_t v : c) {
            if (v < 0) throw NegativeWeight("CountVector: negative count");
            cv.total += v;
        }
        cv.counts = std::move(c);
        return cv;
    }
};

/// m labeled (x, y) pairs plus n unlabeled x draws over fixed alphabets.
struct SampleSet {
    std::vector<std::pair<int, int>> labeled;
    std::vector<int> unlabeled;
    int k_x = 0;
    int k_y = 0;

    static SampleSet create(std::vector<std::pair<int, int>> labeled, std::vector<int> unlabeled,
                            int k_x, int k_y) {
        if (k_x < 2 || k_y < 2) throw DimensionMismatch("SampleSet: alphabets must have k >= 2");
        for (const auto& [x, y] : labeled) {
            if (x < 0 || x >= k_x || y < 0 || y >= k_y) {
                throw SymbolOutOfRange("SampleSet: labeled pair (" + std::to_string(x) + "," +
                                       std::to_string(y) + ") outside " + std::to_string(k_x) + "x" +
                                       std::to_string(k_y));
            }
        }
        for (int x : unlabeled) {
            if (x < 0 || x >= k_x) throw SymbolOutOfRange("SampleSet: unlabeled symbol " + std::to_string(x));
        }
        return SampleSet{std::move(labeled), std::move(unlabeled), k_x, k_y};
    }

    std::size_t m() const { return labeled.size(); }
    std::size_t n() const { return unlabeled.size(); }
};

inline CountVector counts_from_samples(std::span<const int> samples, int k) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(k), 0);
    for (int s : samples) {
        if (s < 0 || s >= k) throw SymbolOutOfRange("counts_from_samples: symbol " + std::to_string(s));
        ++c[static_cast<std::size_t>(s)];
    }
    CountVector cv;
    cv.counts = std::move(c);
    cv.total = static_cast<std::int64_t>(samples.size());
    return cv;
}

/// Bucket x holds the y-values of labeled pairs with first coordinate x, in
/// input order.
inline std::vector<std::vector<int>> split_labeled_by_x(const SampleSet& s) {
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(s.k_x));
    for (const auto& [x, y] : s.labeled) buckets[static_cast<std::size_t>(x)].push_back(y);
    return buckets;
}

/// Inverse-CDF sampler for a fixed categorical distribution.
class CategoricalSampler {
public:
    explicit CategoricalSampler(std::span<const double> weights) {
        cdf_.reserve(weights.size());
        double acc = 0.0;
        for (double w : weights) {
            acc += w;
            cdf_.push_back(acc);
        }
        cdf_.back() = 1.0;  // guard against accumulated rounding
    }

    int draw(SplitMix64& rng) const {
        const double u = rng.next_double();
        // k is small everywhere in this library; linear scan
        int i = 0;
        const int last = static_cast<int>(cdf_.size()) - 1;
        while (i < last && u >= cdf_[static_cast<std::size_t>(i)]) ++i;
        return i;
    }

private:
    std::vector<double> cdf_;
};

/// n i.i.d. draws from p via inverse CDF on SplitMix64(seed).
inline std::vector<int> sample_marginal(const Pmf& p, std::size_t n, std::uint64_t seed) {
    CategoricalSampler sampler(p.weights());
    SplitMix64 rng(seed);
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sampler.draw(rng);
    return out;
}

/// m i.i.d. (x, y) draws from the joint via inverse CDF on the flattened table.
inline std::vector<std::pair<int, int>> sample_joint(const JointPmf& p, std::size_t m, std::uint64_t seed) {
    CategoricalSampler sampler(p.flat());
    SplitMix64 rng(seed);
    const int ky = static_cast<int>(p.k_y());
    std::vector<std::pair<int, int>> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        const int cell = sampler.draw(rng);
        out[i] = {cell / ky, cell % ky};
    }
    return out;
}

}  // namespace semisup
