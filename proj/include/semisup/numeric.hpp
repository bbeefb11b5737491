#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace semisup {

/// Cumulative log-factorial table: lf[i] = ln(i!).
inline std::vector<double> log_factorials(int n) {
    std::vector<double> lf(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 2; i <= n; ++i) {
        lf[static_cast<std::size_t>(i)] = lf[static_cast<std::size_t>(i) - 1] + std::log(static_cast<double>(i));
    }
    return lf;
}

inline double log_choose(const std::vector<double>& lf, int n, int i) {
    return lf[static_cast<std::size_t>(n)] - lf[static_cast<std::size_t>(i)] - lf[static_cast<std::size_t>(n - i)];
}

/// Pairwise summation; order-deterministic and cancellation-resistant.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 32) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Compensated accumulator for long fixed-order sums.
class KahanSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

/// Number of compositions of n into k non-negative parts, C(n+k-1, k-1),
/// computed in floating point (used only for feasibility checks).
inline double composition_count(std::int64_t n, int k) {
    double c = 1.0;
    for (int j = 1; j < k; ++j) {
        c *= static_cast<double>(n + j) / static_cast<double>(j);
    }
    return c;
}

/// Visit every count vector t (size k, entries >= 0, sum n) in a fixed
/// lexicographic order: t[0] runs n..0, then t[1], etc.
template <typename Visitor>
void for_each_composition(std::int64_t n, int k, Visitor&& visit) {
    std::vector<std::int64_t> t(static_cast<std::size_t>(k), 0);
    auto rec = [&](auto&& self, int slot, std::int64_t remaining) -> void {
        if (slot == k - 1) {
            t[static_cast<std::size_t>(slot)] = remaining;
            visit(std::span<const std::int64_t>(t));
            return;
        }
        for (std::int64_t v = remaining; v >= 0; --v) {
            t[static_cast<std::size_t>(slot)] = v;
            self(self, slot + 1, remaining - v);
        }
    };
    rec(rec, 0, n);
}

}  // namespace semisup
