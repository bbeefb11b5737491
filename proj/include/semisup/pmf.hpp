#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semisup/errors.hpp"

namespace semisup {

inline constexpr double kSumToleranceRaw = 1e-9;    // accepted input deviation from 1
inline constexpr double kSumToleranceFinal = 1e-12; // post-normalization invariant

enum class Normalize { off, on };

/// Probability mass function over the dense alphabet {0, ..., k-1}, k >= 2.
/// Immutable after construction; construction enforces the invariants
/// (non-negative weights, sum 1 within 1e-12).
class Pmf {
public:
    static Pmf from_weights(std::vector<double> w, Normalize norm = Normalize::off) {
        if (w.size() < 2) {
            throw DimensionMismatch("Pmf: alphabet size must be >= 2, got " + std::to_string(w.size()));
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!std::isfinite(w[i]) || w[i] < 0.0) {
                throw NegativeWeight("Pmf: weight " + std::to_string(w[i]) + " at index " + std::to_string(i));
            }
            sum += w[i];
        }
        if (norm == Normalize::off && std::abs(sum - 1.0) > kSumToleranceRaw) {
            throw SumOutOfTolerance("Pmf: weights sum to " + std::to_string(sum) +
                                    ", more than 1e-9 from 1 (pass Normalize::on to rescale)");
        }
        if (sum <= 0.0) {
            throw SumOutOfTolerance("Pmf: weights sum to zero");
        }
        // Rescale only when needed: weights already inside the final
        // tolerance stay bitwise untouched (keeps estimator outputs exactly
        // permutation-equivariant).
        if (std::abs(sum - 1.0) > kSumToleranceFinal) {
            for (double& x : w) x /= sum;
        }
        return Pmf(std::move(w));
    }

    static Pmf uniform(std::size_t k) {
        std::vector<double> w(k, 1.0 / static_cast<double>(k));
        return from_weights(std::move(w));
    }

    static Pmf point_mass(std::size_t k, std::size_t at) {
        if (at >= k) throw SymbolOutOfRange("Pmf::point_mass: symbol out of range");
        std::vector<double> w(k, 0.0);
        w[at] = 1.0;
        return from_weights(std::move(w));
    }

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    std::span<const double> weights() const { return w_; }

    double min_entry() const {
        double m = w_[0];
        for (double x : w_) m = std::min(m, x);
        return m;
    }

private:
    explicit Pmf(std::vector<double> w) : w_(std::move(w)) {}
    std::vector<double> w_;
};

/// One pmf over the Y alphabet per X symbol.
class ConditionalPmf {
public:
    explicit ConditionalPmf(std::vector<Pmf> rows) : rows_(std::move(rows)) {
        if (rows_.empty()) throw DimensionMismatch("ConditionalPmf: no rows");
        for (const Pmf& r : rows_) {
            if (r.size() != rows_.front().size()) {
                throw DimensionMismatch("ConditionalPmf: rows over different alphabets");
            }
        }
    }

    std::size_t k_x() const { return rows_.size(); }
    std::size_t k_y() const { return rows_.front().size(); }
    const Pmf& row(std::size_t x) const { return rows_[x]; }

private:
    std::vector<Pmf> rows_;
};

/// Joint pmf over {0..k_x-1} x {0..k_y-1}, stored row-major.
class JointPmf {
public:
    static JointPmf from_table(std::vector<double> table, std::size_t k_x, std::size_t k_y,
                               Normalize norm = Normalize::off) {
        if (k_x < 2 || k_y < 2 || table.size() != k_x * k_y) {
            throw DimensionMismatch("JointPmf: table must be k_x*k_y with k_x,k_y >= 2");
        }
        double sum = 0.0;
        for (double v : table) {
            if (!std::isfinite(v) || v < 0.0) throw NegativeWeight("JointPmf: negative or non-finite entry");
            sum += v;
        }
        if (norm == Normalize::off && std::abs(sum - 1.0) > kSumToleranceRaw) {
            throw SumOutOfTolerance("JointPmf: entries sum to " + std::to_string(sum));
        }
        if (sum <= 0.0) throw SumOutOfTolerance("JointPmf: entries sum to zero");
        if (std::abs(sum - 1.0) > kSumToleranceFinal) {
            for (double& v : table) v /= sum;
        }
        return JointPmf(std::move(table), k_x, k_y);
    }

    static JointPmf uniform(std::size_t k_x, std::size_t k_y) {
        std::vector<double> t(k_x * k_y, 1.0 / static_cast<double>(k_x * k_y));
        return from_table(std::move(t), k_x, k_y);
    }

    std::size_t k_x() const { return k_x_; }
    std::size_t k_y() const { return k_y_; }
    double at(std::size_t x, std::size_t y) const { return t_[x * k_y_ + y]; }
    std::span<const double> flat() const { return t_; }

    Pmf marginal_x() const {
        std::vector<double> m(k_x_, 0.0);
        for (std::size_t x = 0; x < k_x_; ++x) {
            for (std::size_t y = 0; y < k_y_; ++y) m[x] += at(x, y);
        }
        return Pmf::from_weights(std::move(m));
    }

    double min_entry() const {
        double m = t_[0];
        for (double v : t_) m = std::min(m, v);
        return m;
    }

private:
    JointPmf(std::vector<double> t, std::size_t kx, std::size_t ky)
        : t_(std::move(t)), k_x_(kx), k_y_(ky) {}
    std::vector<double> t_;
    std::size_t k_x_, k_y_;
};

/// table[x][y] = marginal[x] * conditional[x][y].
inline JointPmf joint_from_parts(const Pmf& marginal, const ConditionalPmf& conditional) {
    if (marginal.size() != conditional.k_x()) {
        throw DimensionMismatch("joint_from_parts: marginal size " + std::to_string(marginal.size()) +
                                " vs " + std::to_string(conditional.k_x()) + " conditional rows");
    }
    const std::size_t kx = conditional.k_x(), ky = conditional.k_y();
    std::vector<double> t(kx * ky);
    for (std::size_t x = 0; x < kx; ++x) {
        for (std::size_t y = 0; y < ky; ++y) t[x * ky + y] = marginal[x] * conditional.row(x)[y];
    }
    return JointPmf::from_table(std::move(t), kx, ky);
}

/// Restricted simplex floor: every entry of an admissible pmf is >= delta.
struct SimplexConstraint {
    double delta = 0.0;

    void require_valid_for(std::size_t k) const {
        if (delta < 0.0 || delta * static_cast<double>(k) >= 1.0) {
            throw ConstraintViolated("SimplexConstraint: need 0 <= delta*k < 1");
        }
    }

    bool admits(std::span<const double> p) const {
        for (double v : p) {
            if (v < delta) return false;
        }
        return true;
    }
};

}  // namespace semisup
