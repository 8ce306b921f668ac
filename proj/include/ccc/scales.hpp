#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ccc/errors.hpp"

namespace ccc {

// Deterministic scale arithmetic.  Everything here is a function of the two
// base numbers (epsilon_star, k_star) and the chosen schedules:
//
//   ell_k  = ceil((1+eps)^k)            (default schedule)
//   beta_k = 2^{ell_k}
//   nu_k   = beta_k / beta_{k-1}        (exact power of two)
//   h_k    = beta_{k-1}^{-alpha}        (power-law schedule)
//   n1_k   = beta_k^{1-eps} * 2^{-k}
//   n2_k   = beta_k^{1-eps} * beta_{k-1}^{2 eps}
//
// beta_k grows doubly exponentially, so all derived reals carry their exact
// base-2 logarithm; the linear double is a convenience that may overflow to
// inf (or underflow to 0) without harming downstream log-space computations.

enum class HSchedule { none, power_law, custom };
enum class EllSchedule { default_schedule, custom };

struct ScaleParams {
    double epsilon_star = 0.5;
    int k_star = 1;
    double alpha = 0.0;  // used by the power-law h schedule
    HSchedule h_schedule = HSchedule::none;
    std::vector<double> h_custom;  // h_{k_star}, h_{k_star+1}, ...
    EllSchedule ell_schedule = EllSchedule::default_schedule;
    std::vector<std::int64_t> ell_custom;  // ell_{k_star}, ell_{k_star+1}, ...
};

struct ScaleRow {
    int k = 0;
    std::int64_t ell = 0;
    double log2_beta = 0.0;                 // == ell
    std::optional<std::uint64_t> beta;      // exact when ell <= 62
    std::optional<std::int64_t> nu_log2;    // ell_k - ell_{k-1}; empty without a predecessor
    std::optional<double> h;                // empty when no h schedule
    std::optional<double> log2_h;
    double n1 = 0.0;                        // may overflow to inf
    double log2_n1 = 0.0;
    std::optional<double> n2;               // empty without a predecessor
    std::optional<double> log2_n2;
};

inline std::int64_t default_ell(double epsilon_star, int k) {
    long double v = std::pow(1.0L + static_cast<long double>(epsilon_star), k);
    if (v > 4.0e18L) throw BudgetError("ell_k exceeds the representable range at k=" + std::to_string(k));
    return static_cast<std::int64_t>(std::ceil(v));
}

class ScaleTable {
  public:
    ScaleTable() = default;

    int k_star() const { return k_star_; }
    int k_max() const { return k_max_; }
    double epsilon_star() const { return epsilon_star_; }
    bool covers(int k) const { return k >= k_star_ && k <= k_max_; }

    const ScaleRow& row(int k) const {
        if (!covers(k)) throw ConfigError("scale k=" + std::to_string(k) + " outside table range");
        return rows_[static_cast<std::size_t>(k - k_star_)];
    }

    const std::vector<ScaleRow>& rows() const { return rows_; }

    /// I_k: ell_k - 1 ones followed by a single zero.
    std::vector<std::uint8_t> pattern(int k) const {
        const ScaleRow& r = row(k);
        if (r.ell > (1 << 26)) throw BudgetError("pattern I_k too long to materialize");
        std::vector<std::uint8_t> p(static_cast<std::size_t>(r.ell), 1);
        p.back() = 0;
        return p;
    }

    /// 2^{ell_k} as long double; inf when huge.
    long double beta_ld(int k) const { return std::exp2(static_cast<long double>(row(k).ell)); }

    /// Exact beta_k when it fits a signed 64-bit integer.
    std::int64_t beta_int(int k) const {
        const ScaleRow& r = row(k);
        if (!r.beta) throw BudgetError("beta_k does not fit in 64 bits at k=" + std::to_string(k));
        return static_cast<std::int64_t>(*r.beta);
    }

    /// floor(nu_k^{1-eps}): child count kept by the beginning of a k-block.
    std::int64_t beginning_child_count(int k) const {
        const ScaleRow& r = row(k);
        if (!r.nu_log2) throw ConfigError("nu_k needs a predecessor scale at k=" + std::to_string(k));
        long double e = static_cast<long double>(*r.nu_log2) * (1.0L - epsilon_star_);
        if (e >= 62.0L) return std::numeric_limits<std::int64_t>::max();
        return static_cast<std::int64_t>(std::floor(std::exp2(e)));
    }

    /// floor(beta_{k_star}^{1+eps}): reach of the base-scale beginning.
    std::int64_t base_beginning_reach() const {
        long double e = static_cast<long double>(row(k_star_).ell) * (1.0L + epsilon_star_);
        if (e >= 62.0L) return std::numeric_limits<std::int64_t>::max();
        return static_cast<std::int64_t>(std::floor(std::exp2(e)));
    }

    /// Whether dist < beta_{k+1}, treating an out-of-range ell as unbounded is
    /// NOT done here: caller must check covers(k+1) first.
    bool within_beta(std::int64_t dist, int k) const {
        const ScaleRow& r = row(k);
        if (r.ell >= 63) return true;
        return dist < static_cast<std::int64_t>(1) << r.ell;
    }

    /// diam < beta_k^{1+eps}/2, evaluated in log space.
    bool below_half_beta_1_plus_eps(std::int64_t diam, int k) const {
        long double e = static_cast<long double>(row(k).ell) * (1.0L + epsilon_star_) - 1.0L;
        if (e >= 63.0L) return true;
        return static_cast<long double>(diam) < std::exp2(e);
    }

    static ScaleTable build(const ScaleParams& params, int k_max);

  private:
    int k_star_ = 1;
    int k_max_ = 0;
    double epsilon_star_ = 0.5;
    std::vector<ScaleRow> rows_;
};

/// Populates scales k_star..k_max and validates every schedule constraint.
inline ScaleTable build_scale_table(const ScaleParams& params, int k_max) {
    return ScaleTable::build(params, k_max);
}

inline ScaleTable ScaleTable::build(const ScaleParams& params, int k_max) {
    if (!(params.epsilon_star > 0.0 && params.epsilon_star < 1.0))
        throw ConfigError("epsilon_star must lie in (0,1)");
    if (params.k_star < 1) throw ConfigError("k_star must be >= 1");
    if (k_max < params.k_star) throw ConfigError("k_max must be >= k_star");

    const int count = k_max - params.k_star + 1;
    const double eps = params.epsilon_star;

    // ell values for k_star..k_max, plus the predecessor ell_{k_star-1} when
    // the default formula provides one.  Custom schedules have no predecessor.
    std::vector<std::int64_t> ell(static_cast<std::size_t>(count));
    std::optional<std::int64_t> ell_pred;
    if (params.ell_schedule == EllSchedule::default_schedule) {
        for (int i = 0; i < count; ++i) ell[static_cast<std::size_t>(i)] = default_ell(eps, params.k_star + i);
        ell_pred = default_ell(eps, params.k_star - 1);
    } else {
        if (static_cast<int>(params.ell_custom.size()) < count)
            throw ConfigError("custom ell schedule shorter than requested k range");
        for (int i = 0; i < count; ++i) {
            std::int64_t e = params.ell_custom[static_cast<std::size_t>(i)];
            if (e < 2) throw ConfigError("custom ell values must be >= 2");
            ell[static_cast<std::size_t>(i)] = e;
        }
        for (int i = 1; i < count; ++i)
            if (ell[static_cast<std::size_t>(i)] <= ell[static_cast<std::size_t>(i - 1)])
                throw ConfigError("custom ell schedule must be strictly increasing");
    }

    // h values.
    std::vector<std::optional<double>> h(static_cast<std::size_t>(count));
    std::vector<std::optional<double>> log2_h(static_cast<std::size_t>(count));
    switch (params.h_schedule) {
        case HSchedule::none:
            break;
        case HSchedule::power_law: {
            if (params.ell_schedule == EllSchedule::custom)
                throw ConfigError(
                    "power-law h needs beta_{k-1} below the base scale; use a custom h schedule "
                    "with a custom ell schedule");
            if (!(params.alpha > 0.0)) throw ConfigError("power-law h needs alpha > 0");
            for (int i = 0; i < count; ++i) {
                std::int64_t ell_prev = (i == 0) ? *ell_pred : ell[static_cast<std::size_t>(i - 1)];
                double lg = -params.alpha * static_cast<double>(ell_prev);
                log2_h[static_cast<std::size_t>(i)] = lg;
                h[static_cast<std::size_t>(i)] = std::exp2(lg);
            }
            if (*h[0] > 0.5) throw ConfigError("h_{k_star} > 1/2; increase k_star or alpha");
            break;
        }
        case HSchedule::custom: {
            if (static_cast<int>(params.h_custom.size()) < count)
                throw ConfigError("custom h schedule shorter than requested k range");
            for (int i = 0; i < count; ++i) {
                double v = params.h_custom[static_cast<std::size_t>(i)];
                if (!(v > 0.0)) throw ConfigError("custom h values must be positive");
                if (i > 0 && v >= *h[static_cast<std::size_t>(i - 1)])
                    throw ConfigError("custom h schedule must be strictly decreasing");
                h[static_cast<std::size_t>(i)] = v;
                log2_h[static_cast<std::size_t>(i)] = std::log2(v);
            }
            if (*h[0] > 0.5) throw ConfigError("h_{k_star} > 1/2 in custom schedule");
            break;
        }
    }

    ScaleTable t;
    t.k_star_ = params.k_star;
    t.k_max_ = k_max;
    t.epsilon_star_ = eps;
    t.rows_.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        ScaleRow& r = t.rows_[static_cast<std::size_t>(i)];
        r.k = params.k_star + i;
        r.ell = ell[static_cast<std::size_t>(i)];
        r.log2_beta = static_cast<double>(r.ell);
        if (r.ell <= 62) r.beta = static_cast<std::uint64_t>(1) << r.ell;
        std::optional<std::int64_t> ell_prev;
        if (i > 0)
            ell_prev = ell[static_cast<std::size_t>(i - 1)];
        else if (ell_pred)
            ell_prev = *ell_pred;
        if (ell_prev) r.nu_log2 = r.ell - *ell_prev;
        r.h = h[static_cast<std::size_t>(i)];
        r.log2_h = log2_h[static_cast<std::size_t>(i)];
        r.log2_n1 = (1.0 - eps) * static_cast<double>(r.ell) - static_cast<double>(r.k);
        r.n1 = std::exp2(r.log2_n1);
        if (ell_prev) {
            r.log2_n2 = (1.0 - eps) * static_cast<double>(r.ell) + 2.0 * eps * static_cast<double>(*ell_prev);
            r.n2 = std::exp2(*r.log2_n2);
        }
    }
    return t;
}

}  // namespace ccc
