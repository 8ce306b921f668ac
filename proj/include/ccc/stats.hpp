#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ccc/errors.hpp"

namespace ccc {
namespace stats {

constexpr double z95 = 1.959963984540054;

struct IntervalEstimate {
    double estimate = 0.0;
    double half_width = 0.0;
};

/// Wilson score interval for a proportion; behaves sensibly near 0 and 1.
inline IntervalEstimate wilson(std::int64_t successes, std::int64_t trials, double z = z95) {
    if (trials <= 0) throw StatFloorError("proportion estimate needs trials > 0");
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double hw = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {center, hw};
}

/// Plain binomial standard error of a proportion.
inline double proportion_se(double p_hat, std::int64_t trials) {
    return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(trials));
}

/// Streaming mean/variance (Welford).
class Accumulator {
  public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const Accumulator& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) { *this = o; return; }
        double d = o.mean_ - mean_;
        std::int64_t n = n_ + o.n_;
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / static_cast<double>(n);
        mean_ += d * static_cast<double>(o.n_) / static_cast<double>(n);
        n_ = n;
    }
    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double se() const { return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0; }
    IntervalEstimate ci(double z = z95) const { return {mean(), z * se()}; }

  private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Kolmogorov-Smirnov distance between positive integer samples and the
/// Geometric(p) law on {1,2,...}: F(j) = 1 - (1-p)^j.
inline double ks_distance_geometric(const std::vector<std::int64_t>& samples, double p) {
    if (samples.empty()) throw StatFloorError("KS distance needs samples");
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("geometric parameter must lie in (0,1]");
    std::int64_t max_n = *std::max_element(samples.begin(), samples.end());
    std::vector<std::int64_t> hist(static_cast<std::size_t>(max_n) + 1, 0);
    for (auto v : samples) {
        if (v < 1) throw ConfigError("geometric samples must be >= 1");
        ++hist[static_cast<std::size_t>(v)];
    }
    double n = static_cast<double>(samples.size());
    double cum = 0.0;
    double worst = 0.0;
    for (std::int64_t j = 1; j <= max_n; ++j) {
        cum += static_cast<double>(hist[static_cast<std::size_t>(j)]);
        double emp = cum / n;
        double model = 1.0 - std::pow(1.0 - p, static_cast<double>(j));
        worst = std::max(worst, std::fabs(emp - model));
    }
    return worst;
}

enum class CheckKind { two_sided, one_sided_upper, exact, informative };

/// One Monte Carlo verification line.  Pass semantics depend on the kind:
/// two_sided compares |estimate - reference| against the tolerance,
/// one_sided_upper requires estimate <= reference + tolerance, exact requires
/// |estimate - reference| <= tolerance, informative always passes.
struct McReport {
    std::string quantity;
    double estimate = 0.0;
    double half_width = 0.0;
    std::int64_t replicas = 0;
    std::uint64_t seed = 0;
    double reference = 0.0;
    double tolerance = 0.0;
    CheckKind kind = CheckKind::informative;
    bool bound_certified = true;  // false when the bound's preconditions fail at this scale
    bool pass = true;
    std::string note;

    static bool evaluate(CheckKind kind, double estimate, double reference, double tolerance) {
        switch (kind) {
            case CheckKind::two_sided: return std::fabs(estimate - reference) <= tolerance;
            case CheckKind::one_sided_upper: return estimate <= reference + tolerance;
            case CheckKind::exact: return std::fabs(estimate - reference) <= tolerance;
            case CheckKind::informative: return true;
        }
        return false;
    }

    void finalize() { pass = evaluate(kind, estimate, reference, tolerance); }
};

}  // namespace stats
}  // namespace ccc
