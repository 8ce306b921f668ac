#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ccc/errors.hpp"

namespace ccc {

struct SignFlipProb {
    double p_leq0 = 0.0;  // P(sum of signs <= 0)
    double p_lt0 = 0.0;   // P(sum of signs < 0)
};

namespace detail {

/// P(K <= j_max) for K ~ Binomial(n, p), summed in log space so that tail
/// probabilities near e^{-150} survive.
inline double binomial_cdf_log_space(std::int64_t n, double p, std::int64_t j_max) {
    if (j_max < 0) return 0.0;
    if (j_max >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
    std::vector<double> logs(static_cast<std::size_t>(j_max) + 1);
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::int64_t j = 0; j <= j_max; ++j) {
        double lg = lg_n1 - std::lgamma(static_cast<double>(j) + 1.0) -
                    std::lgamma(static_cast<double>(n - j) + 1.0) +
                    static_cast<double>(j) * log_p + static_cast<double>(n - j) * log_q;
        logs[static_cast<std::size_t>(j)] = lg;
        if (lg > max_log) max_log = lg;
    }
    // Compensated sum of the rescaled terms.
    double sum = 0.0, comp = 0.0;
    for (double lg : logs) {
        double term = std::exp(lg - max_log);
        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value = std::exp(max_log + std::log(sum));
    return value < 0.0 ? 0.0 : (value > 1.0 ? 1.0 : value);
}

}  // namespace detail

/// Exact sign-change probabilities for the average of n i.i.d. +-1 signs with
/// mean m: the sum equals 2K - n with K ~ Binomial(n, (1+m)/2).
inline SignFlipProb exact_sign_flip_prob(std::int64_t n, double m) {
    if (n < 1) throw ConfigError("exact_sign_flip_prob needs n >= 1");
    if (n > 1000000) throw BudgetError("exact_sign_flip_prob capped at n = 10^6");
    if (!(m >= -1.0 && m <= 1.0)) throw ConfigError("mean m must lie in [-1,1]");
    const double p = 0.5 * (1.0 + m);
    SignFlipProb out;
    // 2K - n <= 0  <=>  K <= floor(n/2);  2K - n < 0  <=>  K <= ceil(n/2) - 1.
    out.p_leq0 = detail::binomial_cdf_log_space(n, p, n / 2);
    out.p_lt0 = detail::binomial_cdf_log_space(n, p, (n + 1) / 2 - 1);
    return out;
}

}  // namespace ccc
