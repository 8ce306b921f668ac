#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ccc/binomial.hpp"
#include "ccc/environment.hpp"
#include "ccc/errors.hpp"
#include "ccc/gfunction.hpp"
#include "ccc/majority_rule.hpp"
#include "ccc/rng.hpp"
#include "ccc/scales.hpp"

namespace ccc {

// The reduced magnetization chain: xi_k is the average of n_k signs whose
// conditional mean is h_{k+1} phi(xi_{k+1}).  Schedules are abstract by
// default (the realistic block sizes are astronomically large); they can also
// be taken from a scale table or extracted from an environment.

struct ChainSpec {
    int k_lo = 0;  // k'
    int k_hi = 0;  // M
    std::vector<std::int64_t> n;  // n_k, ascending k in [k_lo, k_hi]
    std::vector<double> h;        // h_k, same indexing
    MajorityRule rule = MajorityRule::pure_majority();

    int depth() const { return k_hi - k_lo; }

    std::int64_t n_at(int k) const { return n[static_cast<std::size_t>(k - k_lo)]; }
    double h_at(int k) const { return h[static_cast<std::size_t>(k - k_lo)]; }

    void validate() const {
        if (k_hi <= k_lo) throw ConfigError("chain needs k_hi > k_lo");
        std::size_t len = static_cast<std::size_t>(k_hi - k_lo + 1);
        if (n.size() != len || h.size() != len)
            throw ConfigError("chain schedules must cover every scale in [k_lo, k_hi]");
        for (std::int64_t v : n)
            if (v < 1) throw ConfigError("chain sizes n_k must be >= 1");
        for (double v : h)
            if (!(v >= 0.0 && v <= 0.5)) throw ConfigError("chain h_k must lie in [0, 1/2]");
    }

    static ChainSpec constant(int depth, std::int64_t n_k, double h_k, MajorityRule rule) {
        ChainSpec s;
        s.k_lo = 0;
        s.k_hi = depth;
        s.n.assign(static_cast<std::size_t>(depth + 1), n_k);
        s.h.assign(static_cast<std::size_t>(depth + 1), h_k);
        s.rule = std::move(rule);
        s.validate();
        return s;
    }

    /// n_k = ceil(beta_k^{1-eps}) and h from the table's schedule.
    static ChainSpec from_table(const ScaleTable& table, MajorityRule rule, int k_lo, int k_hi,
                                std::int64_t n_budget = 100000000) {
        if (!table.covers(k_lo) || !table.covers(k_hi))
            throw ConfigError("chain range outside scale table");
        ChainSpec s;
        s.k_lo = k_lo;
        s.k_hi = k_hi;
        s.rule = std::move(rule);
        for (int k = k_lo; k <= k_hi; ++k) {
            const ScaleRow& r = table.row(k);
            double log2_n = (1.0 - table.epsilon_star()) * static_cast<double>(r.ell);
            if (log2_n > 62.0 || std::exp2(log2_n) > static_cast<double>(n_budget))
                throw BudgetError("n_k = ceil(beta_k^{1-eps}) exceeds the budget at k=" +
                                  std::to_string(k));
            s.n.push_back(static_cast<std::int64_t>(std::ceil(std::exp2(log2_n))));
            if (!r.h) throw ConfigError("chain from table needs an h schedule");
            s.h.push_back(*r.h);
        }
        s.validate();
        return s;
    }

    /// n_k = |act(B^k(0))| read off an environment.  The binding is rejected
    /// unless every block satisfies the good-block size bounds.
    static ChainSpec from_environment(const BlockHierarchy& hier, MajorityRule rule, int k_lo,
                                      int k_hi) {
        ChainSpec s;
        s.k_lo = k_lo;
        s.k_hi = k_hi;
        s.rule = std::move(rule);
        const ScaleTable& table = hier.table();
        for (int k = k_lo; k <= k_hi; ++k) {
            const Block& b = hier.block_at(k, 0);
            auto act = hier.active_points(b);
            const ScaleRow& r = table.row(k);
            if (!r.n2) throw ConfigError("environment binding needs n2 at k=" + std::to_string(k));
            double cnt = static_cast<double>(act.size());
            if (!(cnt > r.n1 && cnt < *r.n2)) {
                std::ostringstream os;
                os << "block at scale " << k << " violates the good-block size bounds: |act|="
                   << act.size() << " not in (" << r.n1 << ", " << *r.n2 << ")";
                throw ConfigError(os.str());
            }
            s.n.push_back(static_cast<std::int64_t>(act.size()));
            if (!r.h) throw ConfigError("chain from environment needs an h schedule");
            s.h.push_back(*r.h);
        }
        s.validate();
        return s;
    }
};

struct Trajectory {
    int k_lo = 0;
    int k_hi = 0;
    std::vector<double> xi;  // ascending k
    std::vector<int> sigma;  // sign of xi_k in {-1, 0, +1}
    int s_m = 0;             // last sign-change scale, or k_lo - 1

    double xi_at(int k) const { return xi[static_cast<std::size_t>(k - k_lo)]; }
    int sigma_at(int k) const { return sigma[static_cast<std::size_t>(k - k_lo)]; }

    void finalize() {
        sigma.resize(xi.size());
        for (std::size_t i = 0; i < xi.size(); ++i)
            sigma[i] = xi[i] > 0.0 ? 1 : (xi[i] < 0.0 ? -1 : 0);
        s_m = k_lo - 1;
        for (int k = k_hi; k >= k_lo; --k)
            if (xi_at(k) <= 0.0) {
                s_m = k;
                break;
            }
    }
};

/// One downward transition: the average of n i.i.d. signs with mean
/// m = h phi(xi_next), drawn from site-keyed uniforms.
inline double step_down(double xi_next, std::int64_t n, double h, const MajorityRule& rule,
                        const Rng& rng, std::uint64_t stream_id, std::uint64_t replica, int k) {
    if (!(xi_next >= -1.0 && xi_next <= 1.0)) throw ConfigError("xi outside [-1,1]");
    if (!(h >= 0.0 && h <= 0.5)) throw ConfigError("step_down needs h in [0, 1/2]");
    if (n < 1) throw ConfigError("step_down needs n >= 1");
    double m = h * rule(xi_next);
    if (!(m >= -1.0 && m <= 1.0)) throw ConfigError("per-sign mean escaped [-1,1]");
    double p_plus = 0.5 * (1.0 + m);
    std::int64_t sum = 0;
    for (std::int64_t i = 0; i < n; ++i)
        sum += (rng.uniform(stream_id, replica, key(k), static_cast<std::uint64_t>(i)) < p_plus)
                   ? 1
                   : -1;
    return static_cast<double>(sum) / static_cast<double>(n);
}

namespace detail {

inline void check_parity(double xi, std::int64_t n) {
    double scaled = xi * static_cast<double>(n);
    double rounded = std::round(scaled);
    if (std::fabs(scaled - rounded) > 1e-9 * std::max(1.0, std::fabs(scaled)))
        throw ConfigError("xi_M * n_M is not an integer");
    if ((static_cast<std::int64_t>(rounded) - n) % 2 != 0)
        throw ConfigError("xi_M * n_M has the wrong parity");
}

}  // namespace detail

/// Runs the chain from xi_M down to k_lo, recording signs and the last
/// sign-change scale.
inline Trajectory run_chain(const ChainSpec& spec, double xi_m, std::uint64_t seed,
                            std::uint64_t replica = 0) {
    spec.validate();
    if (!(xi_m >= -1.0 && xi_m <= 1.0)) throw ConfigError("xi_M outside [-1,1]");
    detail::check_parity(xi_m, spec.n_at(spec.k_hi));
    Rng rng(seed);
    Trajectory traj;
    traj.k_lo = spec.k_lo;
    traj.k_hi = spec.k_hi;
    traj.xi.assign(static_cast<std::size_t>(spec.k_hi - spec.k_lo + 1), 0.0);
    traj.xi.back() = xi_m;
    for (int k = spec.k_hi - 1; k >= spec.k_lo; --k)
        traj.xi[static_cast<std::size_t>(k - spec.k_lo)] =
            step_down(traj.xi_at(k + 1), spec.n_at(k), spec.h_at(k + 1), spec.rule, rng,
                      stream::chain, replica, k);
    traj.finalize();
    return traj;
}

struct CoupledChainRun {
    Trajectory main;    // rule phi, schedule h
    Trajectory tilde;   // rule phi-tilde, schedule lambda h
    std::vector<int> gamma;  // 1 while coupled, ascending k
    int decoupling_scale = 0;  // D, or k_lo - 1 when the pair never decouples

    int gamma_at(int k) const { return gamma[static_cast<std::size_t>(k - main.k_lo)]; }
};

/// Couples the (phi, h) chain to the 1-Lipschitz companion (phi-tilde,
/// lambda h): while |xi| stays within delta the two chains are equal, and the
/// main chain continues independently after the first excursion.
inline CoupledChainRun coupled_chain_run(const ChainSpec& spec, double lambda, double delta,
                                         double xi_m, std::uint64_t seed,
                                         std::uint64_t replica = 0) {
    spec.validate();
    if (!(lambda > 0.0)) throw ConfigError("coupled chain needs lambda > 0");
    if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("coupled chain needs delta in (0,1]");
    if (!(std::fabs(xi_m) <= delta)) throw ConfigError("coupled chain needs |xi_M| <= delta");
    detail::check_parity(xi_m, spec.n_at(spec.k_hi));
    for (double h : spec.h)
        if (lambda * h > 0.5)
            throw ConfigError("lambda * h exceeds 1/2; take k' large enough that it does not");
    double excess = spec.rule.lipschitz_excess(lambda, -delta, delta, 1024);
    if (excess > 1e-12) {
        std::ostringstream os;
        os << "rule is not " << lambda << "-Lipschitz on [-" << delta << "," << delta
           << "] (max excess " << excess << ")";
        throw ConfigError(os.str());
    }
    MajorityRule tilde_rule = MajorityRule::tilde(spec.rule, lambda, delta);

    Rng rng(seed);
    std::size_t len = static_cast<std::size_t>(spec.k_hi - spec.k_lo + 1);
    CoupledChainRun run;
    run.main.k_lo = run.tilde.k_lo = spec.k_lo;
    run.main.k_hi = run.tilde.k_hi = spec.k_hi;
    run.main.xi.assign(len, 0.0);
    run.tilde.xi.assign(len, 0.0);
    run.gamma.assign(len, 0);
    run.main.xi.back() = xi_m;
    run.tilde.xi.back() = xi_m;
    run.gamma.back() = 1;

    for (int k = spec.k_hi - 1; k >= spec.k_lo; --k) {
        std::size_t i = static_cast<std::size_t>(k - spec.k_lo);
        double xt = step_down(run.tilde.xi_at(k + 1), spec.n_at(k), lambda * spec.h_at(k + 1),
                              tilde_rule, rng, stream::chain, replica, k);
        run.tilde.xi[i] = xt;
        if (run.gamma_at(k + 1) == 1) {
            run.main.xi[i] = xt;
            run.gamma[i] = (std::fabs(xt) <= delta) ? 1 : 0;
        } else {
            run.gamma[i] = 0;
            run.main.xi[i] = step_down(run.main.xi_at(k + 1), spec.n_at(k), spec.h_at(k + 1),
                                       spec.rule, rng, stream::chain_decoupled, replica, k);
        }
    }
    run.main.finalize();
    run.tilde.finalize();
    run.decoupling_scale = spec.k_lo - 1;
    for (int k = spec.k_hi - 1; k >= spec.k_lo; --k)
        if (run.gamma_at(k) == 0) {
            run.decoupling_scale = k;
            break;
        }
    return run;
}

// Criterion series.  The convergence test uses the n1 sizes with the
// Bernstein factor 1/16; the divergence test uses the n2 sizes with factor 2.
// Both exponents are assembled in log2 space so the doubly exponential sizes
// never overflow.
struct CriterionReport {
    static constexpr int window = 10;
    static constexpr double ratio_threshold = 0.5;
    static constexpr double tail_threshold = 1e-12;
    static constexpr double floor_threshold = 0.01;

    int k_first = 0;
    int k_last = 0;
    std::vector<double> conv_terms;
    std::vector<double> conv_partial;
    std::vector<double> div_terms;
    std::vector<double> div_partial;
    std::string verdict;  // "summable" | "divergent" | "inconclusive"
};

inline CriterionReport criterion_series(const ScaleTable& table, int K) {
    if (!table.covers(K) || !table.covers(K + 1))
        throw ConfigError("criterion series needs the table to cover K+1 (for h_{K+1})");
    CriterionReport rep;
    int k_first = table.k_star();
    while (k_first <= K && !table.row(k_first).n2) ++k_first;
    if (k_first > K) throw ConfigError("no scale has n2 available below K");
    rep.k_first = k_first;
    rep.k_last = K;
    double conv_sum = 0.0, div_sum = 0.0;
    for (int k = k_first; k <= K; ++k) {
        const ScaleRow& r = table.row(k);
        const ScaleRow& next = table.row(k + 1);
        if (!next.log2_h) throw ConfigError("criterion series needs an h schedule");
        double conv_exp = std::exp2(2.0 * *next.log2_h + r.log2_n1 - 4.0);
        double div_exp = std::exp2(1.0 + 2.0 * *next.log2_h + *r.log2_n2);
        double conv = std::exp(-conv_exp);
        double div = std::exp(-div_exp);
        conv_sum += conv;
        div_sum += div;
        rep.conv_terms.push_back(conv);
        rep.conv_partial.push_back(conv_sum);
        rep.div_terms.push_back(div);
        rep.div_partial.push_back(div_sum);
    }

    const auto& t = rep.conv_terms;
    rep.verdict = "inconclusive";
    if (static_cast<int>(t.size()) >= CriterionReport::window + 1) {
        std::size_t first = t.size() - CriterionReport::window - 1;
        bool ratios_ok = true;
        double max_ratio = 0.0;
        for (std::size_t i = first; i + 1 < t.size(); ++i) {
            double ratio = (t[i] == 0.0) ? (t[i + 1] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                         : t[i + 1] / t[i];
            max_ratio = std::max(max_ratio, ratio);
            if (!(ratio < CriterionReport::ratio_threshold)) ratios_ok = false;
        }
        double tail = (max_ratio < 1.0) ? t.back() * max_ratio / (1.0 - max_ratio)
                                        : std::numeric_limits<double>::infinity();
        if (ratios_ok && tail < CriterionReport::tail_threshold) {
            rep.verdict = "summable";
        } else {
            bool floored = true;
            for (std::size_t i = t.size() - CriterionReport::window; i < t.size(); ++i)
                if (t[i] < CriterionReport::floor_threshold) floored = false;
            if (floored) rep.verdict = "divergent";
        }
    }
    return rep;
}

/// Deterministic mean-field iteration mu_k = h_{k+1} phi(mu_{k+1}), returned
/// ascending in k (last entry is mu_M).
inline std::vector<double> toy_iterate(const MajorityRule& rule, const std::vector<double>& h,
                                       double mu_m) {
    if (!(mu_m >= -1.0 && mu_m <= 1.0)) throw ConfigError("mu_M outside [-1,1]");
    for (double v : h)
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("toy h values must lie in [0,1]");
    // h[i] plays the role of h_{k+1} for the step into index i.
    std::vector<double> mu(h.size() + 1);
    mu.back() = mu_m;
    for (std::size_t i = h.size(); i-- > 0;) mu[i] = h[i] * rule(mu[i + 1]);
    return mu;
}

}  // namespace ccc
