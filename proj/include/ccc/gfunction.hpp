#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccc/environment.hpp"
#include "ccc/errors.hpp"
#include "ccc/majority_rule.hpp"
#include "ccc/scales.hpp"

namespace ccc {

// The quenched specification: a scale table (which carries the h sequence)
// together with a majority rule.  Joint transition values stay inside
// [eta, 1-eta] with eta = (1 - h_{k_star})/4, which is the regularity margin.
struct GSpec {
    ScaleTable table;
    MajorityRule rule;

    double h_at(int k) const {
        const auto& r = table.row(k);
        if (!r.h) throw ConfigError("GSpec needs an h schedule");
        return *r.h;
    }

    double eta() const { return 0.25 * (1.0 - h_at(table.k_star())); }
};

namespace detail {

template <class History>
    requires std::invocable<History, std::int64_t>
double history_average(const std::vector<std::int64_t>& sites, History&& history) {
    double sum = 0.0;
    for (std::int64_t s : sites) {
        int v = history(s);
        if (v != 1 && v != -1) throw ConfigError("history values must be +1 or -1");
        sum += v;
    }
    return sum / static_cast<double>(sites.size());
}

}  // namespace detail

/// psi_t of a resolved target: h_{k_t} * phi(average over S_t), gated by the
/// cutoff |t - a^{k_t}(t)| < beta_{k_t + 1}; zero when S_t is empty or the
/// cutoff fails.  `history` maps sites of S_t to +-1.
template <class History>
    requires std::invocable<History, std::int64_t>
double psi(const GSpec& spec, const TargetResult& tr, std::int64_t t, History&& history) {
    if (!tr.determined() || !tr.s_known)
        throw BoundaryUndetermined("psi needs a determined target with known S_t");
    if (tr.s.empty()) return 0.0;
    if (!spec.table.covers(tr.k_t + 1)) throw BoundaryUndetermined("psi cutoff needs beta_{k_t+1}");
    if (!spec.table.within_beta(t - tr.a_kt, tr.k_t + 1)) return 0.0;
    double avg = detail::history_average(tr.s, history);
    return spec.h_at(tr.k_t) * spec.rule(avg);
}

template <class History>
    requires std::invocable<History, std::int64_t>
double psi(const GSpec& spec, const BlockHierarchy& h, std::int64_t t, History&& history) {
    return psi(spec, h.target(t), t, history);
}

/// Map-backed history; missing sites of S_t are an error.
inline double psi(const GSpec& spec, const BlockHierarchy& h, std::int64_t t,
                  const std::map<std::int64_t, int>& history) {
    return psi(spec, h, t, [&history](std::int64_t s) {
        auto it = history.find(s);
        if (it == history.end())
            throw ConfigError("history missing site " + std::to_string(s) + " of S_t");
        return it->second;
    });
}

/// Quenched kernel: g_t(x | past) = (1 + x psi)/2.
inline double quenched_prob_from_psi(double psi_value, int symbol) {
    if (symbol != 1 && symbol != -1) throw ConfigError("symbol must be +1 or -1");
    return 0.5 * (1.0 + symbol * psi_value);
}

inline double quenched_prob(const GSpec& spec, const BlockHierarchy& h, std::int64_t t,
                            const std::map<std::int64_t, int>& history, int symbol) {
    return quenched_prob_from_psi(psi(spec, h, t, history), symbol);
}

/// Joint kernel over the four symbols (x, w): (1 + x psi)/4, independent of w.
inline double joint_prob(const GSpec& spec, const BlockHierarchy& h, std::int64_t t,
                         const std::map<std::int64_t, int>& history, int symbol, int omega_bit) {
    if (omega_bit != 0 && omega_bit != 1) throw ConfigError("omega symbol must be 0 or 1");
    return 0.5 * quenched_prob(spec, h, t, history, symbol);
}

/// One probe of var_j(g): the two (environment, history) pairs must agree on
/// positions [-j, 0] ([-j, -1] for the history); returns the largest
/// difference of joint transition values over the four symbols, which equals
/// |psi - psi'| / 4.
inline double variation_probe(const GSpec& spec, const BlockHierarchy& ha,
                              const std::map<std::int64_t, int>& hist_a, const BlockHierarchy& hb,
                              const std::map<std::int64_t, int>& hist_b, std::int64_t j) {
    if (j < 0) throw ConfigError("variation probe needs j >= 0");
    for (std::int64_t i = -j; i <= 0; ++i)
        if (ha.env().bit(i) != hb.env().bit(i))
            throw ConfigError("environments disagree at position " + std::to_string(i) +
                              " inside the agreement range");
    for (std::int64_t i = -j; i <= -1; ++i) {
        auto a = hist_a.find(i);
        auto b = hist_b.find(i);
        if (a != hist_a.end() && b != hist_b.end() && a->second != b->second)
            throw ConfigError("histories disagree at position " + std::to_string(i) +
                              " inside the agreement range");
    }
    double pa = psi(spec, ha, 0, hist_a);
    double pb = psi(spec, hb, 0, hist_b);
    return 0.25 * std::fabs(pa - pb);
}

}  // namespace ccc
