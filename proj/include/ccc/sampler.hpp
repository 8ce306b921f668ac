#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccc/environment.hpp"
#include "ccc/errors.hpp"
#include "ccc/gfunction.hpp"
#include "ccc/parallel.hpp"
#include "ccc/rng.hpp"
#include "ccc/stats.hpp"

namespace ccc {

// Quenched path sampling on a finite region (-N, horizon].  History below -N
// comes from the boundary condition; the region's targets are resolved once
// into a SamplingPlan shared by all replicas.

class Boundary {
  public:
    enum class Kind { plus, minus, custom };

    static Boundary plus() { return Boundary(Kind::plus); }
    static Boundary minus() { return Boundary(Kind::minus); }
    static Boundary custom(std::map<std::int64_t, int> values) {
        Boundary b(Kind::custom);
        for (auto& [s, v] : values)
            if (v != 1 && v != -1) throw ConfigError("boundary values must be +1 or -1");
        b.values_ = std::move(values);
        return b;
    }

    Kind kind() const { return kind_; }

    bool covers(std::int64_t s) const {
        return kind_ != Kind::custom || values_.count(s) > 0;
    }

    int value(std::int64_t s) const {
        switch (kind_) {
            case Kind::plus: return 1;
            case Kind::minus: return -1;
            case Kind::custom: {
                auto it = values_.find(s);
                if (it == values_.end())
                    throw ConfigError("custom boundary does not cover site " + std::to_string(s));
                return it->second;
            }
        }
        return 0;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::plus: return "plus";
            case Kind::minus: return "minus";
            case Kind::custom: return "custom(" + std::to_string(values_.size()) + " sites)";
        }
        return "";
    }

  private:
    explicit Boundary(Kind k) : kind_(k) {}
    Kind kind_;
    std::map<std::int64_t, int> values_;
};

/// The resolved law of one site: S_t and h_{k_t}, or a symmetric fair sign.
struct SiteLaw {
    std::int64_t t = 0;
    bool symmetric = true;  // S_t empty or cutoff failed: psi == 0
    double h = 0.0;
    std::vector<std::int64_t> s;
};

class SamplingPlan {
  public:
    /// Resolves every site of (-N, horizon]; throws BoundaryUndetermined
    /// naming the first site the window cannot decide.
    static SamplingPlan build(const GSpec& spec, const BlockHierarchy& hier, std::int64_t N,
                              std::int64_t horizon) {
        if (horizon <= -N) throw ConfigError("sampling region (-N, horizon] is empty");
        SamplingPlan plan;
        plan.n_ = N;
        plan.horizon_ = horizon;
        plan.laws_.reserve(static_cast<std::size_t>(horizon + N));
        for (std::int64_t t = -N + 1; t <= horizon; ++t) {
            TargetResult tr = hier.target(t);
            if (!tr.determined() || !tr.s_known)
                throw BoundaryUndetermined("target undecided at site " + std::to_string(t));
            SiteLaw law;
            law.t = t;
            if (!tr.s.empty()) {
                if (!spec.table.covers(tr.k_t + 1))
                    throw BoundaryUndetermined("psi cutoff needs beta_{k_t+1} at site " +
                                               std::to_string(t));
                if (spec.table.within_beta(t - tr.a_kt, tr.k_t + 1)) {
                    law.symmetric = false;
                    law.h = spec.h_at(tr.k_t);
                    law.s = std::move(tr.s);
                    for (std::int64_t s : law.s)
                        if (s <= -N) plan.boundary_sites_.push_back(s);
                }
            }
            plan.laws_.push_back(std::move(law));
        }
        std::sort(plan.boundary_sites_.begin(), plan.boundary_sites_.end());
        plan.boundary_sites_.erase(
            std::unique(plan.boundary_sites_.begin(), plan.boundary_sites_.end()),
            plan.boundary_sites_.end());
        return plan;
    }

    std::int64_t N() const { return n_; }
    std::int64_t horizon() const { return horizon_; }
    const std::vector<SiteLaw>& laws() const { return laws_; }
    const std::vector<std::int64_t>& boundary_sites() const { return boundary_sites_; }
    std::int64_t region_size() const { return horizon_ + n_; }

    void require_boundary_coverage(const Boundary& b) const {
        for (std::int64_t s : boundary_sites_)
            if (!b.covers(s))
                throw ConfigError("boundary does not cover reachable site " + std::to_string(s));
    }

  private:
    std::int64_t n_ = 0;
    std::int64_t horizon_ = 0;
    std::vector<SiteLaw> laws_;
    std::vector<std::int64_t> boundary_sites_;
};

struct SamplePath {
    std::int64_t N = 0;
    std::int64_t horizon = 0;
    std::vector<std::int8_t> x;  // site -N+1 at index 0
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;
    std::string boundary;

    int value(std::int64_t t) const { return x[static_cast<std::size_t>(t + N - 1)]; }
};

struct CoupledPair {
    SamplePath lower;            // boundary^1
    SamplePath upper;            // boundary^2
    std::vector<double> u;       // shared uniforms, one per site
    std::vector<double> p_lower; // one-step + probabilities actually used
    std::vector<double> p_upper;

    bool discrepancy_at(std::int64_t t) const {
        return upper.value(t) == 1 && lower.value(t) == -1;
    }
};

namespace detail {

/// psi of a site law against an arbitrary history lookup.
template <class Lookup>
double psi_of_law(const GSpec& spec, const SiteLaw& law, Lookup&& value_at) {
    if (law.symmetric) return 0.0;
    double sum = 0.0;
    for (std::int64_t s : law.s) sum += value_at(s);
    return law.h * spec.rule(sum / static_cast<double>(law.s.size()));
}

}  // namespace detail

/// Sequential quenched sampling with per-site uniforms keyed by
/// (seed, replica, t); sites with psi == 0 are symmetric fair signs.
inline SamplePath sample_quenched(const GSpec& spec, const SamplingPlan& plan,
                                  const Boundary& boundary, std::uint64_t seed,
                                  std::uint64_t replica = 0) {
    plan.require_boundary_coverage(boundary);
    Rng rng(seed);
    SamplePath path;
    path.N = plan.N();
    path.horizon = plan.horizon();
    path.seed = seed;
    path.replica = replica;
    path.boundary = boundary.describe();
    path.x.resize(static_cast<std::size_t>(plan.region_size()));
    auto value_at = [&](std::int64_t s) -> int {
        return s <= -plan.N() ? boundary.value(s) : path.value(s);
    };
    for (const SiteLaw& law : plan.laws()) {
        double p_plus = quenched_prob_from_psi(detail::psi_of_law(spec, law, value_at), 1);
        double u = rng.uniform(stream::path, replica, key(law.t));
        path.x[static_cast<std::size_t>(law.t + plan.N() - 1)] = (u < p_plus) ? 1 : -1;
    }
    return path;
}

/// Monotone (maximal) coupling of the laws with boundaries b1 <= b2: one
/// uniform per site drives both components through the three-interval
/// partition; the pair (+,-) occurs exactly on the leading interval of
/// length g(+|upper) - g(+|lower).
inline CoupledPair sample_coupled_pair(const GSpec& spec, const SamplingPlan& plan,
                                       const Boundary& b1, const Boundary& b2,
                                       std::uint64_t seed, std::uint64_t replica = 0) {
    plan.require_boundary_coverage(b1);
    plan.require_boundary_coverage(b2);
    for (std::int64_t s : plan.boundary_sites())
        if (b1.value(s) > b2.value(s))
            throw ConfigError("boundaries are not ordered at site " + std::to_string(s));

    Rng rng(seed);
    CoupledPair pair;
    auto init = [&](SamplePath& p, const Boundary& b) {
        p.N = plan.N();
        p.horizon = plan.horizon();
        p.seed = seed;
        p.replica = replica;
        p.boundary = b.describe();
        p.x.resize(static_cast<std::size_t>(plan.region_size()));
    };
    init(pair.lower, b1);
    init(pair.upper, b2);
    pair.u.reserve(plan.laws().size());
    pair.p_lower.reserve(plan.laws().size());
    pair.p_upper.reserve(plan.laws().size());

    auto lower_at = [&](std::int64_t s) -> int {
        return s <= -plan.N() ? b1.value(s) : pair.lower.value(s);
    };
    auto upper_at = [&](std::int64_t s) -> int {
        return s <= -plan.N() ? b2.value(s) : pair.upper.value(s);
    };
    for (const SiteLaw& law : plan.laws()) {
        double p1 = quenched_prob_from_psi(detail::psi_of_law(spec, law, lower_at), 1);
        double p2 = quenched_prob_from_psi(detail::psi_of_law(spec, law, upper_at), 1);
        double u = rng.uniform(stream::path, replica, key(law.t));
        // A = [0, p2-p1), B = [p2-p1, p2), C = [p2, 1]
        std::int8_t x2 = (u < p2) ? 1 : -1;
        std::int8_t x1 = (u >= p2 - p1 && u < p2) ? 1 : -1;
        std::size_t i = static_cast<std::size_t>(law.t + plan.N() - 1);
        pair.upper.x[i] = x2;
        pair.lower.x[i] = x1;
        pair.u.push_back(u);
        pair.p_lower.push_back(p1);
        pair.p_upper.push_back(p2);
    }
    return pair;
}

struct GapEstimate {
    double estimate = 0.0;
    double half_width = 0.0;
    std::int64_t replicas = 0;
    std::uint64_t seed = 0;
};

/// E^{+,N}[X_t] - E^{-,N}[X_t] estimated as twice the frequency of the (+,-)
/// discrepancy under the maximal coupling, with a 95% Wilson half-width.
inline GapEstimate boundary_gap(const GSpec& spec, const SamplingPlan& plan, std::int64_t t,
                                std::int64_t replicas, std::uint64_t seed, int threads = 1) {
    if (replicas < 100) throw StatFloorError("boundary_gap needs at least 100 replicas");
    if (t <= -plan.N() || t > plan.horizon()) throw ConfigError("gap site outside sampling region");
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(replicas), 0);
    parallel_for(replicas, threads, [&](std::int64_t r) {
        CoupledPair pair = sample_coupled_pair(spec, plan, Boundary::minus(), Boundary::plus(),
                                               seed, static_cast<std::uint64_t>(r));
        hit[static_cast<std::size_t>(r)] = pair.discrepancy_at(t) ? 1 : 0;
    });
    std::int64_t count = 0;
    for (auto h : hit) count += h;
    auto wilson = stats::wilson(count, replicas);
    GapEstimate g;
    g.estimate = 2.0 * static_cast<double>(count) / static_cast<double>(replicas);
    g.half_width = 2.0 * wilson.half_width;
    g.replicas = replicas;
    g.seed = seed;
    return g;
}

struct QuadRun {
    CoupledPair tilde;  // rule phi-tilde
    CoupledPair bar;    // identity rule, same h schedule and uniforms
    std::int64_t domination_violations = 0;  // tilde discrepancy without bar discrepancy
};

/// Four-process coupling: the tilde pair and the identity-rule pair share the
/// per-site uniforms, so tilde discrepancies are dominated by bar
/// discrepancies pathwise.
inline QuadRun quad_coupling_run(const GSpec& tilde_spec, const SamplingPlan& plan,
                                 std::uint64_t seed, std::uint64_t replica = 0) {
    if (!tilde_spec.rule.is_one_lipschitz())
        throw ConfigError("quad coupling needs a 1-Lipschitz rule: " +
                          tilde_spec.rule.describe());
    GSpec bar_spec{tilde_spec.table, MajorityRule::identity()};

    Rng rng(seed);
    QuadRun run;
    auto init_pair = [&](CoupledPair& pair) {
        auto init = [&](SamplePath& p, const char* name) {
            p.N = plan.N();
            p.horizon = plan.horizon();
            p.seed = seed;
            p.replica = replica;
            p.boundary = name;
            p.x.resize(static_cast<std::size_t>(plan.region_size()));
        };
        init(pair.lower, "minus");
        init(pair.upper, "plus");
    };
    init_pair(run.tilde);
    init_pair(run.bar);

    auto value = [&](const SamplePath& p, int sign, std::int64_t s) -> int {
        return s <= -plan.N() ? sign : p.value(s);
    };
    for (const SiteLaw& law : plan.laws()) {
        double tp1 = quenched_prob_from_psi(
            detail::psi_of_law(tilde_spec, law, [&](std::int64_t s) { return value(run.tilde.lower, -1, s); }), 1);
        double tp2 = quenched_prob_from_psi(
            detail::psi_of_law(tilde_spec, law, [&](std::int64_t s) { return value(run.tilde.upper, +1, s); }), 1);
        double bp1 = quenched_prob_from_psi(
            detail::psi_of_law(bar_spec, law, [&](std::int64_t s) { return value(run.bar.lower, -1, s); }), 1);
        double bp2 = quenched_prob_from_psi(
            detail::psi_of_law(bar_spec, law, [&](std::int64_t s) { return value(run.bar.upper, +1, s); }), 1);
        double u = rng.uniform(stream::path, replica, key(law.t));
        std::size_t i = static_cast<std::size_t>(law.t + plan.N() - 1);
        run.tilde.upper.x[i] = (u < tp2) ? 1 : -1;
        run.tilde.lower.x[i] = (u >= tp2 - tp1 && u < tp2) ? 1 : -1;
        run.bar.upper.x[i] = (u < bp2) ? 1 : -1;
        run.bar.lower.x[i] = (u >= bp2 - bp1 && u < bp2) ? 1 : -1;
        run.tilde.u.push_back(u);
        run.bar.u.push_back(u);
        run.tilde.p_lower.push_back(tp1);
        run.tilde.p_upper.push_back(tp2);
        run.bar.p_lower.push_back(bp1);
        run.bar.p_upper.push_back(bp2);
        if (run.tilde.discrepancy_at(law.t) && !run.bar.discrepancy_at(law.t))
            ++run.domination_violations;
    }
    return run;
}

}  // namespace ccc
