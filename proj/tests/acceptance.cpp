// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Statistical checks run at pinned seeds so the suite is
// deterministic; tolerances are written next to each check.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ccc/chain.hpp"
#include "ccc/environment.hpp"
#include "ccc/experiments.hpp"
#include "ccc/gfunction.hpp"
#include "ccc/io.hpp"
#include "ccc/sampler.hpp"
#include "ccc/scales.hpp"
#include "ccc/stats.hpp"

using namespace ccc;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << name
              << " -- " << detail << "\n";
    if (!pass) ++g_failures;
}

ScaleTable custom_table(std::vector<std::int64_t> ell, std::vector<double> h = {},
                        double eps = 0.5) {
    ScaleParams p;
    p.epsilon_star = eps;
    p.k_star = 1;
    p.ell_schedule = EllSchedule::custom;
    p.ell_custom = std::move(ell);
    if (!h.empty()) {
        p.h_schedule = HSchedule::custom;
        p.h_custom = std::move(h);
    }
    int k_max = static_cast<int>(p.ell_custom.size());
    return build_scale_table(p, k_max);
}

// ------------------------------------------------------------ criterion 1 --

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    const std::int64_t reps = 100000;
    Rng rng(101);
    bool pass = true;
    std::ostringstream detail;
    for (std::int64_t ell : {2, 3, 4}) {
        stats::Accumulator acc;
        for (std::int64_t r = 0; r < reps; ++r)
            acc.add(static_cast<double>(words::sample_diameter(
                ell, rng, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(ell))));
        double exact = words::expected_diameter(ell);
        bool ok = std::fabs(acc.mean() - exact) <= 4.0 * acc.se();
        pass = pass && ok;
        detail << "ell=" << ell << ": mean=" << acc.mean() << " exact=" << exact
               << " 4SE=" << 4.0 * acc.se() << (ok ? " ok; " : " VIOLATED; ");
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    pass = pass && secs < 10.0;
    detail << "runtime=" << secs << "s (<10s). Note: the quoted references 6/14/30 are the"
           << " all-ones-pattern waiting times; the pattern 1..10 has no self-overlap and its"
           << " exact E[T] is beta = 4/8/16, which the measurements confirm.";
    report(1, "waiting-time expectation", pass, detail.str());
}

// ------------------------------------------------------------ criterion 2 --

void criterion_2() {
    const std::int64_t reps = 100000;
    Rng rng(102);
    bool pass = true;
    std::ostringstream detail;
    for (std::int64_t ell : {2, 3}) {
        std::vector<std::int64_t> diam(static_cast<std::size_t>(reps));
        for (std::int64_t r = 0; r < reps; ++r)
            diam[static_cast<std::size_t>(r)] = words::sample_diameter(
                ell, rng, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(ell));
        std::int64_t beta = static_cast<std::int64_t>(1) << ell;
        for (int j = 1; j <= 3; ++j) {
            std::int64_t hits = 0;
            for (auto d : diam)
                if (d > j * beta) ++hits;
            double p_hat = static_cast<double>(hits) / static_cast<double>(reps);
            double se = stats::proportion_se(p_hat, reps);
            bool ok = p_hat <= std::exp(-j) + 3.0 * se;
            pass = pass && ok;
            detail << "ell=" << ell << ",j=" << j << ": " << p_hat << "<=" << std::exp(-j)
                   << "+3SE" << (ok ? "; " : " VIOLATED; ");
        }
    }
    detail << "strict tail P(T > j beta), which is what the renewal argument bounds; the"
           << " non-strict variant fails at j=1 (exact P(T >= beta) = 0.5 at ell=2).";
    report(2, "waiting-time tail bound", pass, detail.str());
}

// ------------------------------------------------------------ criterion 3 --

void criterion_3() {
    const std::int64_t reps = 100000;
    Rng rng(103);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(reps));
    for (std::int64_t r = 0; r < reps; ++r)
        counts[static_cast<std::size_t>(r)] =
            words::sample_with_children(3, 2, rng, static_cast<std::uint64_t>(r)).child_count;
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    double p_hat = static_cast<double>(reps) / static_cast<double>(total);
    double p_exact = words::expected_diameter(2) / 8.0;  // E[T^1]/beta_2 = 4/8
    double se = std::sqrt(p_hat * p_hat * (1.0 - p_hat) / static_cast<double>(reps));
    double ks = stats::ks_distance_geometric(counts, p_hat);

    bool match = std::fabs(p_hat - p_exact) <= 3.0 * se;
    bool bracket = (p_exact >= 0.5 && p_exact <= 1.0) &&
                   (p_hat >= 0.5 - 3.0 * se && p_hat <= 1.0 + 3.0 * se);
    bool ks_ok = ks < 0.01;
    std::ostringstream detail;
    detail << "p_hat=" << p_hat << " exact=" << p_exact << " (3SE=" << 3.0 * se << ")"
           << ", bracket [1/nu, 2/nu]=[0.5,1.0] holds for the exact p (p_hat gets 3SE slack:"
           << " the exact value sits on the lower endpoint), KS=" << ks << " (<0.01)."
           << " Note: the quoted exact 0.75 came from the erroneous E[T]=6; the verified"
           << " closed form gives p = 1/nu = 0.5.";
    report(3, "geometric word count", match && bracket && ks_ok, detail.str());
}

// ------------------------------------------------------------ criterion 4 --

void criterion_4() {
    ScaleTable table = custom_table({2, 3, 4, 5});
    const int windows = 1000;
    std::int64_t violations = 0;
    std::int64_t p1_checked = 0, p2_checked = 0;
    Rng rng(104);
    for (int w = 0; w < windows; ++w) {
        Environment env =
            Environment::sample({0, 511}, {rng.raw(0xACC, static_cast<std::uint64_t>(w))});
        BlockHierarchy hier(env, table);
        for (int k = 1; k <= 4; ++k) {
            const auto& blocks = hier.blocks(k);
            std::int64_t cursor = 0;
            const std::int64_t ell = table.row(k).ell;
            for (const Block& b : blocks) {
                if (b.a != cursor) ++violations;  // tiling
                cursor = b.b + 1;
                if (!b.determinate) continue;
                if (env.bit(b.a) != 0) ++violations;  // leading zero
                for (std::int64_t s = b.b - ell + 2; s <= b.b; ++s)
                    if (env.bit(s) != 1) ++violations;  // trailing ones
                if (k > 1) {                            // nesting
                    auto [kids, n] = hier.children(b);
                    std::int64_t c = b.a;
                    bool ok = n >= 1;
                    for (const Block& kid : kids) {
                        ok = ok && kid.a == c && kid.determinate;
                        c = kid.b + 1;
                    }
                    if (!ok || c != b.b + 1) ++violations;
                }
            }
            if (cursor != 512) ++violations;
        }
        // active-set monotonicity at decided sites
        for (std::int64_t s = 0; s <= 511; s += 7)
            for (int k = 2; k <= 4; ++k)
                if (hier.active(k, s) == Tri::yes && hier.active(k - 1, s) != Tri::yes)
                    ++violations;
        // P1 and P2 at a few probe sites
        for (std::int64_t s = 40; s <= 471; s += 48) {
            TargetResult r = hier.target(s);
            if (!r.determined() || !r.s_known) continue;
            if (r.s.size() >= 2) {
                TargetResult first = hier.target(r.s[0]);
                if (first.determined() && first.s_known) {
                    for (std::size_t i = 1; i < r.s.size(); ++i) {
                        TargetResult other = hier.target(r.s[i]);
                        if (!other.determined() || !other.s_known) continue;
                        ++p1_checked;
                        if (other.s != first.s) ++violations;
                    }
                }
            }
            std::int64_t flip_at =
                s + 1 +
                static_cast<std::int64_t>(rng.raw(0xF11, static_cast<std::uint64_t>(w), key(s)) %
                                          static_cast<std::uint64_t>(511 - s));
            Environment flipped = env.with_flipped_bit(flip_at);
            BlockHierarchy hf(flipped, table);
            TargetResult rf = hf.target(s);
            if (rf.determined() && rf.s_known) {
                ++p2_checked;
                if (rf.k_t != r.k_t || rf.s != r.s) ++violations;
            }
        }
    }
    std::ostringstream detail;
    detail << windows << " windows, violations=" << violations << " (tiling, nesting, word"
           << " structure, activity monotonicity, P1 x" << p1_checked << ", P2 x" << p2_checked
           << ")";
    report(4, "block parser invariants",
           violations == 0 && p1_checked > 100 && p2_checked > 1000, detail.str());
}

// ------------------------------------------------------------ criterion 5 --

void criterion_5() {
    ScaleTable table = custom_table({2, 4, 6}, {0.5, 0.4, 0.3});
    GSpec spec{table, MajorityRule::pure_majority()};
    GSpec tilde_spec{table, MajorityRule::tilde(MajorityRule::tanh_rule(0.9), 1.0, 0.5)};
    const std::int64_t N = 20, horizon = 5;
    const std::int64_t region = N + horizon;  // 25 sites
    const std::int64_t pair_reps = 20000, quad_reps = 5000;

    std::int64_t ordering_violations = 0, domination_violations = 0, samples = 0;
    int bad_audits = 0;
    double worst_z = 0.0;
    int envs_used = 0;
    std::uint64_t scan_from = 1;
    for (int e = 0; e < 2; ++e) {
        auto seed = find_feasible_seed(spec, {-700, 80}, N, horizon, scan_from, 20000);
        if (!seed) break;
        scan_from = *seed + 1;
        ++envs_used;
        Environment env = Environment::sample({-700, 80}, {*seed});
        BlockHierarchy hier(env, table);
        SamplingPlan plan = SamplingPlan::build(spec, hier, N, horizon);

        // maximal coupling: ordering plus marginal audit of both components
        std::vector<double> num_lo(static_cast<std::size_t>(region), 0.0);
        std::vector<double> den_lo(static_cast<std::size_t>(region), 0.0);
        std::vector<double> num_up(static_cast<std::size_t>(region), 0.0);
        std::vector<double> den_up(static_cast<std::size_t>(region), 0.0);
        for (std::int64_t r = 0; r < pair_reps; ++r) {
            CoupledPair pair =
                sample_coupled_pair(spec, plan, Boundary::minus(), Boundary::plus(),
                                    0xC5u + static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(r));
            for (std::int64_t i = 0; i < region; ++i) {
                std::int64_t t = -N + 1 + i;
                ++samples;
                if (pair.lower.value(t) > pair.upper.value(t)) ++ordering_violations;
                double p_lo = pair.p_lower[static_cast<std::size_t>(i)];
                double p_up = pair.p_upper[static_cast<std::size_t>(i)];
                num_lo[static_cast<std::size_t>(i)] += (pair.lower.value(t) == 1 ? 1.0 : 0.0) - p_lo;
                den_lo[static_cast<std::size_t>(i)] += p_lo * (1.0 - p_lo);
                num_up[static_cast<std::size_t>(i)] += (pair.upper.value(t) == 1 ? 1.0 : 0.0) - p_up;
                den_up[static_cast<std::size_t>(i)] += p_up * (1.0 - p_up);
            }
        }
        for (std::int64_t i = 0; i < region; ++i) {
            double z_lo =
                num_lo[static_cast<std::size_t>(i)] / std::sqrt(den_lo[static_cast<std::size_t>(i)]);
            double z_up =
                num_up[static_cast<std::size_t>(i)] / std::sqrt(den_up[static_cast<std::size_t>(i)]);
            worst_z = std::max({worst_z, std::fabs(z_lo), std::fabs(z_up)});
            if (std::fabs(z_lo) > 3.0) ++bad_audits;
            if (std::fabs(z_up) > 3.0) ++bad_audits;
        }

        // four-process coupling: discrepancy domination
        for (std::int64_t r = 0; r < quad_reps; ++r) {
            QuadRun run = quad_coupling_run(tilde_spec, plan, 0xD5u + static_cast<std::uint64_t>(e),
                                            static_cast<std::uint64_t>(r));
            samples += region;
            domination_violations += run.domination_violations;
            for (std::int64_t t = -N + 1; t <= horizon; ++t) {
                if (run.tilde.lower.value(t) > run.tilde.upper.value(t)) ++ordering_violations;
                if (run.bar.lower.value(t) > run.bar.upper.value(t)) ++ordering_violations;
            }
        }
    }
    std::ostringstream detail;
    detail << samples << " coupled site-samples over " << envs_used << " environments: "
           << ordering_violations << " ordering violations, " << domination_violations
           << " domination violations; marginal audit at " << 2 * region * envs_used
           << " (site,component) pairs: worst |Z|=" << worst_z << ", >3sigma count=" << bad_audits;
    report(5, "coupling exactness",
           envs_used == 2 && samples >= 1000000 && ordering_violations == 0 &&
               domination_violations == 0 && bad_audits == 0,
           detail.str());
}

// ------------------------------------------------------------ criterion 6 --

void criterion_6() {
    // (a) full 2^n enumeration, n <= 20, 21-point m grid
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
        std::vector<double> pow_p(static_cast<std::size_t>(n) + 1);
        std::vector<double> pow_q(static_cast<std::size_t>(n) + 1);
        for (int i = -10; i <= 10; ++i) {
            double m = 0.1 * i;
            double p = 0.5 * (1.0 + m), q = 1.0 - p;
            pow_p[0] = pow_q[0] = 1.0;
            for (int j = 1; j <= n; ++j) {
                pow_p[static_cast<std::size_t>(j)] = pow_p[static_cast<std::size_t>(j - 1)] * p;
                pow_q[static_cast<std::size_t>(j)] = pow_q[static_cast<std::size_t>(j - 1)] * q;
            }
            double leq = 0.0, lt = 0.0, c_leq = 0.0, c_lt = 0.0;  // Kahan pairs
            for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
                int plus = __builtin_popcountll(mask);
                int sum = 2 * plus - n;
                double prob =
                    pow_p[static_cast<std::size_t>(plus)] * pow_q[static_cast<std::size_t>(n - plus)];
                if (sum <= 0) {
                    double y = prob - c_leq, tt = leq + y;
                    c_leq = (tt - leq) - y;
                    leq = tt;
                }
                if (sum < 0) {
                    double y = prob - c_lt, tt = lt + y;
                    c_lt = (tt - lt) - y;
                    lt = tt;
                }
            }
            auto fast = exact_sign_flip_prob(n, m);
            worst = std::max(worst, std::fabs(fast.p_leq0 - leq));
            worst = std::max(worst, std::fabs(fast.p_lt0 - lt));
        }
    }
    bool enum_ok = worst <= 1e-12;

    // (b) Monte Carlo cross-check at n = 1000
    const std::int64_t reps = 100000;
    Rng rng(106);
    std::int64_t hits = 0;
    for (std::int64_t r = 0; r < reps; ++r)
        hits += step_down(1.0, 1000, 0.1, MajorityRule::identity(), rng, stream::chain,
                          static_cast<std::uint64_t>(r), 0) <= 0.0;
    double exact = exact_sign_flip_prob(1000, 0.1).p_leq0;
    double p_hat = static_cast<double>(hits) / static_cast<double>(reps);
    double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(reps));
    bool mc_ok = std::fabs(p_hat - exact) <= 3.0 * se;

    // (c) the e^{-m^2 n/16} bound wherever m^2 n >= 64
    bool bound_ok = true;
    int bound_points = 0;
    for (std::int64_t n : {1024, 4096, 16384, 65536})
        for (double m : {0.0625, 0.125, 0.25, 0.5}) {
            if (m * m * static_cast<double>(n) < 64.0) continue;
            ++bound_points;
            if (exact_sign_flip_prob(n, m).p_leq0 >
                std::exp(-m * m * static_cast<double>(n) / 16.0))
                bound_ok = false;
        }
    std::ostringstream detail;
    detail << "enumeration max |diff|=" << worst << " (<=1e-12, exact to double precision)"
           << "; MC n=1000: p_hat=" << p_hat << " exact=" << exact << " (3SE=" << 3.0 * se << ")"
           << "; bound p<=e^{-m^2 n/16} at " << bound_points << " grid points"
           << (bound_ok ? " all hold" : " VIOLATED");
    report(6, "sign-flip oracle", enum_ok && mc_ok && bound_ok, detail.str());
}

// ------------------------------------------------------------ criterion 7 --

void criterion_7() {
    ChainSpec spec = ChainSpec::constant(5, 101, 0.5, MajorityRule::identity());
    const std::int64_t reps = 100000;
    stats::Accumulator acc;
    for (std::int64_t r = 0; r < reps; ++r)
        acc.add(run_chain(spec, 1.0, 107, static_cast<std::uint64_t>(r)).xi_at(0));
    double err = std::fabs(acc.mean() - 0.03125);
    std::ostringstream detail;
    detail << "E[xi_0 | xi_5 = 1] = " << acc.mean() << " vs 0.5^5 = 0.03125, |err|=" << err
           << " <= 3SE=" << 3.0 * acc.se();
    report(7, "linear-rule contraction", err <= 3.0 * acc.se(), detail.str());
}

// ------------------------------------------------------------ criterion 8 --

void criterion_8() {
    ChainSpec spec = ChainSpec::constant(10, 10000, 0.5, MajorityRule::pure_majority());
    const std::int64_t reps = 1000;
    std::int64_t plus = 0;
    for (std::int64_t r = 0; r < reps; ++r)
        plus += run_chain(spec, 1.0, 108, static_cast<std::uint64_t>(r)).sigma_at(0) == 1;
    double frac = static_cast<double>(plus) / static_cast<double>(reps);
    double flip = exact_sign_flip_prob(10000, 0.5).p_leq0;
    std::ostringstream detail;
    detail << "fraction sigma_0=+ is " << frac << " (>=0.99); exact per-step flip prob " << flip
           << " ~ e^{-156}";
    report(8, "pure-rule sign persistence", frac >= 0.99, detail.str());
}

// ------------------------------------------------------------ criterion 9 --

bool monotone_tail(const std::vector<double>& v, int window) {
    if (static_cast<int>(v.size()) < window + 1) return false;
    bool non_inc = true, non_dec = true;
    for (std::size_t i = v.size() - static_cast<std::size_t>(window); i < v.size(); ++i) {
        if (v[i] > v[i - 1]) non_inc = false;
        if (v[i] < v[i - 1]) non_dec = false;
    }
    return non_inc || non_dec;
}

void criterion_9() {
    ScaleParams p;
    p.epsilon_star = 0.5;
    p.k_star = 7;
    p.h_schedule = HSchedule::power_law;

    p.alpha = 0.1;
    CriterionReport conv = criterion_series(build_scale_table(p, 41), 40);
    p.alpha = 0.4;
    CriterionReport div = criterion_series(build_scale_table(p, 41), 40);

    bool verdicts = conv.verdict == "summable" && div.verdict == "divergent";
    bool monotone = monotone_tail(conv.conv_terms, 10) && monotone_tail(conv.div_terms, 10) &&
                    monotone_tail(div.conv_terms, 10) && monotone_tail(div.div_terms, 10);
    std::ostringstream detail;
    detail << "alpha=0.1 -> " << conv.verdict << ", alpha=0.4 -> " << div.verdict
           << "; emitted series monotone over the last 10 terms in both regimes: "
           << (monotone ? "yes" : "no")
           << ". Verdict heuristic: ratio<1/2 over last 10 + tail<1e-12 => summable;"
           << " last 10 terms >= 0.01 => divergent (applied to the n1 convergence-test terms).";
    report(9, "criterion series", verdicts && monotone, detail.str());
}

// ----------------------------------------------------------- criterion 10 --

void criterion_10() {
    bool pass = true;
    std::ostringstream detail;
    // pure rule preserves the seed sign on a 41-point grid
    std::vector<double> h(12, 0.3);
    for (int i = -20; i <= 20; ++i) {
        double mu = 0.05 * i;
        auto traj = toy_iterate(MajorityRule::pure_majority(), h, mu);
        if (i == 0) {
            for (double v : traj)
                if (v != 0.0) pass = false;
        } else {
            for (std::size_t j = 0; j + 1 < traj.size(); ++j)
                if ((mu > 0 && traj[j] <= 0.0) || (mu < 0 && traj[j] >= 0.0)) pass = false;
        }
    }
    detail << "pure rule: sign preserved at 41 grid points, mu=0 fixed; identity rule:";
    // identity rule contraction within ceil(log(1e6)/log(1/h)) steps
    for (double hv : {0.3, 0.5, 0.7}) {
        int steps = static_cast<int>(std::ceil(std::log(1e6) / std::log(1.0 / hv)));
        std::vector<double> hs(static_cast<std::size_t>(steps), hv);
        auto traj = toy_iterate(MajorityRule::identity(), hs, 1.0);
        bool ok = std::fabs(traj.front()) < 1e-6;
        pass = pass && ok;
        detail << " h=" << hv << ": |mu|=" << traj.front() << " after " << steps << " steps"
               << (ok ? " ok;" : " VIOLATED;");
    }
    report(10, "toy model", pass, detail.str());
}

// ----------------------------------------------------------- criterion 11 --

void criterion_11() {
    ScaleTable table = custom_table({2, 3, 4}, {0.5, 0.4, 0.3});
    GSpec spec{table, MajorityRule::pure_majority()};
    std::int64_t probes = 0, bound_violations = 0, zero_branch = 0, zero_violations = 0;

    // Part A: exhaustive over all environments on [-10, 0] and all flip
    // patterns of the disagreeing tail, histories enumerated by plus-counts.
    {
        const std::int64_t W = 11;
        const std::int64_t n_envs = static_cast<std::int64_t>(1) << W;
        std::vector<Environment> envs;
        envs.reserve(static_cast<std::size_t>(n_envs));
        for (std::int64_t bitsv = 0; bitsv < n_envs; ++bitsv) {
            std::vector<std::uint8_t> bits(static_cast<std::size_t>(W));
            for (std::int64_t i = 0; i < W; ++i)
                bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((bitsv >> i) & 1);
            envs.push_back(Environment::from_bits({-10, 0}, std::move(bits)));
        }
        std::vector<BlockHierarchy> hiers;
        hiers.reserve(static_cast<std::size_t>(n_envs));
        std::vector<TargetResult> targets(static_cast<std::size_t>(n_envs));
        for (std::int64_t i = 0; i < n_envs; ++i) {
            hiers.emplace_back(envs[static_cast<std::size_t>(i)], table);
            targets[static_cast<std::size_t>(i)] = hiers.back().target(0);
        }
        auto hist_map = [](const std::vector<std::int64_t>& sites, std::int64_t j,
                           std::int64_t shared_plus, std::int64_t free_plus) {
            std::map<std::int64_t, int> m;
            std::int64_t cs = 0, cf = 0;
            for (std::int64_t s : sites) {
                if (s >= -j)
                    m[s] = (cs++ < shared_plus) ? 1 : -1;
                else
                    m[s] = (cf++ < free_plus) ? 1 : -1;
            }
            return m;
        };
        for (std::int64_t j = 4; j <= 7; ++j) {
            const double bound = 0.5;  // h at max(k-1, k_star): beta_1 <= j < beta_2
            // environment bits of [-j, 0] live in the low j+1 bits of the index
            const std::uint64_t head_shift = static_cast<std::uint64_t>(W - 1 - j);
            for (std::int64_t a = 0; a < n_envs; ++a) {
                const TargetResult& ta = targets[static_cast<std::size_t>(a)];
                if (!ta.determined() || !ta.s_known) continue;
                for (std::int64_t b = a + 1; b < n_envs; ++b) {
                    if ((static_cast<std::uint64_t>(a) >> head_shift) !=
                        (static_cast<std::uint64_t>(b) >> head_shift))
                        continue;
                    const TargetResult& tb = targets[static_cast<std::size_t>(b)];
                    if (!tb.determined() || !tb.s_known) continue;
                    std::int64_t sa_shared = 0, sa_free = 0, sb_shared = 0, sb_free = 0;
                    for (std::int64_t s : ta.s) (s >= -j ? sa_shared : sa_free)++;
                    for (std::int64_t s : tb.s) (s >= -j ? sb_shared : sb_free)++;
                    bool trivially_equal = ta.s == tb.s && sa_free == 0 && sb_free == 0 &&
                                           ta.k_t == tb.k_t;
                    std::int64_t shared_hi =
                        trivially_equal ? 1 : std::max(sa_shared, sb_shared);
                    for (std::int64_t sp = 0; sp <= shared_hi; ++sp) {
                        for (std::int64_t fa = 0; fa <= sa_free; ++fa) {
                            for (std::int64_t fb = 0; fb <= sb_free; ++fb) {
                                auto ha = hist_map(ta.s, j, std::min(sp, sa_shared), fa);
                                auto hb = hist_map(tb.s, j, std::min(sp, sb_shared), fb);
                                double probe =
                                    variation_probe(spec, hiers[static_cast<std::size_t>(a)], ha,
                                                    hiers[static_cast<std::size_t>(b)], hb, j);
                                ++probes;
                                if (probe > bound + 1e-12) ++bound_violations;
                                if (trivially_equal && probe != 0.0) ++bound_violations;
                            }
                        }
                    }
                }
            }
        }
    }

    // Part B: randomized pairs with agreement length j = beta_3 = 16; the
    // probe must vanish exactly whenever k_0 <= k - 2 = 1.
    {
        const std::int64_t j = 16;
        Rng rng(111);
        for (int trial = 0; trial < 10000; ++trial) {
            Environment ea =
                Environment::sample({-24, 0}, {rng.raw(0xAAu, static_cast<std::uint64_t>(trial))});
            std::vector<std::uint8_t> bits = ea.bits();
            Rng rng2(rng.raw(0xBBu, static_cast<std::uint64_t>(trial)));
            for (std::int64_t t = -24; t < -j; ++t)
                bits[static_cast<std::size_t>(t + 24)] = rng2.fair_bit(0x1u, key(t)) ? 1 : 0;
            Environment eb = Environment::from_bits({-24, 0}, std::move(bits));
            BlockHierarchy ha(ea, table), hb(eb, table);
            TargetResult ta = ha.target(0), tb = hb.target(0);
            if (!ta.determined() || !ta.s_known || !tb.determined() || !tb.s_known) continue;
            std::map<std::int64_t, int> xa, xb;
            for (std::int64_t s : ta.s) xa[s] = 1;
            for (std::int64_t s : tb.s) xb[s] = (s >= -j) ? 1 : -1;
            for (auto& [s, v] : xb)
                if (xa.count(s) && s >= -j) v = xa[s];
            double probe = variation_probe(spec, ha, xa, hb, xb, j);
            ++probes;
            double bound = 0.4;  // h_{k-1} = h_2 with beta_3 <= j
            if (probe > bound + 1e-12) ++bound_violations;
            if (ta.k_t <= 1) {
                ++zero_branch;
                if (probe != 0.0) ++zero_violations;
            }
        }
    }

    std::ostringstream detail;
    detail << probes << " probes executed; bound violations=" << bound_violations
           << "; zero-branch cases (k_0 <= k-2): " << zero_branch
           << " with exact-zero violations=" << zero_violations;
    report(11, "variation probes",
           probes > 100000 && bound_violations == 0 && zero_branch > 100 && zero_violations == 0,
           detail.str());
}

// ----------------------------------------------------------- criterion 12 --

void criterion_12() {
    ScaleTable table = custom_table({2, 3});
    auto render = [&](int threads) {
        auto reports = verify_block_laws(table, 5000, 500, 112, threads);
        CsvWriter csv(mc_reports_csv_header());
        mc_reports_csv(csv, reports);
        ordered_json j = ordered_json::array();
        for (const auto& r : reports) j.push_back(mc_report_json(r));
        return csv.str() + "\n#\n" + j.dump(2);
    };
    std::string one = render(1);
    std::string four = render(4);
    std::string eight = render(8);

    PhaseScanConfig cfg;
    cfg.alpha_grid = {0.1, 0.4};
    cfg.replicas = 300;
    cfg.depth = 4;
    auto scan_csv = [&](int threads) {
        auto pts = phase_scan(cfg, 112, threads);
        std::string out;
        for (const auto& p : pts)
            out += fmt_double(p.p_sigma_plus) + "," + fmt_double(p.e_xi) + "," +
                   fmt_double(p.persistence_lb) + ";";
        return out;
    };
    std::string s1 = scan_csv(1), s3 = scan_csv(3);

    bool pass = one == four && four == eight && s1 == s3;
    std::ostringstream detail;
    detail << "block-law CSV+JSON byte-identical across 1/4/8 threads: "
           << (one == four && four == eight ? "yes" : "NO")
           << "; phase-scan outputs identical across 1/3 threads: " << (s1 == s3 ? "yes" : "NO");
    report(12, "determinism across thread counts", pass, detail.str());
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                  : "FAILURES: " + std::to_string(g_failures))
              << " (total " << std::to_string(secs) << "s)\n";
    return g_failures == 0 ? 0 : 1;
}
