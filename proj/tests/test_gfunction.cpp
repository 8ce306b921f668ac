#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "ccc/gfunction.hpp"

using namespace ccc;

namespace {

ScaleTable table_for(std::vector<std::int64_t> ell, std::vector<double> h, double eps = 0.5) {
    ScaleParams p;
    p.epsilon_star = eps;
    p.k_star = 1;
    p.ell_schedule = EllSchedule::custom;
    p.ell_custom = ell;
    p.h_schedule = HSchedule::custom;
    p.h_custom = h;
    return build_scale_table(p, static_cast<int>(ell.size()));
}

Environment env_from(std::vector<int> bits) {
    std::vector<std::uint8_t> v(bits.begin(), bits.end());
    Interval w{0, static_cast<std::int64_t>(v.size()) - 1};
    return Environment::from_bits(w, std::move(v));
}

Environment staircase() {
    return env_from({1, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 1, 0});
}

}  // namespace

TEST_CASE("phi: built-in rules at pinned points") {
    MajorityRule pure = MajorityRule::pure_majority();
    CHECK(pure(0.3) == 1.0);
    CHECK(pure(0.0) == 0.0);
    CHECK(pure(-0.2) == -1.0);

    MajorityRule id = MajorityRule::identity();
    for (double z : {-1.0, -0.5, 0.0, 0.5, 1.0}) CHECK(id(z) == z);

    MajorityRule lin = MajorityRule::linear(2.0, 0.1);
    CHECK(lin(0.05) == Catch::Approx(0.1));
    CHECK(lin(0.5) == Catch::Approx(0.2));   // plateau at lambda*delta
    CHECK(lin(-0.5) == Catch::Approx(-0.2));

    CHECK_THROWS_AS(pure(1.5), std::domain_error);
    CHECK_THROWS_AS(id(-1.0000001), std::domain_error);
}

TEST_CASE("phi: oddness and monotonicity on a grid") {
    std::vector<MajorityRule> rules = {
        MajorityRule::pure_majority(),
        MajorityRule::identity(),
        MajorityRule::linear(3.0, 0.25),
        MajorityRule::tanh_rule(9.0),
        MajorityRule::tilde(MajorityRule::linear(2.0, 1.0), 2.0, 0.1),
        MajorityRule::custom({{0.0, 0.0}, {0.2, 0.1}, {0.6, 0.8}, {1.0, 1.0}}),
    };
    for (const auto& rule : rules) {
        double prev = rule(-1.0);
        for (int i = 0; i <= 1000; ++i) {
            double z = -1.0 + 2.0 * i / 1000.0;
            double v = rule(z);
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
            CHECK(rule(-z) == Catch::Approx(-v).margin(1e-15));
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("phi tilde: continuous at +-delta, base/lambda on the core") {
    MajorityRule base = MajorityRule::linear(2.0, 1.0);  // clipped ramp of slope 2
    double lambda = 2.0, delta = 0.1;
    MajorityRule tilde = MajorityRule::tilde(base, lambda, delta);
    for (double z : {-0.1, -0.05, 0.0, 0.05, 0.1})
        CHECK(tilde(z) == Catch::Approx(base(z) / lambda).margin(1e-15));
    CHECK(std::fabs(tilde(delta) - tilde(delta + 1e-9)) < 1e-6);
    CHECK(std::fabs(tilde(-delta) - tilde(-delta - 1e-9)) < 1e-6);
    CHECK(tilde.is_one_lipschitz());

    MajorityRule tanh_tilde = MajorityRule::tilde(MajorityRule::tanh_rule(3.0), 3.0, 0.2);
    CHECK(std::fabs(tanh_tilde(0.2) - tanh_tilde(0.2 + 1e-9)) < 1e-6);
    CHECK(tanh_tilde(0.15) == Catch::Approx(std::tanh(3.0 * 0.15) / 3.0));

    // pure majority is not Lipschitz at the origin
    CHECK_THROWS_AS(MajorityRule::tilde(MajorityRule::pure_majority(), 5.0, 0.1), ConfigError);
}

TEST_CASE("custom rule validation") {
    CHECK_THROWS_AS(MajorityRule::custom({{0.0, 0.0}, {0.5, 0.6}, {1.0, 0.4}}), ConfigError);
    CHECK_THROWS_AS(MajorityRule::custom({{0.0, 0.2}, {1.0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(MajorityRule::custom({{0.0, 0.0}, {1.0, 1.5}}), ConfigError);
    MajorityRule r = MajorityRule::custom({{0.0, 0.0}, {0.5, 0.4}, {1.0, 1.0}});
    CHECK(r(0.25) == Catch::Approx(0.2));
    CHECK(r(-0.25) == Catch::Approx(-0.2));
}

TEST_CASE("psi on a resolved target") {
    ScaleTable t = table_for({2, 4, 6}, {0.5, 0.4, 0.3});
    GSpec spec{t, MajorityRule::pure_majority()};
    Environment e = staircase();
    BlockHierarchy h(e, t);

    // t = 7 exits at scale 2 with S = {3,4,5,6} and h_2 = 0.4.
    std::map<std::int64_t, int> hist{{3, 1}, {4, 1}, {5, 1}, {6, -1}};
    CHECK(psi(spec, h, 7, hist) == Catch::Approx(0.4));

    // oddness: negating the whole history negates psi
    std::map<std::int64_t, int> neg;
    for (auto& [s, v] : hist) neg[s] = -v;
    CHECK(psi(spec, h, 7, neg) == Catch::Approx(-0.4));

    // S_t empty: psi = 0 (site 10 of the long base block below)
    ScaleTable t2 = table_for({2, 4}, {0.5, 0.4});
    GSpec spec2{t2, MajorityRule::pure_majority()};
    Environment e2 = env_from({1, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 1, 0, 0});
    BlockHierarchy h2(e2, t2);
    CHECK(psi(spec2, h2, 10, std::map<std::int64_t, int>{}) == 0.0);

    // missing history site is an error
    std::map<std::int64_t, int> partial{{3, 1}, {4, 1}};
    CHECK_THROWS_AS(psi(spec, h, 7, partial), ConfigError);
    // undetermined target is an error
    CHECK_THROWS_AS(psi(spec, h, 0, hist), BoundaryUndetermined);
}

TEST_CASE("psi cutoff: distant sites of the beginning contribute zero") {
    // Block [3,40] with children [3,26], [27,36], [37,40]; site 35 sits in the
    // beginning at distance 32 = beta_3 from the block start, so the cutoff
    // |t - a| < beta_{k_t+1} fails and psi vanishes despite S_t nonempty.
    std::vector<int> bits(46, 0);
    auto set_ones = [&](std::initializer_list<int> xs) { for (int x : xs) bits[static_cast<std::size_t>(x)] = 1; };
    set_ones({0, 1, 2});       // I_2 ends at 3
    set_ones({26});            // child [3,26] = 0^23 1
    set_ones({35, 36});        // child [27,36] = 0^8 1 1
    set_ones({38, 39, 40});    // I_2 ends at 41; child [37,40]
    set_ones({44});
    ScaleTable t = table_for({2, 4, 5}, {0.5, 0.4, 0.3});
    GSpec spec{t, MajorityRule::pure_majority()};
    Environment e = env_from(bits);
    BlockHierarchy h(e, t);

    TargetResult tr = target(h, 35);
    REQUIRE(tr.determined());
    CHECK(tr.k_t == 2);
    REQUIRE(tr.s_known);
    CHECK(tr.s.size() == 17);
    std::map<std::int64_t, int> hist;
    for (std::int64_t s : tr.s) hist[s] = 1;
    CHECK(psi(spec, h, 35, hist) == 0.0);
}

TEST_CASE("psi is non-decreasing under single-site history flips") {
    ScaleTable t = table_for({2, 4, 6}, {0.5, 0.4, 0.3});
    Environment e = staircase();
    BlockHierarchy h(e, t);
    for (const MajorityRule& rule :
         {MajorityRule::pure_majority(), MajorityRule::identity(), MajorityRule::tanh_rule(4.0)}) {
        GSpec spec{t, rule};
        std::map<std::int64_t, int> hist{{3, -1}, {4, -1}, {5, 1}, {6, -1}};
        double base = psi(spec, h, 7, hist);
        for (std::int64_t s : {3, 4, 6}) {
            auto up = hist;
            up[s] = 1;
            CHECK(psi(spec, h, 7, up) >= base - 1e-15);
        }
    }
}

TEST_CASE("quenched and joint transition values") {
    ScaleTable t = table_for({2, 4, 6}, {0.5, 0.4, 0.3});
    GSpec spec{t, MajorityRule::pure_majority()};
    Environment e = staircase();
    BlockHierarchy h(e, t);
    std::map<std::int64_t, int> hist{{3, 1}, {4, 1}, {5, 1}, {6, -1}};  // psi = 0.4

    CHECK(quenched_prob(spec, h, 7, hist, 1) == Catch::Approx(0.7));
    CHECK(quenched_prob(spec, h, 7, hist, -1) == Catch::Approx(0.3));
    CHECK(quenched_prob(spec, h, 7, hist, 1) + quenched_prob(spec, h, 7, hist, -1) ==
          Catch::Approx(1.0));

    // spin-flip symmetry: g(+|x) = g(-|-x)
    std::map<std::int64_t, int> neg;
    for (auto& [s, v] : hist) neg[s] = -v;
    CHECK(quenched_prob(spec, h, 7, hist, 1) == Catch::Approx(quenched_prob(spec, h, 7, neg, -1)));

    double total = 0.0;
    for (int x : {1, -1})
        for (int w : {0, 1}) {
            double v = joint_prob(spec, h, 7, hist, x, w);
            total += v;
            CHECK((v == Catch::Approx(0.35) || v == Catch::Approx(0.15)));
            CHECK(v >= spec.eta());
            CHECK(v <= 1.0 - spec.eta());
        }
    CHECK(total == Catch::Approx(1.0));

    // psi = 0 site: 1/2 and 1/4 everywhere
    ScaleTable t2 = table_for({2, 4}, {0.5, 0.4});
    GSpec spec2{t2, MajorityRule::pure_majority()};
    Environment e2 = env_from({1, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 1, 0, 0});
    BlockHierarchy h2(e2, t2);
    std::map<std::int64_t, int> empty;
    CHECK(quenched_prob(spec2, h2, 10, empty, 1) == 0.5);
    CHECK(joint_prob(spec2, h2, 10, empty, -1, 0) == 0.25);
}

TEST_CASE("variation probe: identical pairs give zero; preconditions enforced") {
    ScaleTable t = table_for({2, 4, 6}, {0.5, 0.4, 0.3});
    GSpec spec{t, MajorityRule::pure_majority()};

    // Shift the staircase so the probed site is the origin.
    std::vector<int> base_bits = {1, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 1, 0};
    std::vector<std::uint8_t> v(base_bits.begin(), base_bits.end());
    Environment e = Environment::from_bits({-7, 8}, v);
    BlockHierarchy h(e, t);
    REQUIRE(target(h, 0).determined());

    std::map<std::int64_t, int> hist{{-4, 1}, {-3, 1}, {-2, 1}, {-1, -1}};
    CHECK(variation_probe(spec, h, hist, h, hist, 7) == 0.0);

    // environments disagreeing inside the agreement range are rejected
    Environment e2 = e.with_flipped_bit(-2);
    BlockHierarchy h2(e2, t);
    CHECK_THROWS_AS(variation_probe(spec, h, hist, h2, hist, 7), ConfigError);
}
