#include <catch2/catch_amalgamated.hpp>

#include "ccc/config.hpp"
#include "ccc/environment.hpp"
#include "ccc/io.hpp"
#include "ccc/svg.hpp"

using namespace ccc;

TEST_CASE("csv escaping follows RFC 4180") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CsvWriter w({"a", "b"});
    w.append_row({"1", "x,y"});
    CHECK(w.str() == "a,b\r\n1,\"x,y\"\r\n");
    CHECK_THROWS_AS(w.append_row({"only-one"}), ConfigError);
}

TEST_CASE("fmt_double round-trips and uses a dot separator") {
    for (double v : {0.0, 1.0, -0.25, 0.03125, 1e-12, 3.141592653589793}) {
        CHECK(std::stod(fmt_double(v)) == v);
        CHECK(fmt_double(v).find(',') == std::string::npos);
    }
}

TEST_CASE("environment text round trip") {
    Environment e = sample_environment({-5, 9}, {12345});
    std::string text = environment_to_text(e);
    Environment back = environment_from_text(text);
    CHECK(back.window() == e.window());
    CHECK(back.seed().value == e.seed().value);
    CHECK(back.bits() == e.bits());
}

TEST_CASE("config parsing, overrides, unknown keys") {
    std::string text =
        "# experiment setup\n"
        "[scales]\n"
        "epsilon_star = 0.5\n"
        "k_star = 1\n"
        "ell = 2,3,4\n"
        "\n"
        "[run]\n"
        "replicas = 500\n"
        "seed = 7\n";
    RunConfig cfg = RunConfig::parse(text);
    CHECK(cfg.get_double("scales.epsilon_star", 0.0) == 0.5);
    CHECK(cfg.get_int("run.replicas", 0) == 500);
    cfg.set("run.replicas", "800");  // flag override
    CHECK(cfg.get_int("run.replicas", 0) == 800);
    CHECK(cfg.get_int_list("scales.ell", {}) == std::vector<std::int64_t>{2, 3, 4});

    cfg.get_int("scales.k_star", 1);
    cfg.get_uint("run.seed", 0);
    CHECK_NOTHROW(cfg.ensure_all_consumed());

    RunConfig cfg2 = RunConfig::parse(text + "typo_key = 1\n");
    cfg2.get_double("scales.epsilon_star", 0.0);
    CHECK_THROWS_WITH(cfg2.ensure_all_consumed(), Catch::Matchers::ContainsSubstring("typo_key"));

    CHECK_THROWS_AS(RunConfig::parse("key_outside = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("[sec]\nbroken line\n"), ConfigError);
    RunConfig bad = RunConfig::parse("[a]\nx = notanumber\n");
    CHECK_THROWS_AS(bad.get_double("a.x", 0.0), ConfigError);
}

TEST_CASE("scale params and rules from config") {
    RunConfig cfg = RunConfig::parse(
        "[scales]\nepsilon_star = 0.5\nk_star = 1\nk_max = 2\nell = 2,3\nh = 0.5,0.25\n"
        "[rule]\nkind = linear\nlambda = 2\ndelta = 0.1\n");
    auto [params, k_max] = scale_params_from_config(cfg);
    CHECK(params.ell_schedule == EllSchedule::custom);
    CHECK(params.h_schedule == HSchedule::custom);
    CHECK(k_max == 2);
    ScaleTable t = build_scale_table(params, k_max);
    CHECK(t.beta_int(2) == 8);
    MajorityRule r = rule_from_config(cfg);
    CHECK(r.kind() == MajorityRule::Kind::linear);
    CHECK(r(0.05) == Catch::Approx(0.1));
    CHECK_NOTHROW(cfg.ensure_all_consumed());
}

TEST_CASE("manifest hash is stable and content-sensitive") {
    RunConfig a = RunConfig::parse("[run]\nseed = 1\n[scales]\nk_star = 1\n");
    RunConfig b = RunConfig::parse("[scales]\nk_star = 1\n[run]\nseed = 1\n");
    CHECK(fnv1a(a.canonical()) == fnv1a(b.canonical()));  // order-insensitive
    RunConfig c = RunConfig::parse("[run]\nseed = 2\n[scales]\nk_star = 1\n");
    CHECK(fnv1a(a.canonical()) != fnv1a(c.canonical()));
}

TEST_CASE("svg charts render") {
    svg::Series s1{"conv", {1, 2, 3, 4}, {0.9, 0.5, 0.1, 0.001}};
    svg::Series s2{"div", {1, 2, 3, 4}, {0.2, 0.4, 0.6, 0.8}};
    std::string chart = svg::line_chart("terms", "k", "value", {s1, s2}, true);
    CHECK(chart.find("<svg") == 0);
    CHECK(chart.find("polyline") != std::string::npos);
    CHECK(chart.find("conv") != std::string::npos);

    std::string heat =
        svg::heat_map("scan", "alpha", "eps", {0.1, 0.2}, {0.4, 0.5}, {{0.0, 0.5}, {0.7, 1.0}});
    CHECK(heat.find("<svg") == 0);
    CHECK(heat.find("rect") != std::string::npos);
}

TEST_CASE("block report emits one row per block") {
    ScaleParams p;
    p.epsilon_star = 0.5;
    p.k_star = 1;
    p.ell_schedule = EllSchedule::custom;
    p.ell_custom = {2, 3};
    ScaleTable t = build_scale_table(p, 2);
    Environment e = sample_environment({0, 63}, {3});
    BlockHierarchy h(e, t);
    std::string csv = block_report_csv(h);
    std::size_t rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 1 + h.blocks(1).size() + h.blocks(2).size());
}
