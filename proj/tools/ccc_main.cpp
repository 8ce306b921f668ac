// ccc: simulator and experiment harness for multiscale chains with complete
// connections.  One subcommand per experiment; a run reads one config file,
// optionally overridden by flags, and writes CSV/JSON/SVG artifacts plus a
// manifest into its output directory.

#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccc/chain.hpp"
#include "ccc/config.hpp"
#include "ccc/environment.hpp"
#include "ccc/experiments.hpp"
#include "ccc/gfunction.hpp"
#include "ccc/io.hpp"
#include "ccc/sampler.hpp"
#include "ccc/scales.hpp"
#include "ccc/svg.hpp"

namespace fs = std::filesystem;
using namespace ccc;

namespace {

constexpr const char* kVersion = "ccc 0.1.0";

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    std::string formats;
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::int64_t replicas = 0;
    bool replicas_set = false;
    int threads = 0;
    bool threads_set = false;
    bool dry_run = false;
};

class OutputLock {
  public:
    explicit OutputLock(const fs::path& dir) : path_(dir / ".ccc.lock") {
        int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0)
            throw ConfigError("output directory is locked by another run (or stale lock): " +
                              path_.string());
        ::close(fd);
    }
    ~OutputLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }

  private:
    fs::path path_;
};

struct RunContext {
    RunConfig cfg;
    std::string subcommand;
    fs::path out;
    std::set<std::string> formats;
    std::uint64_t seed = 1;
    std::int64_t replicas = 2000;
    int threads = 0;
    bool dry_run = false;
    std::vector<std::string> outputs;

    bool wants(const std::string& fmt) const { return formats.count(fmt) > 0; }

    void emit(const std::string& name, const std::string& content) {
        write_file(out / name, content);
        outputs.push_back(name);
    }

    /// Thread count never affects results, so it stays out of the manifest:
    /// identical manifests really do mean identical outputs.
    std::string canonical_without_threads() const {
        std::string text;
        for (const auto& [k, v] : cfg.entries())
            if (k != "run.threads") text += k + "=" + v + "\n";
        return text;
    }

    void finish() {
        ordered_json manifest;
        manifest["version"] = kVersion;
        manifest["subcommand"] = subcommand;
        manifest["seed"] = seed;
        manifest["config_hash"] = fnv1a(canonical_without_threads());
        ordered_json resolved;
        for (const auto& [k, v] : cfg.entries())
            if (k != "run.threads") resolved[k] = v;
        manifest["config"] = resolved;
        manifest["outputs"] = outputs;
        write_file(out / "manifest.json", manifest.dump(2) + "\n");
        std::cout << "wrote " << outputs.size() + 1 << " files to " << out.string() << "\n";
    }
};

RunContext make_context(const GlobalOpts& g, const std::string& subcommand) {
    RunContext ctx;
    ctx.subcommand = subcommand;
    if (!g.config_path.empty()) ctx.cfg = RunConfig::parse(read_file(g.config_path));
    if (g.seed_set) ctx.cfg.set("run.seed", std::to_string(g.seed));
    if (g.replicas_set) ctx.cfg.set("run.replicas", std::to_string(g.replicas));
    if (g.threads_set) ctx.cfg.set("run.threads", std::to_string(g.threads));
    if (!g.out_dir.empty()) ctx.cfg.set("run.out", g.out_dir);
    if (!g.formats.empty()) ctx.cfg.set("run.formats", g.formats);

    std::string experiment = ctx.cfg.get_string("run.experiment", subcommand);
    if (experiment != subcommand)
        throw ConfigError("run.experiment=" + experiment + " does not match subcommand " + subcommand);
    ctx.seed = ctx.cfg.get_uint("run.seed", 1);
    ctx.replicas = ctx.cfg.get_int("run.replicas", 2000);
    ctx.threads = static_cast<int>(ctx.cfg.get_int("run.threads", 0));
    ctx.out = ctx.cfg.get_string("run.out", "out-" + subcommand);
    for (const std::string& f : RunConfig::split(ctx.cfg.get_string("run.formats", "csv,json,svg"), ',')) {
        if (f != "csv" && f != "json" && f != "svg")
            throw ConfigError("run.formats entries must be csv, json or svg; got " + f);
        ctx.formats.insert(f);
    }
    ctx.dry_run = g.dry_run;
    return ctx;
}

/// Validate-only exit: print the resolved configuration and touch nothing.
bool handle_dry_run(RunContext& ctx) {
    if (!ctx.dry_run) return false;
    ordered_json j;
    j["subcommand"] = ctx.subcommand;
    j["config_hash"] = fnv1a(ctx.cfg.canonical());
    ordered_json resolved;
    for (const auto& [k, v] : ctx.cfg.entries()) resolved[k] = v;
    j["config"] = resolved;
    std::cout << j.dump(2) << "\n";
    return true;
}

void prepare_out(RunContext& ctx) { fs::create_directories(ctx.out); }

Environment environment_from_context(RunContext& ctx) {
    std::int64_t lo = ctx.cfg.get_int("env.window_lo", -512);
    std::int64_t hi = ctx.cfg.get_int("env.window_hi", 511);
    std::uint64_t env_seed = ctx.cfg.get_uint("env.seed", ctx.seed);
    return Environment::sample({lo, hi}, {env_seed});
}

// ---------------------------------------------------------------- scales ---

void run_scales(RunContext& ctx) {
    auto [params, k_max] = scale_params_from_config(ctx.cfg);
    ctx.cfg.ensure_all_consumed();
    ScaleTable table = build_scale_table(params, k_max);
    if (handle_dry_run(ctx)) return;
    prepare_out(ctx);
    OutputLock lock(ctx.out);

    CsvWriter csv({"k", "ell", "beta", "log2_beta", "nu", "h", "n1", "n2"});
    ordered_json rows = ordered_json::array();
    for (const ScaleRow& r : table.rows()) {
        std::string beta = r.beta ? std::to_string(*r.beta) : "";
        std::string nu = r.nu_log2 ? fmt_double(std::exp2(static_cast<double>(*r.nu_log2))) : "";
        std::string h = r.h ? fmt_double(*r.h) : "";
        std::string n2 = r.n2 ? fmt_double(*r.n2) : "";
        csv.append_row({std::to_string(r.k), std::to_string(r.ell), beta, fmt_double(r.log2_beta),
                        nu, h, fmt_double(r.n1), n2});
        ordered_json j;
        j["k"] = r.k;
        j["ell"] = r.ell;
        if (r.beta) j["beta"] = *r.beta;
        j["log2_beta"] = r.log2_beta;
        if (r.nu_log2) j["nu_log2"] = *r.nu_log2;
        if (r.h) j["h"] = *r.h;
        j["n1"] = r.n1;
        if (r.n2) j["n2"] = *r.n2;
        rows.push_back(j);
    }
    if (ctx.wants("csv")) ctx.emit("scales.csv", csv.str());
    if (ctx.wants("json")) ctx.emit("scales.json", rows.dump(2) + "\n");
    ctx.finish();
}

// ---------------------------------------------------------------- blocks ---

void run_blocks(RunContext& ctx) {
    auto [params, k_max] = scale_params_from_config(ctx.cfg);
    Environment env = environment_from_context(ctx);
    ctx.cfg.ensure_all_consumed();
    ScaleTable table = build_scale_table(params, k_max);
    if (handle_dry_run(ctx)) return;
    prepare_out(ctx);
    OutputLock lock(ctx.out);

    BlockHierarchy hier(env, table);
    ctx.emit("env.txt", environment_to_text(env));
    if (ctx.wants("csv")) ctx.emit("blocks.csv", block_report_csv(hier));
    if (ctx.wants("json")) {
        ordered_json j;
        j["window"] = {env.window().lo, env.window().hi};
        ordered_json scales = ordered_json::array();
        for (int k = hier.k_lo(); k <= hier.k_hi(); ++k) {
            ordered_json s;
            s["k"] = k;
            s["blocks"] = hier.blocks(k).size();
            std::int64_t determinate = 0;
            for (const Block& b : hier.blocks(k)) determinate += b.determinate;
            s["determinate"] = determinate;
            scales.push_back(s);
        }
        j["scales"] = scales;
        ctx.emit("blocks_summary.json", j.dump(2) + "\n");
    }
    ctx.finish();
}

// ------------------------------------------------------------- env-stats ---

void run_env_stats(RunContext& ctx) {
    auto [params, k_max] = scale_params_from_config(ctx.cfg);
    std::int64_t word_replicas = ctx.cfg.get_int("env_stats.word_replicas", ctx.replicas);
    std::int64_t env_replicas =
        ctx.cfg.get_int("env_stats.env_replicas", std::max<std::int64_t>(200, ctx.replicas / 10));
    bool connectivity = ctx.cfg.get_bool("env_stats.connectivity", false);
    int conn_k = static_cast<int>(ctx.cfg.get_int("env_stats.connectivity_k", params.k_star + 1));
    int conn_kmax = static_cast<int>(ctx.cfg.get_int("env_stats.connectivity_kmax", k_max - 1));
    ctx.cfg.ensure_all_consumed();
    ScaleTable table = build_scale_table(params, k_max);
    if (handle_dry_run(ctx)) return;
    prepare_out(ctx);
    OutputLock lock(ctx.out);

    auto reports = verify_block_laws(table, word_replicas, env_replicas, ctx.seed, ctx.threads);
    if (connectivity)
        reports.push_back(
            connectivity_rate(table, conn_k, conn_kmax, env_replicas, ctx.seed + 1, ctx.threads));

    if (ctx.wants("csv")) {
        CsvWriter csv(mc_reports_csv_header());
        mc_reports_csv(csv, reports);
        ctx.emit("block_laws.csv", csv.str());
    }
    if (ctx.wants("json")) {
        ordered_json j = ordered_json::array();
        for (const auto& r : reports) j.push_back(mc_report_json(r));
        ctx.emit("block_laws.json", j.dump(2) + "\n");
    }
    bool all_pass = true;
    for (const auto& r : reports) all_pass = all_pass && r.pass;
    std::cout << (all_pass ? "all block-law checks passed\n" : "some block-law checks FAILED\n");
    ctx.finish();
}

// ----------------------------------------------------------------- chain ---

void run_chain_cmd(RunContext& ctx) {
    MajorityRule rule = rule_from_config(ctx.cfg);
    int k_lo = static_cast<int>(ctx.cfg.get_int("chain.k_lo", 0));
    int k_hi = static_cast<int>(ctx.cfg.get_int("chain.k_hi", k_lo + 5));
    std::size_t len = static_cast<std::size_t>(k_hi - k_lo + 1);
    auto n_list = ctx.cfg.get_int_list("chain.n", {101});
    auto h_list = ctx.cfg.get_double_list("chain.h", {0.5});
    if (n_list.size() == 1) n_list.assign(len, n_list[0]);
    if (h_list.size() == 1) h_list.assign(len, h_list[0]);
    double xi_m = ctx.cfg.get_double("chain.xi_m", 1.0);
    bool coupled = ctx.cfg.get_bool("chain.coupled", false);
    double lambda = ctx.cfg.get_double("chain.lambda", 1.0);
    double delta = ctx.cfg.get_double("chain.delta", 1.0);
    std::int64_t dump = ctx.cfg.get_int("chain.dump_trajectories", 16);
    ctx.cfg.ensure_all_consumed();
    ChainSpec spec{k_lo, k_hi, n_list, h_list, rule};
    spec.validate();
    if (handle_dry_run(ctx)) return;
    prepare_out(ctx);
    OutputLock lock(ctx.out);

    stats::Accumulator xi_end;
    std::int64_t plus = 0, decoupled = 0;
    CsvWriter csv(coupled
                      ? std::vector<std::string>{"replica", "k", "xi", "sigma", "xi_tilde", "gamma"}
                      : std::vector<std::string>{"replica", "k", "xi", "sigma"});
    for (std::int64_t r = 0; r < ctx.replicas; ++r) {
        if (coupled) {
            CoupledChainRun run =
                coupled_chain_run(spec, lambda, delta, xi_m, ctx.seed, static_cast<std::uint64_t>(r));
            xi_end.add(run.main.xi_at(k_lo));
            plus += run.main.sigma_at(k_lo) == 1;
            decoupled += run.decoupling_scale >= k_lo;
            if (r < dump)
                for (int k = k_hi; k >= k_lo; --k)
                    csv.append_row({std::to_string(r), std::to_string(k),
                                    fmt_double(run.main.xi_at(k)),
                                    std::to_string(run.main.sigma_at(k)),
                                    fmt_double(run.tilde.xi_at(k)),
                                    std::to_string(run.gamma_at(k))});
        } else {
            Trajectory t = run_chain(spec, xi_m, ctx.seed, static_cast<std::uint64_t>(r));
            xi_end.add(t.xi_at(k_lo));
            plus += t.sigma_at(k_lo) == 1;
            if (r < dump)
                for (int k = k_hi; k >= k_lo; --k)
                    csv.append_row({std::to_string(r), std::to_string(k), fmt_double(t.xi_at(k)),
                                    std::to_string(t.sigma_at(k))});
        }
    }
    auto wilson = stats::wilson(plus, ctx.replicas);
    ordered_json j;
    j["replicas"] = ctx.replicas;
    j["seed"] = ctx.seed;
    j["rule"] = rule.describe();
    j["xi_m"] = xi_m;
    j["e_xi_end"] = xi_end.mean();
    j["e_xi_end_half_width"] = stats::z95 * xi_end.se();
    j["p_sigma_plus"] = static_cast<double>(plus) / static_cast<double>(ctx.replicas);
    j["p_sigma_plus_half_width"] = wilson.half_width;
    if (coupled)
        j["decoupled_fraction"] = static_cast<double>(decoupled) / static_cast<double>(ctx.replicas);
    if (ctx.wants("csv")) ctx.emit("trajectories.csv", csv.str());
    if (ctx.wants("json")) ctx.emit("chain_summary.json", j.dump(2) + "\n");
    ctx.finish();
}

// -------------------------------------------------------------- criterion ---

void run_criterion(RunContext& ctx) {
    auto [params, k_max] = scale_params_from_config(ctx.cfg);
    int K = static_cast<int>(ctx.cfg.get_int("criterion.k", k_max - 1));
    ctx.cfg.ensure_all_consumed();
    ScaleTable table = build_scale_table(params, k_max);
    if (handle_dry_run(ctx)) return;
    prepare_out(ctx);
    OutputLock lock(ctx.out);

    CriterionReport rep = criterion_series(table, K);
    CsvWriter csv({"k", "conv_term", "conv_partial_sum", "div_term", "div_partial_sum"});
    svg::Series conv{"conv test: exp(-h^2 n1/16)", {}, {}};
    svg::Series div{"div test: exp(-2 h^2 n2)", {}, {}};
    for (std::size_t i = 0; i < rep.conv_terms.size(); ++i) {
        int k = rep.k_first + static_cast<int>(i);
        csv.append_row({std::to_string(k), fmt_double(rep.conv_terms[i]),
                        fmt_double(rep.conv_partial[i]), fmt_double(rep.div_terms[i]),
                        fmt_double(rep.div_partial[i])});
        conv.x.push_back(k);
        conv.y.push_back(rep.conv_terms[i]);
        div.x.push_back(k);
        div.y.push_back(rep.div_terms[i]);
    }
    ordered_json j;
    j["k_first"] = rep.k_first;
    j["k_last"] = rep.k_last;
    j["verdict"] = rep.verdict;
    j["conv_terms"] = rep.conv_terms;
    j["div_terms"] = rep.div_terms;
    if (ctx.wants("csv")) ctx.emit("criterion.csv", csv.str());
    if (ctx.wants("json")) ctx.emit("criterion.json", j.dump(2) + "\n");
    if (ctx.wants("svg"))
        ctx.emit("criterion.svg",
                 svg::line_chart("criterion series terms", "k", "term", {conv, div}, true));
    std::cout << "verdict: " << rep.verdict << "\n";
    ctx.finish();
}

// ------------------------------------------------------------------- toy ---

void run_toy(RunContext& ctx) {
    MajorityRule rule = rule_from_config(ctx.cfg);
    double mu_m = ctx.cfg.get_double("toy.mu_m", 1.0);
    auto h_list = ctx.cfg.get_double_list("toy.h", {0.5});
    std::int64_t depth = ctx.cfg.get_int("toy.depth", 5);
    if (h_list.size() == 1) h_list.assign(static_cast<std::size_t>(depth), h_list[0]);
    ctx.cfg.ensure_all_consumed();
    if (handle_dry_run(ctx)) return;
    prepare_out(ctx);
    OutputLock lock(ctx.out);

    std::vector<double> mu = toy_iterate(rule, h_list, mu_m);
    CsvWriter csv({"k", "mu"});
    svg::Series s{"mu_k", {}, {}};
    for (std::size_t i = 0; i < mu.size(); ++i) {
        csv.append_row({std::to_string(i), fmt_double(mu[i])});
        s.x.push_back(static_cast<double>(i));
        s.y.push_back(mu[i]);
    }
    ordered_json j;
    j["rule"] = rule.describe();
    j["mu"] = mu;
    if (ctx.wants("csv")) ctx.emit("toy.csv", csv.str());
    if (ctx.wants("json")) ctx.emit("toy.json", j.dump(2) + "\n");
    if (ctx.wants("svg")) ctx.emit("toy.svg", svg::line_chart("toy iteration", "k", "mu", {s}));
    ctx.finish();
}

// ------------------------------------------------------------ phase-scan ---

void run_phase_scan(RunContext& ctx) {
    PhaseScanConfig cfg;
    cfg.alpha_grid = ctx.cfg.get_double_list("phase.alpha_grid", {0.1, 0.2, 0.3, 0.4});
    cfg.eps_grid = ctx.cfg.get_double_list("phase.eps_grid", {0.5});
    cfg.rules.clear();
    for (const std::string& name : RunConfig::split(ctx.cfg.get_string("phase.rules", "pure"), ','))
        cfg.rules.push_back(rule_by_name(name));
    cfg.depth = static_cast<int>(ctx.cfg.get_int("phase.depth", 6));
    cfg.n_abstract = ctx.cfg.get_int("phase.n_abstract", 1001);
    cfg.criterion_k = static_cast<int>(ctx.cfg.get_int("phase.criterion_k", 40));
    cfg.replicas = ctx.replicas;
    ctx.cfg.ensure_all_consumed();
    if (handle_dry_run(ctx)) return;
    prepare_out(ctx);
    OutputLock lock(ctx.out);

    auto points = phase_scan(cfg, ctx.seed, ctx.threads);
    CsvWriter csv({"epsilon_star", "alpha", "rule", "k_star", "criterion_verdict", "persistence_lb",
                   "p_sigma_plus", "p_sigma_plus_hw", "e_xi", "e_xi_hw", "h_product"});
    for (const auto& p : points)
        csv.append_row({fmt_double(p.epsilon_star), fmt_double(p.alpha), p.rule,
                        std::to_string(p.k_star), p.criterion_verdict, fmt_double(p.persistence_lb),
                        fmt_double(p.p_sigma_plus), fmt_double(p.p_sigma_plus_hw),
                        fmt_double(p.e_xi), fmt_double(p.e_xi_hw), fmt_double(p.h_product)});
    if (ctx.wants("csv")) ctx.emit("phase.csv", csv.str());
    if (ctx.wants("json")) {
        ordered_json arr = ordered_json::array();
        for (const auto& p : points) {
            ordered_json j;
            j["epsilon_star"] = p.epsilon_star;
            j["alpha"] = p.alpha;
            j["rule"] = p.rule;
            j["k_star"] = p.k_star;
            j["criterion_verdict"] = p.criterion_verdict;
            j["persistence_lb"] = p.persistence_lb;
            j["p_sigma_plus"] = p.p_sigma_plus;
            j["p_sigma_plus_hw"] = p.p_sigma_plus_hw;
            j["e_xi"] = p.e_xi;
            j["e_xi_hw"] = p.e_xi_hw;
            arr.push_back(j);
        }
        ctx.emit("phase.json", arr.dump(2) + "\n");
    }
    if (ctx.wants("svg") && !cfg.rules.empty()) {
        // heat map of the sign-persistence estimate for the first rule
        std::vector<std::vector<double>> grid;
        for (double eps : cfg.eps_grid) {
            std::vector<double> row;
            for (double alpha : cfg.alpha_grid)
                for (const auto& p : points)
                    if (p.epsilon_star == eps && p.alpha == alpha &&
                        p.rule == cfg.rules[0].describe())
                        row.push_back(p.p_sigma_plus);
            grid.push_back(row);
        }
        ctx.emit("phase.svg", svg::heat_map("P(sigma_k' = + | xi_M = 1)", "alpha", "epsilon_star",
                                            cfg.alpha_grid, cfg.eps_grid, grid));
    }
    ctx.finish();
}

// ------------------------------------------------------------------- gap ---

void run_gap(RunContext& ctx) {
    auto [params, k_max] = scale_params_from_config(ctx.cfg);
    MajorityRule rule = rule_from_config(ctx.cfg);
    std::int64_t lo = ctx.cfg.get_int("env.window_lo", -512);
    std::int64_t hi = ctx.cfg.get_int("env.window_hi", 63);
    std::uint64_t env_seed = ctx.cfg.get_uint("env.seed", ctx.seed);
    auto sites = ctx.cfg.get_int_list("gap.sites", {0});
    auto n_sweep = ctx.cfg.get_int_list("gap.n_sweep", {8, 16});
    bool auto_scan = ctx.cfg.get_bool("gap.auto_scan", true);
    int scan_tries = static_cast<int>(ctx.cfg.get_int("gap.scan_tries", 2000));
    ctx.cfg.ensure_all_consumed();
    ScaleTable table = build_scale_table(params, k_max);
    GSpec spec{table, rule};
    if (handle_dry_run(ctx)) return;
    prepare_out(ctx);
    OutputLock lock(ctx.out);

    std::int64_t horizon = *std::max_element(sites.begin(), sites.end());
    std::int64_t n_max = *std::max_element(n_sweep.begin(), n_sweep.end());
    if (auto_scan) {
        auto found = find_feasible_seed(spec, {lo, hi}, n_max, horizon, env_seed, scan_tries);
        if (!found)
            throw BoundaryUndetermined("no feasible environment seed found in " +
                                       std::to_string(scan_tries) + " tries");
        env_seed = *found;
    }
    Environment env = Environment::sample({lo, hi}, {env_seed});
    BlockHierarchy hier(env, table);
    GapDiagnostic diag =
        uniqueness_diagnostic(spec, hier, sites, n_sweep, ctx.replicas, ctx.seed, ctx.threads);

    CsvWriter csv({"site", "N", "gap", "half_width"});
    for (const auto& row : diag.rows)
        csv.append_row({std::to_string(row.site), std::to_string(row.N), fmt_double(row.estimate),
                        fmt_double(row.half_width)});
    ordered_json j;
    j["env_seed"] = env_seed;
    j["verdict"] = diag.verdict;
    j["trend_non_increasing"] = diag.trend_non_increasing;
    ordered_json rows = ordered_json::array();
    for (const auto& row : diag.rows) {
        ordered_json rj;
        rj["site"] = row.site;
        rj["N"] = row.N;
        rj["estimate"] = row.estimate;
        rj["half_width"] = row.half_width;
        rows.push_back(rj);
    }
    j["rows"] = rows;
    if (ctx.wants("csv")) ctx.emit("gap.csv", csv.str());
    if (ctx.wants("json")) ctx.emit("gap.json", j.dump(2) + "\n");
    if (ctx.wants("svg")) {
        std::vector<svg::Series> series;
        for (std::int64_t site : sites) {
            svg::Series s{"site " + std::to_string(site), {}, {}};
            for (const auto& row : diag.rows)
                if (row.site == site) {
                    s.x.push_back(static_cast<double>(row.N));
                    s.y.push_back(row.estimate);
                }
            series.push_back(std::move(s));
        }
        ctx.emit("gap.svg", svg::line_chart("boundary gap vs N", "N", "gap", series));
    }
    std::cout << "verdict: " << diag.verdict << "\n";
    ctx.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiscale chains with complete connections: experiment harness"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "run-config file");
    auto* seed_opt = app.add_option("--seed", g.seed, "master seed");
    auto* rep_opt = app.add_option("--replicas", g.replicas, "Monte Carlo replicas");
    auto* thr_opt = app.add_option("--threads", g.threads, "worker threads (0 = auto)");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--format", g.formats, "comma list of csv,json,svg");
    app.add_flag("--dry-run", g.dry_run, "validate and print the resolved config only");

    app.add_subcommand("scales", "print the deterministic scale table");
    app.add_subcommand("env-stats", "verify the quantitative block laws by Monte Carlo");
    app.add_subcommand("blocks", "parse one environment window and dump its blocks");
    app.add_subcommand("chain", "run reduced magnetization chains");
    app.add_subcommand("criterion", "evaluate the uniqueness/non-uniqueness series");
    app.add_subcommand("toy", "iterate the deterministic toy model");
    app.add_subcommand("phase-scan", "scan (epsilon_star, alpha) grids");
    app.add_subcommand("gap", "boundary-gap uniqueness diagnostic on an environment");

    try {
        app.parse(argc, argv);
        g.seed_set = seed_opt->count() > 0;
        g.replicas_set = rep_opt->count() > 0;
        g.threads_set = thr_opt->count() > 0;
        std::string sub = app.get_subcommands().front()->get_name();
        RunContext ctx = make_context(g, sub);
        if (sub == "scales") run_scales(ctx);
        else if (sub == "env-stats") run_env_stats(ctx);
        else if (sub == "blocks") run_blocks(ctx);
        else if (sub == "chain") run_chain_cmd(ctx);
        else if (sub == "criterion") run_criterion(ctx);
        else if (sub == "toy") run_toy(ctx);
        else if (sub == "phase-scan") run_phase_scan(ctx);
        else if (sub == "gap") run_gap(ctx);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const BudgetError& e) {
        std::cerr << "error (scale budget): " << e.what() << "\n";
        return 2;
    } catch (const StatFloorError& e) {
        std::cerr << "error (statistical floor): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
