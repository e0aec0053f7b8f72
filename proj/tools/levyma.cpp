// Command-line front end: simulation, condition checking, estimation and
// the Monte Carlo experiment harness.  Every subcommand reads one config
// file and writes records.csv / summary.json / verdicts.txt into --out.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <levyma/harness.hpp>

using namespace levyma;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    long long reps = 0;
    bool reps_set = false;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required = true) {
    auto* c = cmd->add_option("--config", o.config_path, "scenario config file");
    if (config_required) c->required();
    cmd->add_option("--out", o.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", o.seed, "override the scenario seed")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--reps", o.reps, "override the replication count")
        ->each([&o](const std::string&) { o.reps_set = true; });
    cmd->add_option("--threads", o.threads,
                    "worker threads (results are seed-deterministic regardless)");
}

// precedence: --seed flag, then LEVYMA_SEED, then [sim] seed
std::uint64_t resolve_seed(const CommonOpts& o, const Config& cfg) {
    if (o.seed_set) return o.seed;
    if (const char* env = std::getenv("LEVYMA_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw config_error(std::string("LEVYMA_SEED: not an integer: '") + env + "'");
        return v;
    }
    return std::uint64_t(cfg.get_int("sim.seed", 1));
}

std::size_t resolve_reps(const CommonOpts& o, const Config& cfg, long long dflt) {
    long long r = o.reps_set ? o.reps : cfg.get_int("mc.reps", dflt);
    if (r <= 0) throw config_error("replication count must be positive");
    return std::size_t(r);
}

McSettings settings_from_config(const Config& cfg) {
    McSettings st;
    st.delta = cfg.get_double("sim.delta", 1.0);
    st.h = cfg.get_double("sim.h", st.delta);
    st.gamma = cfg.get_double("sim.gamma", 0.0);
    st.sched.a_coeff = cfg.get_double("schedule.a_coeff", st.sched.a_coeff);
    st.sched.t_coeff = cfg.get_double("schedule.t_coeff", st.sched.t_coeff);
    return st;
}

// [testfn] gaussian center/width/scale, or a tabulated CSV
struct TestFn {
    std::function<double(double)> eval;  // on the real line
    std::string describe;
};

TestFn test_fn_from_config(const Config& cfg, const std::string& section) {
    TestFn out;
    std::string kind = cfg.get_string(section + ".kind", "gaussian");
    if (kind == "gaussian") {
        double c = cfg.get_double(section + ".center", 3.0);
        double w = cfg.get_double(section + ".width", 0.8);
        double s = cfg.get_double(section + ".scale", 1.0);
        if (w <= 0.0) throw config_error(section + ".width must be positive");
        out.eval = [c, w, s](double x) {
            return s * std::exp(-0.5 * (x - c) * (x - c) / (w * w));
        };
        out.describe = "gaussian(center=" + std::to_string(c) + ", width=" +
                       std::to_string(w) + ", scale=" + std::to_string(s) + ")";
        return out;
    }
    if (kind == "tabulated") {
        auto g = std::make_shared<GridFn>(read_grid_csv(cfg.get_string(section + ".table")));
        out.eval = [g](double x) { return interp_cubic(*g, x).real(); };
        out.describe = "tabulated(" + cfg.get_string(section + ".table") + ")";
        return out;
    }
    throw config_error(section + ".kind: unknown test function '" + kind + "'");
}

LogGridFn test_fn_log(const TestFn& v, const LogGridSpec& spec) {
    LogGridFn out(spec.s_lo, spec.s_hi, spec.n_pts);
    for (std::size_t i = 0; i < out.n(); ++i) {
        double x = std::exp(out.s(i));
        out.pos[i] = v.eval(x);
        out.neg[i] = v.eval(-x);
    }
    return out;
}

// reference value of the functional when the scenario model is known:
// L = <v, uv0> with uv0 = x v0(x)
double l_reference(const LevyModel& model, const TestFn& v) {
    return adaptive_simpson(
        [&](double x) {
            return x > 0.0 ? v.eval(x) * x * model.v0(x) : 0.0;
        },
        1e-8, 200.0, 1e-11);
}

std::function<double(double)> influence_from_scenario(const LevyModel& model,
                                                      const KernelFn& f, double gamma,
                                                      const TestFn& v, double a_n) {
    GridFn vg = GridFn::sample(-40.0, 40.0, 1 << 12, [&](double x) { return v.eval(x); });
    GridFn w = g_inv_adjoint_on_grid(vg, f, a_n, LogGridSpec{});
    auto g = std::make_shared<InfluenceFn>(make_influence(model, f, gamma, w, 0.0));
    return [g](double y) { return g->eval(y); };
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw config_error("cannot write " + p.string());
    out << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

// ---- subcommand bodies ----

int cmd_simulate(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.config_path);
    LevyModel model = model_from_config(cfg);
    KernelFn f = kernel_from_config(cfg);
    McSettings st = settings_from_config(cfg);
    std::uint64_t seed = resolve_seed(o, cfg);
    long long n = cfg.get_int("sim.n", 1024);
    int d = int(cfg.get_int("sim.d", 1));
    Window w = d == 1 ? Window::box({0}, {int(n) - 1})
                      : Window::cube(int(std::llround(std::pow(double(n), 1.0 / d))), d);
    FieldSample s = simulate_field(model, f, st.delta, w, st.h, seed, st.gamma);
    fs::create_directories(o.out_dir);
    write_csv(s, (fs::path(o.out_dir) / "field.csv").string());

    auto lags = dependence_diagnostic(s, std::max(s.m, 2 * s.m));
    json jl = json::array();
    bool any_flag = false;
    for (const auto& r : lags) {
        jl.push_back({{"lag", r.lag[0]},
                      {"correlation", r.correlation},
                      {"n_pairs", r.n_pairs},
                      {"flagged", r.flagged}});
        any_flag = any_flag || r.flagged;
    }
    double mean_y = 0.0;
    for (double y : s.values) mean_y += y;
    mean_y /= double(s.values.size());
    write_json(fs::path(o.out_dir) / "summary.json",
               {{"command", "simulate"},
                {"seed", seed},
                {"n", s.values.size()},
                {"m", s.m},
                {"delta", st.delta},
                {"h", st.h},
                {"gamma", st.gamma},
                {"mean", mean_y},
                {"variance", variance(s.values)},
                {"lags", jl}});
    std::printf("wrote %zu observations (m=%d) to %s/field.csv\n", s.values.size(), s.m,
                o.out_dir.c_str());
    return any_flag ? 1 : 0;
}

int cmd_check_conditions(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.config_path);
    LevyModel model = model_from_config(cfg);
    KernelFn f = kernel_from_config(cfg);
    McSettings st = settings_from_config(cfg);
    double eps = cfg.get_double("conditions.eps", 0.1);
    double tau = cfg.get_double("conditions.tau", model.tau);
    double beta = cfg.get_double("conditions.beta", 1.0);
    TestFn v = test_fn_from_config(cfg, "testfn");

    AssumptionReport ar = check_assumptions(model, f, eps, tau);
    UBetaReport ub = check_U_beta(f, beta);
    GridFn vg = GridFn::sample(-40.0, 40.0, 1 << 12, [&](double x) { return v.eval(x); });
    AdmissibilityReport adm = check_admissible(vg, eps, tau);
    int m = m_bound(f, st.delta);

    fs::create_directories(o.out_dir);
    std::string verdicts;
    json items = json::array();
    bool all_ok = true;
    for (int i = 0; i < 5; ++i) {
        const auto& it = ar.item[i];
        verdicts += std::string(it.holds ? "[PASS]" : "[FAIL]") + " model condition " +
                    std::to_string(i + 1) + ": " + it.note + " (margin " +
                    std::to_string(it.margin) + ")\n";
        items.push_back({{"holds", it.holds}, {"margin", it.margin}, {"note", it.note}});
        all_ok = all_ok && it.holds;
    }
    verdicts += std::string(ub.holds ? "[PASS]" : "[FAIL]") +
                " symbol lower bound (beta=" + std::to_string(beta) +
                "), worst margin " + std::to_string(ub.worst_margin) + " at x=" +
                std::to_string(ub.worst_x) + "\n";
    verdicts += std::string(adm.admissible ? "[PASS]" : "[FAIL]") +
                " test function admissible: decay exponent " + std::to_string(adm.xi_fitted) +
                " vs threshold " + std::to_string(adm.xi_threshold) + "\n";
    all_ok = all_ok && ub.holds && adm.admissible;
    write_text(fs::path(o.out_dir) / "verdicts.txt", verdicts);
    write_json(fs::path(o.out_dir) / "summary.json",
               {{"command", "check-conditions"},
                {"model_conditions", items},
                {"symbol_bound", {{"holds", ub.holds},
                                  {"worst_margin", ub.worst_margin},
                                  {"worst_x", ub.worst_x}}},
                {"admissibility", {{"admissible", adm.admissible},
                                   {"xi_fitted", adm.xi_fitted},
                                   {"xi_threshold", adm.xi_threshold},
                                   {"sobolev_l2", adm.sobolev_l2}}},
                {"dependence_range_m", m},
                {"test_fn", v.describe}});
    std::fputs(verdicts.c_str(), stdout);
    return all_ok ? 0 : 1;
}

int cmd_estimate(const CommonOpts& o, const std::string& field_path) {
    Config cfg = Config::parse_file(o.config_path);
    LevyModel model = model_from_config(cfg);
    KernelFn f = kernel_from_config(cfg);
    McSettings st = settings_from_config(cfg);
    std::uint64_t seed = resolve_seed(o, cfg);
    TestFn v = test_fn_from_config(cfg, "testfn");

    FieldSample sample;
    if (!field_path.empty()) {
        sample = read_field_csv(field_path);
    } else {
        long long n = cfg.get_int("estimate.n", 4096);
        Window w = Window::box({0}, {int(n) - 1});
        sample = simulate_field(model, f, st.delta, w, st.h, seed, st.gamma);
    }
    std::size_t n = sample.values.size();

    GridFn shape = ecf_grid_shape(n, st.sched, st.min_t_pts);
    Ecf ecf = compute_ecf(sample.values, shape.lo, shape.hi, shape.n());
    Uv1Diag diag;
    GridFn uv1_hat = estimate_uv1(ecf, st.sched.bandwidth(n), &diag);
    LogGridFn uv1_log = to_log_grid(uv1_hat, st.log_spec);
    LogGridFn uv0_hat = apply_G_inv_n(uv1_log, f, st.sched.a_n(n));
    LogGridFn v_log = test_fn_log(v, st.log_spec);
    FunctionalResult fr = estimate_functional(v_log, uv1_log, f, st.sched.a_n(n));

    fs::create_directories(o.out_dir);
    write_csv(uv1_hat, (fs::path(o.out_dir) / "uv1_hat.csv").string());
    write_csv(uv0_hat, (fs::path(o.out_dir) / "uv0_hat.csv").string());
    json j = {{"command", field_path.empty() ? "estimate" : "replay"},
              {"n", n},
              {"seed", field_path.empty() ? seed : sample.seed},
              {"a_n", st.sched.a_n(n)},
              {"bandwidth", st.sched.bandwidth(n)},
              {"t_max", st.sched.t_max(n)},
              {"psi_truncated_nodes", diag.psi_truncated},
              {"max_imag_ratio", diag.max_imag_ratio},
              {"cutoff_zeroed_nodes", fr.cutoff.zeroed_nodes},
              {"functional", fr.value},
              {"functional_dual", fr.dual_value},
              {"route_gap", fr.route_gap},
              {"test_fn", v.describe}};
    if (model.kind == LevyModel::Kind::Gamma) {
        double l_ref = l_reference(model, v);
        j["l_reference"] = l_ref;
        j["err_w"] = err_w(fr.value, l_ref, n);
    }
    write_json(fs::path(o.out_dir) / "summary.json", j);
    std::printf("functional estimate %.8g (route gap %.2e) from n=%zu\n", fr.value,
                fr.route_gap, n);
    return 0;
}

int cmd_mc_consistency(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.config_path);
    LevyModel model = model_from_config(cfg);
    KernelFn f = kernel_from_config(cfg);
    McSettings st = settings_from_config(cfg);
    std::uint64_t seed = resolve_seed(o, cfg);
    std::size_t reps = resolve_reps(o, cfg, 100);
    TestFn v = test_fn_from_config(cfg, "testfn");
    std::vector<std::size_t> ns;
    if (cfg.has("mc.ns"))
        for (double x : cfg.get_doubles("mc.ns")) ns.push_back(std::size_t(x));
    else
        ns = {256, 1024, 4096};
    double l_true = cfg.has("mc.l_true") ? cfg.get_double("mc.l_true")
                                         : l_reference(model, v);

    ConsistencyResult res =
        run_consistency(model, f, test_fn_log(v, st.log_spec), l_true, ns, reps, seed, st);

    fs::create_directories(o.out_dir);
    std::ofstream rec(fs::path(o.out_dir) / "records.csv");
    rec << "n,seed,l_hat,abs_err\n";
    for (const auto& r : res.records)
        rec << r.n << ',' << r.seed << ',' << std::setprecision(17) << r.l_hat << ','
            << r.abs_err << '\n';
    double slope_lo = cfg.get_double("mc.slope_lo", -0.65);
    double slope_hi = cfg.get_double("mc.slope_hi", -0.35);
    bool ok = res.fit.slope > slope_lo && res.fit.slope < slope_hi;
    write_text(fs::path(o.out_dir) / "verdicts.txt",
               std::string(ok ? "[PASS]" : "[FAIL]") + " consistency slope " +
                   std::to_string(res.fit.slope) + " in (" + std::to_string(slope_lo) + ", " +
                   std::to_string(slope_hi) + ")\n");
    write_json(fs::path(o.out_dir) / "summary.json",
               {{"command", "mc-consistency"},
                {"seed", seed},
                {"reps", reps},
                {"ns", res.ns},
                {"mean_abs_err", res.mean_abs_err},
                {"l_true", l_true},
                {"slope", res.fit.slope},
                {"slope_stderr", res.fit.slope_stderr},
                {"r_squared", res.fit.r_squared},
                {"pass", ok}});
    std::printf("consistency slope %.3f (R^2 %.3f), %s\n", res.fit.slope, res.fit.r_squared,
                ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

int cmd_mc_clt(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.config_path);
    LevyModel model = model_from_config(cfg);
    KernelFn f = kernel_from_config(cfg);
    McSettings st = settings_from_config(cfg);
    std::uint64_t seed = resolve_seed(o, cfg);
    std::size_t reps = resolve_reps(o, cfg, 500);
    std::size_t n = std::size_t(cfg.get_int("mc.n", 4096));
    TestFn v = test_fn_from_config(cfg, "testfn");
    double l_true = cfg.has("mc.l_true") ? cfg.get_double("mc.l_true")
                                         : l_reference(model, v);
    int m = m_bound(f, st.delta);
    std::size_t patches = std::size_t(cfg.get_int("mc.sigma_patches", 100000));
    auto g = influence_from_scenario(model, f, st.gamma, v, st.sched.a_n(n));
    SigmaEstimate se =
        sigma_v_model_mc(model, f, st, g, m, patches, 64, Rng(seed).derive(1).next_u64());

    CltResult res = run_clt(model, f, test_fn_log(v, st.log_spec), l_true, se.sigma_sq, n,
                            reps, seed, st);

    fs::create_directories(o.out_dir);
    std::ofstream rec(fs::path(o.out_dir) / "records.csv");
    rec << "n,seed,l_hat,err_w\n";
    for (std::size_t i = 0; i < res.records.size(); ++i)
        rec << res.records[i].n << ',' << res.records[i].seed << ',' << std::setprecision(17)
            << res.records[i].l_hat << ',' << res.errs[i] << '\n';
    double p_floor = cfg.get_double("mc.ks_p_floor", 0.01);
    double var_tol = cfg.get_double("mc.var_tol", 0.2);
    bool ok = !res.degenerate && res.ks.p_value > p_floor &&
              std::abs(res.var_ratio - 1.0) < var_tol;
    std::string verdicts =
        std::string(ok ? "[PASS]" : "[FAIL]") + " limit law: KS p=" +
        std::to_string(res.ks.p_value) + ", AD p=" + std::to_string(res.ad.p_value) +
        ", var ratio=" + std::to_string(res.var_ratio) + "\n";
    write_text(fs::path(o.out_dir) / "verdicts.txt", verdicts);
    write_json(fs::path(o.out_dir) / "summary.json",
               {{"command", "mc-clt"},
                {"seed", seed},
                {"n", n},
                {"reps", reps},
                {"l_true", l_true},
                {"sigma_sq", se.sigma_sq},
                {"sigma_lag_cov", se.lag_cov},
                {"ks_statistic", res.ks.statistic},
                {"ks_p", res.ks.p_value},
                {"ad_a2", res.ad.statistic},
                {"ad_p", res.ad.p_value},
                {"var_ratio", res.var_ratio},
                {"degenerate", res.degenerate},
                {"pass", ok}});
    std::fputs(verdicts.c_str(), stdout);
    return ok ? 0 : 1;
}

int cmd_mc_clt_multi(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.config_path);
    LevyModel model = model_from_config(cfg);
    KernelFn f = kernel_from_config(cfg);
    McSettings st = settings_from_config(cfg);
    std::uint64_t seed = resolve_seed(o, cfg);
    std::size_t reps = resolve_reps(o, cfg, 300);
    std::size_t n = std::size_t(cfg.get_int("mc.n", 4096));
    TestFn v1 = test_fn_from_config(cfg, "testfn");
    TestFn v2 = test_fn_from_config(cfg, "testfn2");
    int m = m_bound(f, st.delta);
    std::size_t patches = std::size_t(cfg.get_int("mc.sigma_patches", 50000));
    auto g1 = influence_from_scenario(model, f, st.gamma, v1, st.sched.a_n(n));
    auto g2 = influence_from_scenario(model, f, st.gamma, v2, st.sched.a_n(n));
    Rng sr(seed);
    double s11 = sigma_cross_model_mc(model, f, st, g1, g1, m, patches, 64,
                                      sr.derive(1).next_u64()).sigma_sq;
    double s22 = sigma_cross_model_mc(model, f, st, g2, g2, m, patches, 64,
                                      sr.derive(2).next_u64()).sigma_sq;
    double s12 = sigma_cross_model_mc(model, f, st, g1, g2, m, patches, 64,
                                      sr.derive(3).next_u64()).sigma_sq;
    MultiCltResult res = run_clt_multivariate(
        model, f, {test_fn_log(v1, st.log_spec), test_fn_log(v2, st.log_spec)},
        {l_reference(model, v1), l_reference(model, v2)}, {{s11, s12}, {s12, s22}}, n, reps,
        seed, st);

    fs::create_directories(o.out_dir);
    std::ofstream rec(fs::path(o.out_dir) / "records.csv");
    rec << "rep,err_w_1,err_w_2\n";
    for (std::size_t i = 0; i < res.errs.size(); ++i)
        rec << i << ',' << std::setprecision(17) << res.errs[i][0] << ',' << res.errs[i][1]
            << '\n';
    double cov_tol = cfg.get_double("mc.cov_tol", 0.25);
    bool ok = res.max_rel_diff < cov_tol;
    for (double p : res.cramer_wold_p) ok = ok && p > cfg.get_double("mc.ks_p_floor", 0.01);
    std::string verdicts = std::string(ok ? "[PASS]" : "[FAIL]") +
                           " multivariate limit law: max cov rel diff " +
                           std::to_string(res.max_rel_diff) + "\n";
    write_text(fs::path(o.out_dir) / "verdicts.txt", verdicts);
    write_json(fs::path(o.out_dir) / "summary.json",
               {{"command", "mc-clt-multi"},
                {"seed", seed},
                {"n", n},
                {"reps", reps},
                {"theo_cov", res.theo_cov},
                {"emp_cov", res.emp_cov},
                {"max_rel_diff", res.max_rel_diff},
                {"cramer_wold_p", res.cramer_wold_p},
                {"pass", ok}});
    std::fputs(verdicts.c_str(), stdout);
    return ok ? 0 : 1;
}

int cmd_inequalities(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.config_path);
    LevyModel model = model_from_config(cfg);
    KernelFn f = kernel_from_config(cfg);
    McSettings st = settings_from_config(cfg);
    std::uint64_t seed = resolve_seed(o, cfg);
    std::size_t reps = resolve_reps(o, cfg, 2000);
    std::size_t n = std::size_t(cfg.get_int("mc.n", 1024));
    double t = cfg.get_double("mc.t", 1.0);
    double K = cfg.get_double("mc.trunc_k", 3.0);

    Rng sr(seed);
    TailReport bern = check_bernstein(model, f, st, t, n, reps, sr.derive(1).next_u64(),
                                      {0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
    TailReport plain = check_exponential_inequalities(
        model, f, st, t, 0.0, n, reps, sr.derive(2).next_u64(),
        {10.0, 50.0, 100.0, 200.0, 400.0}, false);
    TailReport trunc = check_exponential_inequalities(
        model, f, st, t, K, n, reps, sr.derive(3).next_u64(),
        {10.0, 50.0, 100.0, 200.0, 400.0}, true);
    std::vector<std::size_t> ns = {n / 4, n, 4 * n};
    MomentScalingReport mom =
        check_moment_scaling(model, f, st, t, ns, std::max<std::size_t>(reps / 5, 100),
                             sr.derive(4).next_u64(), 2.0);

    fs::create_directories(o.out_dir);
    std::ofstream rec(fs::path(o.out_dir) / "records.csv");
    rec << "family,x,empirical,bound,pass\n";
    auto dump = [&rec](const char* fam, const TailReport& r) {
        for (const auto& row : r.rows)
            rec << fam << ',' << row.x << ',' << row.empirical << ',' << row.bound << ','
                << (row.pass ? 1 : 0) << '\n';
    };
    dump("two_regime", bern);
    dump("fluctuation", plain);
    dump("fluctuation_truncated", trunc);

    bool ok = bern.all_pass && plain.all_pass && trunc.all_pass && mom.pass;
    std::string verdicts;
    verdicts += std::string(bern.all_pass ? "[PASS]" : "[FAIL]") +
                " two-regime partial-sum bound\n";
    verdicts += std::string(plain.all_pass ? "[PASS]" : "[FAIL]") +
                " fluctuation-field tail bound\n";
    verdicts += std::string(trunc.all_pass ? "[PASS]" : "[FAIL]") +
                " truncated fluctuation tail bound\n";
    verdicts += std::string(mom.pass ? "[PASS]" : "[FAIL]") + " weighted-ECF MSE ~ 1/n (spread " +
                std::to_string(mom.max_ratio) + ", tol 2)\n";
    write_text(fs::path(o.out_dir) / "verdicts.txt", verdicts);
    write_json(fs::path(o.out_dir) / "summary.json",
               {{"command", "inequalities"},
                {"seed", seed},
                {"n", n},
                {"reps", reps},
                {"b_v", bern.b_v},
                {"rho_v", bern.rho_v},
                {"moment_ns", mom.ns},
                {"moment_scaled", mom.scaled},
                {"moment_max_ratio", mom.max_ratio},
                {"pass", ok}});
    std::fputs(verdicts.c_str(), stdout);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moving-average random field density functional toolkit"};
    app.require_subcommand(1);

    CommonOpts o_sim, o_cond, o_est, o_rep, o_cons, o_clt, o_multi, o_ineq;
    std::string replay_field;

    add_common(app.add_subcommand("simulate", "draw one lattice sample and write field.csv"),
               o_sim);
    add_common(app.add_subcommand("check-conditions",
                                  "evaluate model/kernel/test-function conditions"),
               o_cond);
    add_common(app.add_subcommand("estimate", "simulate one window and run the estimator"),
               o_est);
    auto* rep = app.add_subcommand("replay", "re-run the estimator on a stored field.csv");
    add_common(rep, o_rep);
    rep->add_option("--field", replay_field, "field CSV produced by simulate")->required();
    add_common(app.add_subcommand("mc-consistency", "error decay across window sizes"),
               o_cons);
    add_common(app.add_subcommand("mc-clt", "limit-law experiment for one test function"),
               o_clt);
    add_common(app.add_subcommand("mc-clt-multi", "joint limit law for two test functions"),
               o_multi);
    add_common(app.add_subcommand("inequalities", "empirical tail and moment bounds"),
               o_ineq);

    CLI11_PARSE(app, argc, argv);
    try {
        if (app.got_subcommand("simulate")) return cmd_simulate(o_sim);
        if (app.got_subcommand("check-conditions")) return cmd_check_conditions(o_cond);
        if (app.got_subcommand("estimate")) return cmd_estimate(o_est, "");
        if (app.got_subcommand("replay")) return cmd_estimate(o_rep, replay_field);
        if (app.got_subcommand("mc-consistency")) return cmd_mc_consistency(o_cons);
        if (app.got_subcommand("mc-clt")) return cmd_mc_clt(o_clt);
        if (app.got_subcommand("mc-clt-multi")) return cmd_mc_clt_multi(o_multi);
        if (app.got_subcommand("inequalities")) return cmd_inequalities(o_ineq);
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric integrity error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
