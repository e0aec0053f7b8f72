#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <levyma/harness.hpp>

using namespace levyma;

namespace {

// Gaussian bump test function on the positive axis.  Centered at 3: the
// oscillatory factor e^{3it} in its spectrum suppresses the O(1/n) ratio
// bias of theta_hat/psi_hat, which would otherwise shift the limit law
// visibly at desk-scale n.
double bump(double x) { return std::exp(-0.5 * (x - 3.0) * (x - 3.0) / 0.64); }

LogGridFn bump_log(const LogGridSpec& spec, double scale = 1.0) {
    LogGridFn v(spec.s_lo, spec.s_hi, spec.n_pts);
    for (std::size_t i = 0; i < v.n(); ++i) v.pos[i] = scale * bump(std::exp(v.s(i)));
    return v;
}

// L = int_0^inf e^{-x} bump(x) dx for the unit-rate exponential marginal
double bump_l_true() {
    return adaptive_simpson([](double x) { return std::exp(-x) * bump(x); }, 0.0, 40.0,
                            1e-12);
}

}  // namespace

TEST_CASE("ECF grid: power of two, symmetric, zero-inclusive, wide enough") {
    Schedule sched;
    for (std::size_t n : {std::size_t(256), std::size_t(4096)}) {
        GridFn g = ecf_grid_shape(n, sched, 1024);
        CHECK((g.n() & (g.n() - 1)) == 0);
        CHECK(g.lo == -sched.t_max(n));
        CHECK(g.hi == doctest::Approx(sched.t_max(n) - g.step()));
        // t = 0 is the node at index n/2
        CHECK(std::abs(g.x(g.n() / 2)) < 1e-12);
        // the spectral window 1/b_n fits inside the grid
        CHECK(1.0 / sched.bandwidth(n) <= std::abs(g.lo) * (1.0 + 1e-12));
    }
}

TEST_CASE("replicate with the zero test function returns exactly zero") {
    McSettings st;
    LogGridFn zero(st.log_spec.s_lo, st.log_spec.s_hi, st.log_spec.n_pts);
    ReplicateOutcome ro = run_replicate(LevyModel::gamma(1.0), KernelFn::indicator_cube(1.0),
                                        zero, 128, 9, st);
    CHECK(ro.l_hat == 0.0);
    CHECK(ro.route_gap == 0.0);
}

TEST_CASE("mean absolute error decays with the window size") {
    McSettings st;
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::indicator_cube(1.0);
    LogGridFn v = bump_log(st.log_spec);
    double l_true = bump_l_true();
    ConsistencyResult res =
        run_consistency(model, f, v, l_true, {256, 1024, 4096}, 10, 1234, st);
    REQUIRE(res.mean_abs_err.size() == 3);
    CHECK(res.mean_abs_err.front() > res.mean_abs_err.back());
    CHECK(res.fit.slope < -0.15);
    CHECK(res.records.size() == 30);
}

TEST_CASE("adjoint inversion on the real grid: unit cube is the identity") {
    GridFn v = GridFn::sample(-5.0, 5.0, 128, [](double x) { return bump(x); });
    GridFn w = g_inv_adjoint_on_grid(v, KernelFn::indicator_cube(1.0), 1e-6, LogGridSpec{});
    REQUIRE(w.n() == v.n());
    for (std::size_t i = 0; i < v.n(); ++i) CHECK(w.values[i] == v.values[i]);
}

TEST_CASE("asymptotic variance: independent observations give the plain variance") {
    // unit-cube kernel at spacing 1: lags do not overlap, so sigma^2 = Var(Y)
    McSettings st;
    SigmaEstimate se = sigma_v_model_mc(LevyModel::gamma(1.0), KernelFn::indicator_cube(1.0),
                                        st, [](double y) { return y; }, 2, 400, 64, 5);
    CHECK(std::abs(se.sigma_sq - 1.0) < 0.1);
    CHECK(std::abs(se.lag_cov[1]) < 0.05);
    CHECK(std::abs(se.lag_cov[2]) < 0.05);
    CHECK_FALSE(se.clamped);
}

TEST_CASE("asymptotic variance: model route, plugin route, and closed form agree") {
    McSettings st;
    st.delta = 0.5;
    st.h = 0.125;
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::exp_window(1.0, 1.0);
    int m = m_bound(f, st.delta);
    CHECK(m == 3);
    // Cov(Y_0, Y_l) = int f(u) f(u + l delta) du for b = 1
    double c0 = (1.0 - std::exp(-2.0)) / 2.0;
    double c1 = std::exp(-0.5) * (1.0 - std::exp(-1.0)) / 2.0;
    double want = c0 + 2.0 * c1;  // lags beyond delta overlap vanish

    auto id = [](double y) { return y; };
    SigmaEstimate sm = sigma_v_model_mc(model, f, st, id, m, 600, 64, 77);
    CHECK(sm.sigma_sq == doctest::Approx(want).epsilon(0.12));

    Window w = Window::box({0}, {39999});
    FieldSample s = simulate_field(model, f, st.delta, w, st.h, 31);
    SigmaEstimate sp = sigma_v_plugin(s.values, id, m);
    CHECK(sp.sigma_sq == doctest::Approx(want).epsilon(0.12));
    CHECK(std::abs(sm.sigma_sq - sp.sigma_sq) < 0.15 * want);
}

TEST_CASE("asymptotic variance: zero statistic and negative-sum clamping") {
    McSettings st;
    SigmaEstimate z = sigma_v_model_mc(LevyModel::gamma(1.0), KernelFn::indicator_cube(1.0),
                                       st, [](double) { return 0.0; }, 2, 20, 16, 1);
    CHECK(z.sigma_sq == 0.0);
    CHECK_FALSE(z.clamped);

    // alternating sequence: lag-1 covariance -1 drives the sum negative
    std::vector<double> alt(100);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
    SigmaEstimate c = sigma_v_plugin(alt, [](double y) { return y; }, 1);
    CHECK(c.sigma_sq == 0.0);
    CHECK(c.clamped);
    CHECK_THROWS_AS(sigma_v_plugin({1.0, 2.0}, [](double y) { return y; }, 3), config_error);
}

TEST_CASE("limit-law run: degenerate case short-circuits") {
    McSettings st;
    LogGridFn zero(st.log_spec.s_lo, st.log_spec.s_hi, st.log_spec.n_pts);
    CltResult res = run_clt(LevyModel::gamma(1.0), KernelFn::indicator_cube(1.0), zero, 0.0,
                            0.0, 128, 5, 3, st);
    CHECK(res.degenerate);
    CHECK(res.max_abs_err == 0.0);
    CHECK(res.standardized.empty());
}

TEST_CASE("limit-law run: standardized errors look Gaussian in a short experiment") {
    McSettings st;
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::indicator_cube(1.0);
    LogGridFn v = bump_log(st.log_spec);
    double l_true = bump_l_true();

    std::size_t n = 1024;
    GridFn w = GridFn::sample(-40.0, 40.0, 1 << 12, [](double x) { return bump(x); });
    InfluenceFn g = make_influence(model, f, 0.0, w, 0.0);
    SigmaEstimate se = sigma_v_model_mc(model, f, st,
                                        [&](double y) { return g.eval(y); }, 2, 400, 64, 11);
    REQUIRE(se.sigma_sq > 0.0);

    CltResult res = run_clt(model, f, v, l_true, se.sigma_sq, n, 50, 2024, st);
    CHECK_FALSE(res.degenerate);
    CHECK(res.ks.p_value > 1e-3);
    CHECK(res.var_ratio > 0.45);
    CHECK(res.var_ratio < 1.8);
    double mean_err = mean(res.errs);
    CHECK(std::abs(mean_err) < 3.5 * std::sqrt(se.sigma_sq / double(res.errs.size())));
}

TEST_CASE("multivariate limit-law run respects linearity of the functional") {
    McSettings st;
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::indicator_cube(1.0);
    LogGridFn v1 = bump_log(st.log_spec);
    LogGridFn v2 = bump_log(st.log_spec, 2.0);
    double l1 = bump_l_true();

    GridFn w = GridFn::sample(-40.0, 40.0, 1 << 12, [](double x) { return bump(x); });
    InfluenceFn g = make_influence(model, f, 0.0, w, 0.0);
    SigmaEstimate se = sigma_v_model_mc(model, f, st,
                                        [&](double y) { return g.eval(y); }, 2, 400, 64, 11);
    double s2 = se.sigma_sq;
    std::vector<std::vector<double>> theo = {{s2, 2.0 * s2}, {2.0 * s2, 4.0 * s2}};

    MultiCltResult res = run_clt_multivariate(model, f, {v1, v2}, {l1, 2.0 * l1}, theo, 512,
                                              40, 55, st);
    REQUIRE(res.errs.size() == 40);
    for (const auto& row : res.errs)
        CHECK(row[1] == doctest::Approx(2.0 * row[0]).epsilon(1e-10));
    CHECK(res.emp_cov[1][1] == doctest::Approx(4.0 * res.emp_cov[0][0]).epsilon(1e-10));
    CHECK(res.cramer_wold_p.size() == 3);
    for (double p : res.cramer_wold_p) CHECK(p >= 0.0);
    CHECK(std::isfinite(res.max_rel_diff));
}

TEST_CASE("partial-sum tails sit below the two-regime exponential bound") {
    McSettings st;
    TailReport rep = check_bernstein(LevyModel::gamma(1.0), KernelFn::indicator_cube(1.0),
                                     st, 1.0, 256, 400, 17, {0.0, 1.0, 2.0, 3.0});
    REQUIRE(rep.rows.size() == 4);
    CHECK(rep.rows[0].bound == 1.0);
    CHECK(rep.rows[0].pass);
    CHECK(rep.b_v > 0.0);
    CHECK(rep.rho_v > 0.0);
    CHECK(rep.all_pass);
}

TEST_CASE("fluctuation-field tails: plain and truncated variants") {
    McSettings st;
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::indicator_cube(1.0);
    TailReport plain = check_exponential_inequalities(model, f, st, 1.0, 0.0, 128, 300, 23,
                                                      {0.0, 10.0, 60.0}, false);
    CHECK(plain.rows[0].bound == 1.0);  // the raw bound 2 caps at 1
    CHECK(plain.all_pass);
    TailReport trunc = check_exponential_inequalities(model, f, st, 1.0, 2.0, 128, 300, 29,
                                                      {0.0, 10.0, 60.0}, true);
    CHECK(trunc.all_pass);
    CHECK_THROWS_AS(check_exponential_inequalities(model, f, st, 1.0, 0.5, 64, 10, 1, {1.0},
                                                   true),
                    config_error);
}

TEST_CASE("weighted ECF mean-square error scales like 1/n") {
    McSettings st;
    MomentScalingReport rep =
        check_moment_scaling(LevyModel::gamma(1.0), KernelFn::indicator_cube(1.0), st, 1.0,
                             {256, 1024}, 100, 41);
    REQUIRE(rep.scaled.size() == 2);
    CHECK(rep.pass);
    CHECK(rep.max_ratio >= 1.0);
}
