#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <levyma/fieldsim.hpp>
#include <levyma/stats.hpp>

using namespace levyma;

TEST_CASE("window boxes enumerate every lattice point once") {
    Window w = Window::box({-1, 2}, {1, 3});
    CHECK(w.n() == 6);
    Window c = Window::cube(4, 3);
    CHECK(c.n() == 64);
    CHECK_THROWS_AS(Window::box({0}, {-1}), config_error);
}

TEST_CASE("lattice boundary matches the closed-form cube count") {
    // |bd([0,L)^d)| = (L+2)^d - L^d
    for (int d = 1; d <= 3; ++d)
        for (int L = 1; L <= 6; ++L) {
            Window b = boundary(Window::cube(L, d));
            std::size_t want = 1, inner = 1;
            for (int i = 0; i < d; ++i) {
                want *= std::size_t(L + 2);
                inner *= std::size_t(L);
            }
            CHECK(b.n() == want - inner);
        }
    // singleton in d = 1
    Window s;
    s.dim = 1;
    s.pts = {{0, 0, 0}};
    Window bs = boundary(s);
    REQUIRE(bs.n() == 2);
    CHECK(bs.pts[0][0] == -1);
    CHECK(bs.pts[1][0] == 1);
}

TEST_CASE("boundary-to-volume ratio decays along doubling cubes") {
    GrowthReport rep = regular_growth_report({2, 4, 8, 16, 32}, 1);
    CHECK(rep.monotone_decreasing);
    CHECK(rep.rows.back().ratio == doctest::Approx(2.0 / 32.0));
    // d = 2, L = 3: 16 boundary points
    GrowthReport rep2 = regular_growth_report({3}, 2);
    CHECK(rep2.rows[0].boundary_size == 16);
}

TEST_CASE("block counts for a box against the shifted partition") {
    VhBlocks v = vh_blocks({0.0}, {10.0}, {1.0});
    CHECK(v.j_minus == 10);
    CHECK(v.j_plus == 11);  // the closed box touches the block ending at 0
    VhBlocks b = vh_blocks({0.0}, {1.0}, {1.0});
    CHECK(b.j_minus == 1);
    CHECK(b.j_plus == 2);
    VhBlocks tiny = vh_blocks({0.3}, {0.6}, {1.0});
    CHECK(tiny.j_minus == 0);
    CHECK(tiny.j_plus == 1);
}

TEST_CASE("dependence range bound from kernel diameter and spacing") {
    CHECK(m_bound(KernelFn::indicator_cube(1.0), 1.0) == 2);
    CHECK(m_bound(KernelFn::indicator_cube(1.0), 0.25) == 5);
    GridFn tab = GridFn::sample(0.0, 0.9, 64, [](double) { return 1.0; });
    CHECK(m_bound(KernelFn::tabulated(tab), 1.0) == 1);
    CHECK_THROWS_AS(m_bound(KernelFn::indicator_cube(1.0), 0.0), config_error);
}

TEST_CASE("cell masses: mean, additivity law, and independence") {
    const double h = 0.25, b = 1.0;

    SUBCASE("unit-volume sums follow the exponential law") {
        // 4 cells of volume 1/4 sum to Gamma(1, 1) = Exp(1)
        std::vector<double> sums;
        for (std::uint64_t s = 0; s < 10000; ++s) {
            GammaBasis g = simulate_gamma_basis(1, {0, 0}, {3, 0}, h, b, s);
            double acc = 0.0;
            for (double m : g.masses) acc += m;
            sums.push_back(acc);
        }
        double mean = 0.0;
        for (double x : sums) mean += x;
        mean /= double(sums.size());
        CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(double(sums.size())));
        std::sort(sums.begin(), sums.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < sums.size(); ++i) {
            double f = 1.0 - std::exp(-sums[i]);
            ks = std::max(ks, std::abs(f - double(i) / double(sums.size())));
            ks = std::max(ks, std::abs(double(i + 1) / double(sums.size()) - f));
        }
        CHECK(ks < 0.02);
    }

    SUBCASE("disjoint boxes are uncorrelated") {
        std::vector<double> a, c;
        for (std::uint64_t s = 0; s < 4000; ++s) {
            GammaBasis g = simulate_gamma_basis(1, {0, 0}, {7, 0}, h, b, s);
            double sa = 0.0, sc = 0.0;
            for (int i = 0; i < 4; ++i) sa += g.mass(i);
            for (int i = 4; i < 8; ++i) sc += g.mass(i);
            a.push_back(sa);
            c.push_back(sc);
        }
        double ma = mean(a), mc = mean(c), cov = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - ma) * (c[i] - mc);
        cov /= double(a.size());
        double corr = cov / std::sqrt(variance(a) * variance(c));
        CHECK(std::abs(corr) < 3.0 / std::sqrt(double(a.size())));
    }

    SUBCASE("draws are stable under region growth") {
        GammaBasis small = simulate_gamma_basis(1, {0, 0}, {3, 0}, h, b, 99);
        GammaBasis large = simulate_gamma_basis(1, {-8, 0}, {11, 0}, h, b, 99);
        for (int i = 0; i <= 3; ++i) CHECK(small.mass(i) == large.mass(i));
    }

    SUBCASE("vanishing cell volume is rejected") {
        CHECK_THROWS_AS(simulate_gamma_basis(2, {0, 0}, {1, 1}, 1e-4, 1.0, 1), config_error);
    }
}

TEST_CASE("moving average with the unit indicator has exponential marginals") {
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::indicator_cube(1.0);
    const std::size_t n = 10000;
    Window w = Window::box({0}, {int(n) - 1});
    FieldSample s = simulate_field(model, f, 1.0, w, 0.25, 8);
    CHECK(s.m == 2);
    double mean_y = 0.0;
    for (double y : s.values) mean_y += y;
    mean_y /= double(n);
    CHECK(std::abs(mean_y - 1.0) < 3.0 / std::sqrt(double(n)));
    // empirical characteristic function vs (1 - it)^{-1}
    double sup = 0.0;
    for (double t = -5.0; t <= 5.0; t += 0.25) {
        cplx acc{0.0, 0.0};
        for (double y : s.values) acc += std::exp(cplx(0.0, t * y));
        acc /= double(n);
        sup = std::max(sup, std::abs(acc - 1.0 / (1.0 - cplx(0.0, t))));
    }
    CHECK(sup < 0.02);
}

TEST_CASE("zero kernel produces the zero field") {
    GridFn z = GridFn::sample(0.0, 1.0, 16, [](double) { return 0.0; });
    KernelFn f = KernelFn::tabulated(z);
    FieldSample s = simulate_field(LevyModel::gamma(1.0), f, 1.0, Window::box({0}, {31}),
                                   0.25, 5);
    for (double y : s.values) CHECK(y == 0.0);
}

TEST_CASE("simulation rejects misaligned or unsupported input") {
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::indicator_cube(1.0);
    Window w = Window::box({0}, {7});
    CHECK_THROWS_AS(simulate_field(model, f, 1.0, w, 0.3, 1), config_error);
    GridFn tab = GridFn::sample(0.0, 1.0, 8, [](double) { return 1.0; });
    LevyModel bad = LevyModel::tabulated(tab);
    CHECK_THROWS_AS(simulate_field(bad, f, 1.0, w, 0.25, 1), config_error);
}

TEST_CASE("discretization bias stays below the sampling noise under refinement") {
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::exp_window(1.0, 1.0);
    const std::size_t n = 100000;
    Window w = Window::box({0}, {int(n) - 1});
    double want = 1.0 - std::exp(-1.0);  // int f / b
    for (double h : {0.25, 0.125}) {
        FieldSample s = simulate_field(model, f, 1.0, w, h, 11);
        double m = 0.0;
        for (double y : s.values) m += y;
        m /= double(n);
        double sd = std::sqrt(variance(s.values) / double(n));
        CHECK(std::abs(m - want) < 3.5 * sd);
    }
}

TEST_CASE("drift adds a constant to every observation") {
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::indicator_cube(1.0);
    Window w = Window::box({0}, {63});
    FieldSample a = simulate_field(model, f, 1.0, w, 0.25, 3, 0.0);
    FieldSample b = simulate_field(model, f, 1.0, w, 0.25, 3, 2.5);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(b.values[i] == doctest::Approx(a.values[i] + 2.5).epsilon(1e-14));
}

TEST_CASE("reproducibility: identical seeds give identical fields") {
    LevyModel model = LevyModel::gamma(2.0);
    KernelFn f = KernelFn::exp_window(1.0, 1.0);
    Window w = Window::box({0}, {255});
    FieldSample a = simulate_field(model, f, 0.5, w, 0.125, 77);
    FieldSample b = simulate_field(model, f, 0.5, w, 0.125, 77);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("two-dimensional indicator field has the right marginal mean") {
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::indicator_cube(1.0, 2);
    Window w = Window::box({0, 0}, {49, 49});
    FieldSample s = simulate_field(model, f, 1.0, w, 0.5, 13);
    double m = 0.0;
    for (double y : s.values) m += y;
    m /= double(s.values.size());
    // Y ~ Gamma(1,1); spatial correlation inflates the band slightly
    CHECK(std::abs(m - 1.0) < 5.0 / std::sqrt(double(s.values.size())));
}

TEST_CASE("lagwise correlation structure matches the overlap formula") {
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::exp_window(1.0, 1.0);
    const std::size_t n = 10000;
    double delta = 0.5;
    Window w = Window::box({0}, {int(n) - 1});
    FieldSample s = simulate_field(model, f, delta, w, 0.125, 21);
    CHECK(s.m == 3);
    auto rows = dependence_diagnostic(s, 6);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0].correlation == doctest::Approx(1.0));
    // corr(Y_0, Y_1) = e^{-delta}(1 - e^{-2(1-delta)}) / (1 - e^{-2})
    double want = std::exp(-delta) * (1.0 - std::exp(-2.0 * (1.0 - delta))) /
                  (1.0 - std::exp(-2.0));
    CHECK(rows[1].correlation == doctest::Approx(want).epsilon(0.15));
    for (const auto& r : rows) CHECK_FALSE(r.flagged);
    CHECK_THROWS_AS(dependence_diagnostic(s, 1), config_error);
}

TEST_CASE("field sample survives a CSV round trip") {
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::indicator_cube(1.0);
    Window w = Window::box({0}, {15});
    FieldSample s = simulate_field(model, f, 1.0, w, 0.25, 17);
    std::string path = "fieldsim_roundtrip.csv";
    write_csv(s, path);
    FieldSample r = read_field_csv(path);
    std::remove(path.c_str());
    CHECK(r.window.dim == 1);
    CHECK(r.m == s.m);
    CHECK(r.seed == s.seed);
    CHECK(r.model_tag == s.model_tag);
    REQUIRE(r.values.size() == s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        CHECK(r.window.pts[i][0] == s.window.pts[i][0]);
        CHECK(r.values[i] == s.values[i]);
    }
}
