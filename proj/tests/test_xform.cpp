#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <levyma/levy_model.hpp>
#include <levyma/quadrature.hpp>
#include <levyma/rng.hpp>
#include <levyma/xform.hpp>

using namespace levyma;

namespace {

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

// L2(R^x, dx/|x|) norm of a log-grid carrier (flat ds weight per branch).
double haar_norm(const LogGridFn& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.n(); ++i)
        acc += (std::norm(w.pos[i]) + std::norm(w.neg[i])) * w.step();
    return std::sqrt(acc);
}

LogGridFn smooth_pair(std::uint64_t seed, double s_lo = -10.0, double s_hi = 10.0,
                      std::size_t n = 1 << 12) {
    Rng r{seed};
    double c1 = 2.0 * r.uniform() - 1.0, c2 = 2.0 * r.uniform() - 1.0;
    double m1 = 2.0 * r.uniform() - 1.0, m2 = 2.0 * r.uniform() - 1.0;
    LogGridFn w(s_lo, s_hi, n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = w.s(i);
        w.pos[i] = c1 * std::exp(-0.5 * (s - m1) * (s - m1));
        w.neg[i] = c2 * std::exp(-0.7 * (s - m2) * (s - m2));
    }
    return w;
}

}  // namespace

TEST_CASE("fourier transform of a Gaussian matches the closed form") {
    GridFn g = GridFn::sample(-20.0, 20.0, 1 << 11,
                              [](double t) { return std::exp(-0.5 * t * t); });
    GridFn G = fourier_plus(g);
    for (std::size_t i = 0; i < G.n(); ++i) {
        double x = G.x(i);
        if (std::abs(x) > 4.0) continue;
        double want = std::sqrt(2.0 * pi) * std::exp(-0.5 * x * x);
        CHECK(std::abs(G.values[i] - want) < 1e-10 * std::sqrt(2.0 * pi));
    }
}

TEST_CASE("fourier round trip is exact to rounding") {
    GridFn g = GridFn::sample(-15.0, 17.0, 1 << 10, [](double t) {
        return std::exp(-0.3 * t * t) * std::cos(2.0 * t);
    });
    GridFn back = fourier_plus_inv(fourier_plus(g), g.lo);
    CHECK(back.lo == doctest::Approx(g.lo).epsilon(1e-14));
    CHECK(rel_l2(back.values, g.values) < 1e-12);
}

TEST_CASE("discrete Plancherel identity carries the 2 pi factor") {
    GridFn a = GridFn::sample(-12.0, 12.0, 1 << 9,
                              [](double t) { return std::exp(-0.5 * t * t) * t; });
    GridFn b = GridFn::sample(-12.0, 12.0, 1 << 9,
                              [](double t) { return std::exp(-0.4 * (t - 1.0) * (t - 1.0)); });
    GridFn A = fourier_plus(a), B = fourier_plus(b);
    cplx lhs{0.0, 0.0}, rhs{0.0, 0.0};
    for (std::size_t i = 0; i < a.n(); ++i) rhs += a.values[i] * std::conj(b.values[i]) * a.step();
    for (std::size_t i = 0; i < A.n(); ++i) lhs += A.values[i] * std::conj(B.values[i]) * A.step();
    CHECK(std::abs(lhs - 2.0 * pi * rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("non-pow2 lengths fall back to the direct transform") {
    GridFn g = GridFn::sample(-10.0, 10.0, 600,
                              [](double t) { return std::exp(-t * t); });
    GridFn back = fourier_plus_inv(fourier_plus(g), g.lo);
    CHECK(rel_l2(back.values, g.values) < 1e-10);
}

TEST_CASE("weight isometry preserves the norm between carriers") {
    // ||M v||_{L2(R^x)} = ||v||_{L2(R)} for v vanishing near 0
    LogGridFn v(-10.0, 10.0, 1 << 12);
    for (std::size_t i = 0; i < v.n(); ++i) {
        double x = std::exp(v.s(i));
        v.pos[i] = std::exp(-0.5 * (x - 2.0) * (x - 2.0));
        v.neg[i] = 0.5 * std::exp(-0.5 * (x - 3.0) * (x - 3.0));
    }
    double l2 = log_grid_norm(v);          // L2(R) with dx = e^s ds
    double haar = haar_norm(isometry_M(v));  // L2(R^x) with ds
    CHECK(haar == doctest::Approx(l2).epsilon(1e-9));

    LogGridFn back = isometry_M(isometry_M(v, +1), -1);
    CHECK(rel_l2(back.pos, v.pos) < 1e-13);
    CHECK(rel_l2(back.neg, v.neg) < 1e-13);
}

TEST_CASE("multiplicative-group transform matches direct quadrature") {
    LogGridFn w = smooth_pair(7);
    LogGridFn W = mellin_fx(w);
    // oracle: pos branch of the output at frequency t is
    //   int (p(s) + q(s)) e^{-ist} ds  (character phase -1 only for both
    //   arguments negative); checked at exact output grid frequencies
    for (std::size_t j : {W.n() / 2, W.n() / 2 + 5, W.n() / 2 - 9}) {
        double t = W.s(j);
        cplx want_pos = adaptive_simpson(
            [&](double s) {
                cplx pq = detail::interp_branch(w.pos, w.s_lo, w.step(), s) +
                          detail::interp_branch(w.neg, w.s_lo, w.step(), s);
                return pq * std::exp(cplx(0.0, -s * t));
            },
            w.s_lo, w.s_hi, 1e-11);
        cplx want_neg = adaptive_simpson(
            [&](double s) {
                cplx pq = detail::interp_branch(w.pos, w.s_lo, w.step(), s) -
                          detail::interp_branch(w.neg, w.s_lo, w.step(), s);
                return pq * std::exp(cplx(0.0, -s * t));
            },
            w.s_lo, w.s_hi, 1e-11);
        CHECK(std::abs(W.pos[j] - want_pos) < 1e-7);
        CHECK(std::abs(W.neg[j] - want_neg) < 1e-7);
    }
}

TEST_CASE("multiplicative-group transform round trip") {
    LogGridFn w = smooth_pair(11);
    LogGridFn back = mellin_fx_inv(mellin_fx(w), w.s_lo);
    CHECK(rel_l2(back.pos, w.pos) < 1e-12);
    CHECK(rel_l2(back.neg, w.neg) < 1e-12);
}

TEST_CASE("unit indicator kernel makes the dilation operator the identity") {
    KernelFn f = KernelFn::indicator_cube(1.0);
    GridFn v = GridFn::sample(-8.0, 8.0, 1 << 10,
                              [](double x) { return std::exp(-0.5 * x * x) * (1.0 + x); });
    GridFn gv = apply_G(v, f);
    CHECK(rel_l2(gv.values, v.values) < 1e-9);
}

TEST_CASE("dilation operator matches direct quadrature for the decaying window") {
    KernelFn f = KernelFn::exp_window(1.0, 1.0);
    auto v = [](double x) { return std::exp(-0.5 * (x - 1.0) * (x - 1.0)); };
    for (double x : {-2.0, 0.3, 1.0, 2.5}) {
        cplx got = apply_G_at(v, f, x);
        cplx want = adaptive_simpson(
            [&](double s) -> cplx { return v(x / std::exp(-s)); }, 0.0, 1.0, 1e-11);
        CHECK(std::abs(got - want) < 1e-9);
    }
}

TEST_CASE("regularized inverse undoes the forward operator on the Gamma family") {
    // G uv0 = uv1, computed from the closed-form transfer integral
    LevyModel model = LevyModel::gamma(1.0);
    KernelFn f = KernelFn::exp_window(1.0, 1.0);
    LogGridSpec spec;
    spec.s_lo = -12.0;
    spec.s_hi = 12.0;
    spec.n_pts = 1 << 13;
    LogGridFn uv1(spec.s_lo, spec.s_hi, spec.n_pts);
    for (std::size_t i = 0; i < uv1.n(); ++i) {
        double x = std::exp(uv1.s(i));
        uv1.pos[i] = x * compute_v1_at(model, f, x);
        uv1.neg[i] = 0.0;  // Gamma basis is one-sided
    }
    LogGridFn rec = apply_G_inv_n(uv1, f, 1e-4);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < rec.n(); ++i) {
        double x = std::exp(rec.s(i));
        if (x < 0.1 || x > 10.0) continue;
        double want = x * model.v0(x);
        num += std::norm(rec.pos[i] - want) * x * rec.step();
        den += want * want * x * rec.step();
    }
    CHECK(std::sqrt(num / den) < 1e-2);
}

TEST_CASE("adjoint identity holds on random smooth pairs") {
    KernelFn f = KernelFn::exp_window(1.0, 1.0);
    for (std::uint64_t s = 0; s < 5; ++s) {
        LogGridFn v = smooth_pair(100 + s);
        LogGridFn w = smooth_pair(200 + s);
        double a_n = 1e-4;
        cplx lhs = log_grid_inner(apply_G_inv_n(w, f, a_n), v);
        cplx rhs = log_grid_inner(w, apply_G_inv_adjoint_n(v, f, a_n));
        double nv = log_grid_norm(v), nw = log_grid_norm(w);
        CHECK(std::abs(lhs - rhs) < 1e-6 * nv * nw);
    }
}

TEST_CASE("spectral cutoff: full truncation maps to zero, norm bounded by 1/a_n") {
    KernelFn f = KernelFn::exp_window(1.0, 1.0);
    LogGridFn w = smooth_pair(42);

    CutoffDiag diag;
    LogGridFn z = apply_G_inv_n(w, f, 1e9, &diag);
    CHECK(diag.zeroed_nodes == 2 * w.n());
    CHECK(haar_norm(isometry_M(z)) < 1e-12);

    for (double a_n : {1e-1, 1e-2}) {
        LogGridFn r = apply_G_inv_n(w, f, a_n);
        // the bound is an operator-norm statement between the carriers
        CHECK(haar_norm(isometry_M(r)) <= (1.0 / a_n) * haar_norm(isometry_M(w)) * (1.0 + 1e-9));
    }
}

TEST_CASE("cutoff count is monotone in the threshold") {
    KernelFn f = KernelFn::exp_window(1.0, 1.0);
    LogGridFn w = smooth_pair(3);
    std::size_t prev = 0;
    for (double a_n : {1e-6, 1e-3, 1e-1, 0.5}) {
        CutoffDiag diag;
        apply_G_inv_n(w, f, a_n, &diag);
        CHECK(diag.zeroed_nodes >= prev);
        prev = diag.zeroed_nodes;
    }
}

TEST_CASE("decay diagnostic flags non-vanishing endpoints") {
    GridFn ok = GridFn::sample(-20.0, 20.0, 256, [](double t) { return std::exp(-t * t); });
    GridFn bad = GridFn::sample(-20.0, 20.0, 256, [](double) { return 1.0; });
    DecayDiag d1, d2;
    fourier_plus(ok, &d1);
    fourier_plus(bad, &d2);
    CHECK_FALSE(d1.warned);
    CHECK(d2.warned);
}

TEST_CASE("log-grid resampling round trip is faithful away from zero") {
    GridFn v = GridFn::sample(-30.0, 30.0, 1 << 12, [](double x) {
        return std::exp(-0.5 * (std::abs(x) - 3.0) * (std::abs(x) - 3.0));
    });
    LogGridSpec spec;
    LogGridFn w = to_log_grid(v, spec);
    GridFn back = from_log_grid(w, v.lo, v.hi, v.n());
    double worst = 0.0;
    for (std::size_t i = 0; i < v.n(); ++i) {
        if (std::abs(v.x(i)) < 0.05) continue;
        worst = std::max(worst, std::abs(back.values[i] - v.values[i]));
    }
    CHECK(worst < 1e-6);
}
