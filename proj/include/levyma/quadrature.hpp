#ifndef LEVYMA_QUADRATURE_HPP
#define LEVYMA_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "common.hpp"

namespace levyma {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre nodes/weights on [-1,1], by Newton iteration on P_n.
inline QuadRule gauss_legendre(int n) {
    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

// Gauss-Legendre rule mapped onto [a,b].
inline QuadRule gauss_legendre(int n, double a, double b) {
    QuadRule r = gauss_legendre(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

namespace detail {

template <typename F, typename R>
R adaptive_simpson_rec(const F& f, double a, double b, R fa, R fm, R fb, R whole,
                       double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    R flm = f(lm), frm = f(rm);
    double h = b - a;
    R left = (h / 12.0) * (fa + 4.0 * flm + fm);
    R right = (h / 12.0) * (fm + 4.0 * frm + fb);
    R delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance.  Works for double and cplx
// integrands (std::abs supplies the error norm in both cases).
template <typename F>
auto adaptive_simpson(const F& f, double a, double b, double tol = 1e-10,
                      int max_depth = 40) {
    using R = decltype(f(a));
    R fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    R whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace levyma

#endif
