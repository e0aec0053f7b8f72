#ifndef LEVYMA_ESTIMATOR_HPP
#define LEVYMA_ESTIMATOR_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "common.hpp"
#include "grid.hpp"
#include "levy_model.hpp"
#include "stats.hpp"
#include "xform.hpp"

namespace levyma {

// Empirical characteristic function psi_hat(t) = n^{-1} sum e^{i t Y_j}
// and its weighted companion theta_hat(t) = n^{-1} sum Y_j e^{i t Y_j},
// both on a shared uniform t-grid.
struct Ecf {
    GridFn psi_hat;
    GridFn theta_hat;
    std::size_t n = 0;
};

// One complex rotation per observation per grid step.
inline Ecf compute_ecf(const std::vector<double>& y, double t_lo, double t_hi,
                       std::size_t n_pts) {
    if (y.empty()) throw config_error("compute_ecf: empty sample");
    Ecf out;
    out.n = y.size();
    out.psi_hat = GridFn(t_lo, t_hi, n_pts);
    out.theta_hat = GridFn(t_lo, t_hi, n_pts);
    const double dt = out.psi_hat.step();
    for (double yj : y) {
        cplx rot(std::cos(dt * yj), std::sin(dt * yj));
        cplx z(std::cos(t_lo * yj), std::sin(t_lo * yj));
        for (std::size_t k = 0; k < n_pts; ++k) {
            // resync the rotation recurrence to keep the phase exact
            if ((k & 1023u) == 0) {
                double tk = t_lo + double(k) * dt;
                z = cplx(std::cos(tk * yj), std::sin(tk * yj));
            }
            out.psi_hat.values[k] += z;
            out.theta_hat.values[k] += yj * z;
            z *= rot;
        }
    }
    const double inv_n = 1.0 / double(out.n);
    for (std::size_t k = 0; k < n_pts; ++k) {
        out.psi_hat.values[k] *= inv_n;
        out.theta_hat.values[k] *= inv_n;
    }
    return out;
}

// Spectral window of the sinc smoothing kernel: 1 on [-1/b, 1/b].
inline double kernel_ft(double t, double bandwidth) {
    return std::abs(t) <= 1.0 / bandwidth ? 1.0 : 0.0;
}

// psi_tilde = (1/psi_hat) 1{|psi_hat| > n^{-1/2}}; the indicator is strict,
// so a magnitude exactly at the threshold maps to zero.
inline GridFn psi_tilde(const GridFn& psi_hat, std::size_t n,
                        std::size_t* truncated = nullptr) {
    GridFn out = psi_hat;
    const double thr = 1.0 / std::sqrt(double(n));
    std::size_t cnt = 0;
    for (auto& z : out.values) {
        if (std::abs(z) > thr) {
            z = 1.0 / z;
        } else {
            z = {0.0, 0.0};
            ++cnt;
        }
    }
    if (truncated) *truncated = cnt;
    return out;
}

struct Uv1Diag {
    double max_imag_ratio = 0.0;   // max |Im| / max |value| of the output
    std::size_t psi_truncated = 0; // nodes zeroed by the |psi_hat| threshold
};

// uv1_hat = F+^{-1}[ theta_hat * psi_tilde * F+K_b ].  The spectral window
// 1/bandwidth must fit inside the ECF grid.
inline GridFn estimate_uv1(const Ecf& ecf, double bandwidth, Uv1Diag* diag = nullptr) {
    if (!(bandwidth > 0.0)) throw config_error("estimate_uv1: bandwidth must be positive");
    double t_max = std::max(std::abs(ecf.psi_hat.lo), std::abs(ecf.psi_hat.hi));
    if (1.0 / bandwidth > t_max * (1.0 + 1e-12))
        throw config_error("estimate_uv1: spectral window exceeds the ECF grid");
    std::size_t cnt = 0;
    GridFn pt = psi_tilde(ecf.psi_hat, ecf.n, &cnt);
    GridFn prod = ecf.psi_hat;  // reuse grid bounds
    for (std::size_t i = 0; i < prod.n(); ++i)
        prod.values[i] = ecf.theta_hat.values[i] * pt.values[i] * kernel_ft(prod.x(i), bandwidth);
    GridFn out = fourier_plus_inv(prod);
    out.check_finite("estimate_uv1");
    if (diag) {
        diag->psi_truncated = cnt;
        double mx = 0.0, mi = 0.0;
        for (const auto& z : out.values) {
            mx = std::max(mx, std::abs(z));
            mi = std::max(mi, std::abs(z.imag()));
        }
        diag->max_imag_ratio = mx > 0.0 ? mi / mx : 0.0;
    }
    return out;
}

// uv0_hat = G_n^{-1} uv1_hat through the log-grid carrier.
inline LogGridFn estimate_uv0(const GridFn& uv1_hat, const KernelFn& f, double a_n,
                              const LogGridSpec& spec = {}, CutoffDiag* diag = nullptr) {
    LogGridFn w = to_log_grid(uv1_hat, spec);
    return apply_G_inv_core(w, f, a_n, false, diag);
}

struct FunctionalResult {
    double value = 0.0;     // primal route <v, G_n^{-1} uv1_hat>
    double dual_value = 0.0;  // <G_n^{-1*} v, uv1_hat>
    double route_gap = 0.0;
    CutoffDiag cutoff;
};

// Plug-in linear functional with an always-on cross-check: the primal and
// adjoint routes must agree to 1e-4 relative or the result is rejected.
inline FunctionalResult estimate_functional(const LogGridFn& v, const LogGridFn& uv1_hat,
                                            const KernelFn& f, double a_n) {
    FunctionalResult out;
    LogGridFn uv0_hat = apply_G_inv_core(uv1_hat, f, a_n, false, &out.cutoff);
    out.value = log_grid_inner(uv0_hat, v).real();
    LogGridFn v_star = apply_G_inv_core(v, f, a_n, true, nullptr);
    out.dual_value = log_grid_inner(uv1_hat, v_star).real();
    out.route_gap = std::abs(out.value - out.dual_value);
    double scale = std::max({1e-12, std::abs(out.value), std::abs(out.dual_value)});
    if (out.route_gap > 1e-4 * scale)
        throw numeric_error("estimate_functional: primal and adjoint routes disagree (gap " +
                            std::to_string(out.route_gap) + ")");
    return out;
}

inline double err_w(double estimate, double truth, std::size_t n) {
    return std::sqrt(double(n)) * (estimate - truth);
}

// Default tuning sequences for sample size n.
struct Schedule {
    double a_coeff = 0.05;   // a_n = a_coeff / sqrt(n)
    double t_coeff = 4.0;    // ECF half-width T_n = t_coeff * sqrt(n)
    double a_n(std::size_t n) const { return a_coeff / std::sqrt(double(n)); }
    double t_max(std::size_t n) const { return t_coeff * std::sqrt(double(n)); }
    double bandwidth(std::size_t n) const { return 1.0 / t_max(n); }
};

// ---- influence function for the central limit law ----

// g = g1 - g2 with
//   g1(y) = (2 pi)^{-1} y F+[ F+[w](-.) / psi . F+K ](y),
//   g2(y) = i (2 pi)^{-1} F+[ F+[w](-.) (1/psi)' . F+K ](y),
// where w = G^{-1*} v and (1/psi)' = -i theta / psi^2.  Both terms are
// real for real v; the imaginary residue is kept as a diagnostic.
struct InfluenceFn {
    GridFn g1;
    GridFn g2;
    mutable std::size_t extrapolated = 0;

    double eval(double y) const {
        cplx a = interp_cubic(g1, y, &extrapolated);
        cplx b = interp_cubic(g2, y, &extrapolated);
        return a.real() - b.real();
    }
    double max_imag() const {
        double m = 0.0;
        for (const auto& z : g1.values) m = std::max(m, std::abs(z.imag()));
        for (const auto& z : g2.values) m = std::max(m, std::abs(z.imag()));
        return m;
    }
};

// w_ft = F+[G^{-1*} v] sampled on the same t-grid as psi and theta.
// bandwidth <= 0 drops the smoothing-kernel factor.
inline InfluenceFn influence_function(const GridFn& w_ft, const GridFn& psi,
                                      const GridFn& theta, double bandwidth) {
    if (psi.n() != w_ft.n() || psi.lo != w_ft.lo || theta.n() != psi.n())
        throw config_error("influence_function: grid mismatch");
    const std::size_t n = psi.n();
    GridFn a1(psi.lo, psi.hi, n), a2(psi.lo, psi.hi, n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = psi.x(i);
        // F+[w](-t) by reflected index; grids are symmetric by construction
        double u = (-t - w_ft.lo) / w_ft.step();
        std::size_t j = std::size_t(std::llround(u));
        cplx wneg = (j < n && std::abs(u - double(j)) < 1e-6) ? w_ft.values[j]
                                                              : interp_cubic(w_ft, -t);
        double k = bandwidth > 0.0 ? kernel_ft(t, bandwidth) : 1.0;
        cplx p = psi.values[i];
        a1.values[i] = wneg / p * k;
        cplx dinv = -cplx(0.0, 1.0) * theta.values[i] / (p * p);
        a2.values[i] = wneg * dinv * k;
    }
    InfluenceFn out;
    GridFn f1 = fourier_plus(a1);
    GridFn f2 = fourier_plus(a2);
    out.g1 = f1;
    for (std::size_t i = 0; i < n; ++i)
        out.g1.values[i] = f1.x(i) * f1.values[i] / (2.0 * pi);
    out.g2 = f2;
    for (std::size_t i = 0; i < n; ++i)
        out.g2.values[i] = cplx(0.0, 1.0) * f2.values[i] / (2.0 * pi);
    return out;
}

// ---- test-function admissibility ----

struct AdmissibilityReport {
    double xi_fitted = 0.0;     // decay exponent of |F+v|
    double xi_threshold = 0.0;  // required lower bound
    bool admissible = false;
    double sobolev_l2 = 0.0;    // ||F+v (1+x^2)^{1/4}||_2 as a finiteness proxy
};

// Fits |F+[v]|(x) ~ C (1+|x|)^{-xi} on the tail of the spectrum and
// compares against the rate-condition threshold
// xi > 2(1-eps) - (1/2-eps)(1+tau)/(2+tau).
inline AdmissibilityReport check_admissible(const GridFn& v, double eps, double tau) {
    AdmissibilityReport rep;
    rep.xi_threshold = 2.0 * (1.0 - eps) - (0.5 - eps) * (1.0 + tau) / (2.0 + tau);
    GridFn spec = fourier_plus(v);
    const std::size_t n = spec.n();
    double mx = 0.0;
    for (const auto& z : spec.values) mx = std::max(mx, std::abs(z));
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::abs(spec.x(i));
        double a = std::abs(spec.values[i]);
        if (x > 1.0 && a > 1e-12 * mx) {
            xs.push_back(1.0 + x);
            ys.push_back(a);
        }
        double w = std::sqrt(std::sqrt(1.0 + spec.x(i) * spec.x(i)));
        rep.sobolev_l2 += std::norm(spec.values[i] * w) * spec.step();
    }
    rep.sobolev_l2 = std::sqrt(rep.sobolev_l2);
    if (xs.size() >= 8) {
        LinearFit fit = loglog_fit(xs, ys);
        rep.xi_fitted = -fit.slope;
    } else {
        // spectrum vanished before the fit window: super-polynomial decay
        rep.xi_fitted = std::numeric_limits<double>::infinity();
    }
    rep.admissible = rep.xi_fitted > rep.xi_threshold;
    return rep;
}

}  // namespace levyma

#endif
