#ifndef LEVYMA_XFORM_HPP
#define LEVYMA_XFORM_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "common.hpp"
#include "grid.hpp"
#include "levy_model.hpp"

namespace levyma {

// ---- discrete Fourier machinery ----

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT with kernel e^{i sign 2 pi jk / n}.
inline void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * 2.0 * pi / double(len);
        cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline void dft_direct(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        double base = sign * 2.0 * pi * double(j) / double(n);
        cplx rot(std::cos(base), std::sin(base));
        cplx ph(1.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            out[j] += a[k] * ph;
            ph *= rot;
        }
    }
    a = std::move(out);
}

inline void fft(std::vector<cplx>& a, int sign) {
    if (is_pow2(a.size()))
        fft_pow2(a, sign);
    else
        dft_direct(a, sign);
}

}  // namespace detail

// Trigonometric sum U_j = scale * ds * sum_k u_k e^{i sign s_k t_j} on the
// conjugate grid t_j = t0 + j dt with dt = 2 pi / (n ds).  The phase
// factors absorb arbitrary grid offsets on both sides, so transforms
// compose exactly (round trips return bit-comparable values).
inline GridFn ft_uniform(const GridFn& g, int sign, double scale,
                         double out_lo = std::numeric_limits<double>::quiet_NaN()) {
    const std::size_t n = g.n();
    const double ds = g.step();
    const double dt = 2.0 * pi / (double(n) * ds);
    const double t0 = std::isnan(out_lo) ? -double(n / 2) * dt : out_lo;

    std::vector<cplx> a(n);
    for (std::size_t k = 0; k < n; ++k) {
        double ph = sign * double(k) * ds * t0;
        a[k] = g.values[k] * cplx(std::cos(ph), std::sin(ph));
    }
    detail::fft(a, sign);
    GridFn out(t0, t0 + double(n - 1) * dt, n);
    for (std::size_t j = 0; j < n; ++j) {
        double tj = t0 + double(j) * dt;
        double ph = sign * g.lo * tj;
        out.values[j] = scale * ds * cplx(std::cos(ph), std::sin(ph)) * a[j];
    }
    return out;
}

struct DecayDiag {
    double endpoint_ratio = 0.0;  // max endpoint magnitude / max magnitude
    bool warned = false;
};

inline void check_decay(const GridFn& g, DecayDiag* diag) {
    if (!diag) return;
    double mx = 0.0;
    for (const auto& v : g.values) mx = std::max(mx, std::abs(v));
    double ep = std::max(std::abs(g.values.front()), std::abs(g.values.back()));
    diag->endpoint_ratio = mx > 0.0 ? ep / mx : 0.0;
    diag->warned = diag->endpoint_ratio >= 1e-3;
}

// F+ g(x) = int e^{itx} g(t) dt.
inline GridFn fourier_plus(const GridFn& g, DecayDiag* diag = nullptr) {
    check_decay(g, diag);
    return ft_uniform(g, +1, 1.0);
}

// Inverse with the 1/(2 pi) factor; out_lo selects the output grid origin
// (pass the original grid's lo for an exact round trip).
inline GridFn fourier_plus_inv(const GridFn& G, double out_lo = std::numeric_limits<double>::quiet_NaN(),
                               DecayDiag* diag = nullptr) {
    check_decay(G, diag);
    return ft_uniform(G, -1, 1.0 / (2.0 * pi), out_lo);
}

// ---- log-grid resampling ----

struct LogGridSpec {
    double s_lo = -12.0;
    double s_hi = 12.0;
    std::size_t n_pts = 1 << 14;
};

// Interpolate a real-grid function onto the two half-lines x = +-e^s.
// Mass of |v|^2 outside [e^{s_lo}, e^{s_hi}] is reported as a truncation
// diagnostic (fraction of total).
inline LogGridFn to_log_grid(const GridFn& v, const LogGridSpec& spec,
                             double* truncated_mass = nullptr) {
    LogGridFn w(spec.s_lo, spec.s_hi, spec.n_pts);
    std::size_t oor = 0;
    for (std::size_t i = 0; i < spec.n_pts; ++i) {
        double r = std::exp(w.s(i));
        w.pos[i] = interp_cubic(v, r, &oor);
        w.neg[i] = interp_cubic(v, -r, &oor);
    }
    if (truncated_mass) {
        double inside = 0.0, total = 0.0;
        double r_lo = std::exp(spec.s_lo), r_hi = std::exp(spec.s_hi);
        double h = v.step();
        for (std::size_t i = 0; i < v.n(); ++i) {
            double x = v.x(i);
            double m = std::norm(v.values[i]) * h;
            total += m;
            if (std::abs(x) >= r_lo && std::abs(x) <= r_hi) inside += m;
        }
        *truncated_mass = total > 0.0 ? 1.0 - inside / total : 0.0;
    }
    return w;
}

namespace detail {

inline cplx interp_branch(const std::vector<cplx>& vals, double s_lo, double ds, double s) {
    const std::size_t n = vals.size();
    double u = (s - s_lo) / ds;
    if (u < 0.0 || u > double(n - 1)) return {0.0, 0.0};
    long k = long(std::floor(u)) - 1;
    if (k < 0) k = 0;
    if (k > long(n) - 4) k = long(n) - 4;
    double t = u - double(k + 1);
    double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return w0 * vals[k] + w1 * vals[k + 1] + w2 * vals[k + 2] + w3 * vals[k + 3];
}

}  // namespace detail

// Sample a log-grid carrier back onto a uniform real grid; |x| outside
// [e^{s_lo}, e^{s_hi}] maps to zero.
inline GridFn from_log_grid(const LogGridFn& w, double lo, double hi, std::size_t n_pts) {
    GridFn v(lo, hi, n_pts);
    const double ds = w.step();
    for (std::size_t i = 0; i < n_pts; ++i) {
        double x = v.x(i);
        if (x == 0.0) {
            v.values[i] = {0.0, 0.0};
            continue;
        }
        double s = std::log(std::abs(x));
        v.values[i] = x > 0.0 ? detail::interp_branch(w.pos, w.s_lo, ds, s)
                              : detail::interp_branch(w.neg, w.s_lo, ds, s);
    }
    return v;
}

// ---- the isometry M and the multiplicative-group transform ----

// (M v)(x) = |x|^{1/2} v(x).  direction = -1 applies the inverse.
inline GridFn isometry_M(const GridFn& v, int direction = +1) {
    GridFn out = v;
    for (std::size_t i = 0; i < out.n(); ++i) {
        double x = out.x(i);
        if (x == 0.0) {
            out.values[i] = {0.0, 0.0};
            continue;
        }
        double m = std::sqrt(std::abs(x));
        out.values[i] *= (direction > 0 ? m : 1.0 / m);
    }
    return out;
}

inline LogGridFn isometry_M(const LogGridFn& w, int direction = +1) {
    LogGridFn out = w;
    for (std::size_t i = 0; i < out.n(); ++i) {
        double m = std::exp(0.5 * out.s(i));
        double c = direction > 0 ? m : 1.0 / m;
        out.pos[i] *= c;
        out.neg[i] *= c;
    }
    return out;
}

// F_x on the multiplicative group: with p, q the branch values in the
// coordinate s = log|x|, the output branches are
//   pos(t) = int (p+q)(s) e^{-ist} ds,   neg(t) = int (p-q)(s) e^{-ist} ds;
// the character phase contributes -1 exactly when both arguments are
// negative, which is what the branch split realizes.
inline LogGridFn mellin_fx(const LogGridFn& w, DecayDiag* diag = nullptr) {
    const std::size_t n = w.n();
    GridFn sum(w.s_lo, w.s_hi, n), dif(w.s_lo, w.s_hi, n);
    for (std::size_t i = 0; i < n; ++i) {
        sum.values[i] = w.pos[i] + w.neg[i];
        dif.values[i] = w.pos[i] - w.neg[i];
    }
    check_decay(sum, diag);
    GridFn P = ft_uniform(sum, -1, 1.0);
    GridFn Q = ft_uniform(dif, -1, 1.0);
    LogGridFn out(P.lo, P.hi, n);
    out.pos = std::move(P.values);
    out.neg = std::move(Q.values);
    return out;
}

// Inverse of mellin_fx; out_lo selects the output s-grid origin so that
// mellin_fx_inv(mellin_fx(w), w.s_lo) reproduces w's grid exactly.  The
// 1/(2 pi) inversion constant is pinned by the round-trip unit test.
inline LogGridFn mellin_fx_inv(const LogGridFn& W, double out_lo = std::numeric_limits<double>::quiet_NaN(),
                               DecayDiag* diag = nullptr) {
    const std::size_t n = W.n();
    GridFn P(W.s_lo, W.s_hi, n), Q(W.s_lo, W.s_hi, n);
    P.values = W.pos;
    Q.values = W.neg;
    check_decay(P, diag);
    GridFn sum = ft_uniform(P, +1, 1.0 / (2.0 * pi), out_lo);
    GridFn dif = ft_uniform(Q, +1, 1.0 / (2.0 * pi), out_lo);
    LogGridFn out(sum.lo, sum.hi, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.pos[i] = 0.5 * (sum.values[i] + dif.values[i]);
        out.neg[i] = 0.5 * (sum.values[i] - dif.values[i]);
    }
    return out;
}

// ---- the dilation operator G and its regularized inverses ----

// (G v)(x) = int_{supp f} sgn(f(s)) v(x / f(s)) ds by kernel quadrature;
// dilated arguments outside v's grid count as zero (reported via oor).
inline GridFn apply_G(const GridFn& v, const KernelFn& f, std::size_t* out_of_range = nullptr) {
    GridFn out(v.lo, v.hi, v.n());
    std::size_t oor = 0;
    for (std::size_t i = 0; i < out.n(); ++i) {
        double x = out.x(i);
        out.values[i] = f.integrate([&](double fs) -> cplx {
            return sgn(fs) * interp_cubic(v, x / fs, &oor);
        });
    }
    if (out_of_range) *out_of_range = oor;
    return out;
}

// Same operator applied to an exact evaluator instead of a sampled grid.
template <typename F>
cplx apply_G_at(F&& v, const KernelFn& f, double x) {
    return f.integrate([&](double fs) -> cplx { return sgn(fs) * cplx(v(x / fs)); });
}

struct CutoffDiag {
    std::size_t zeroed_nodes = 0;
    bool zero_cutoff_hit = false;  // a_n == 0 and mu_f vanished on a node
};

// Shared pipeline of G_n^{-1} and G_n^{-1*}: M -> F_x -> multiply by
// 1/mu_f restricted to {|mu_f| > a_n} (conjugated for the adjoint) ->
// F_x^{-1} -> M^{-1}.  mu_f is evaluated branchwise: m_{f,+} acts on the
// positive branch, m_{f,-} on the negative one.
inline LogGridFn apply_G_inv_core(const LogGridFn& w, const KernelFn& f, double a_n,
                                  bool adjoint, CutoffDiag* diag = nullptr) {
    if (a_n < 0.0) throw config_error("spectral cutoff a_n must be >= 0");
    LogGridFn m = isometry_M(w, +1);
    LogGridFn freq = mellin_fx(m);
    CutoffDiag local;
    for (std::size_t i = 0; i < freq.n(); ++i) {
        double t = freq.s(i);
        MfPair mf = compute_m_f(f, t);
        cplx mp = adjoint ? std::conj(mf.plus) : mf.plus;
        cplx mm = adjoint ? std::conj(mf.minus) : mf.minus;
        if (std::abs(mp) > a_n) {
            freq.pos[i] /= mp;
        } else {
            freq.pos[i] = {0.0, 0.0};
            ++local.zeroed_nodes;
            if (a_n == 0.0) local.zero_cutoff_hit = true;
        }
        if (std::abs(mm) > a_n) {
            freq.neg[i] /= mm;
        } else {
            freq.neg[i] = {0.0, 0.0};
            ++local.zeroed_nodes;
            if (a_n == 0.0) local.zero_cutoff_hit = true;
        }
    }
    LogGridFn back = mellin_fx_inv(freq, w.s_lo);
    if (diag) *diag = local;
    return isometry_M(back, -1);
}

inline LogGridFn apply_G_inv_n(const LogGridFn& w, const KernelFn& f, double a_n,
                               CutoffDiag* diag = nullptr) {
    return apply_G_inv_core(w, f, a_n, false, diag);
}

inline LogGridFn apply_G_inv_adjoint_n(const LogGridFn& w, const KernelFn& f, double a_n,
                                       CutoffDiag* diag = nullptr) {
    return apply_G_inv_core(w, f, a_n, true, diag);
}

// Real-grid wrappers: resample through the log-grid carrier.
inline GridFn apply_G_inv_n(const GridFn& v, const KernelFn& f, double a_n,
                            const LogGridSpec& spec = {}, CutoffDiag* diag = nullptr) {
    LogGridFn w = to_log_grid(v, spec);
    LogGridFn r = apply_G_inv_core(w, f, a_n, false, diag);
    return from_log_grid(r, v.lo, v.hi, v.n());
}

inline GridFn apply_G_inv_adjoint_n(const GridFn& v, const KernelFn& f, double a_n,
                                    const LogGridSpec& spec = {}, CutoffDiag* diag = nullptr) {
    LogGridFn w = to_log_grid(v, spec);
    LogGridFn r = apply_G_inv_core(w, f, a_n, true, diag);
    return from_log_grid(r, v.lo, v.hi, v.n());
}

}  // namespace levyma

#endif
