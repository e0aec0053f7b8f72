#ifndef LEVYMA_HARNESS_HPP
#define LEVYMA_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "common.hpp"
#include "estimator.hpp"
#include "fieldsim.hpp"
#include "grid.hpp"
#include "levy_model.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "xform.hpp"

namespace levyma {

// Shared experiment settings: lattice spacing, simulation mesh, drift,
// tuning schedules, and the inversion carrier.
struct McSettings {
    double delta = 1.0;
    double h = 1.0;
    double gamma = 0.0;
    Schedule sched;
    LogGridSpec log_spec;
    std::size_t min_t_pts = 1024;
};

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// ECF grid wide enough for the spectral window 1/b_n, with at least 8
// points per unit frequency.  The grid is [-T, T - dt] with a power-of-two
// point count, so t = 0 lands exactly on a node.
inline GridFn ecf_grid_shape(std::size_t n, const Schedule& sched, std::size_t min_pts) {
    double T = sched.t_max(n);
    std::size_t pts = next_pow2(std::max(min_pts, std::size_t(std::ceil(16.0 * T))));
    double dt = 2.0 * T / double(pts);
    return GridFn(-T, T - dt, pts);
}

struct ReplicateOutcome {
    double l_hat = 0.0;
    double route_gap = 0.0;
    std::uint64_t seed = 0;
};

// One full pass of the data path: simulate, ECF, smooth, invert, project.
inline ReplicateOutcome run_replicate(const LevyModel& model, const KernelFn& f,
                                      const LogGridFn& v_log, std::size_t n,
                                      std::uint64_t seed, const McSettings& st) {
    Window w = Window::box({0}, {int(n) - 1});
    FieldSample sample = simulate_field(model, f, st.delta, w, st.h, seed, st.gamma);
    GridFn shape = ecf_grid_shape(n, st.sched, st.min_t_pts);
    Ecf ecf = compute_ecf(sample.values, shape.lo, shape.hi, shape.n());
    GridFn uv1_hat = estimate_uv1(ecf, st.sched.bandwidth(n));
    LogGridFn uv1_log = to_log_grid(uv1_hat, st.log_spec);
    FunctionalResult fr = estimate_functional(v_log, uv1_log, f, st.sched.a_n(n));
    ReplicateOutcome out;
    out.l_hat = fr.value;
    out.route_gap = fr.route_gap;
    out.seed = seed;
    return out;
}

struct ConsistencyRecord {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double l_hat = 0.0;
    double abs_err = 0.0;
};

struct ConsistencyResult {
    std::vector<std::size_t> ns;
    std::vector<double> mean_abs_err;
    LinearFit fit;  // log mean err vs log n
    std::vector<ConsistencyRecord> records;
};

// Mean absolute estimation error across window sizes, with the fitted
// log-log decay rate.
inline ConsistencyResult run_consistency(const LevyModel& model, const KernelFn& f,
                                         const LogGridFn& v_log, double l_true,
                                         const std::vector<std::size_t>& ns,
                                         std::size_t reps, std::uint64_t seed,
                                         const McSettings& st) {
    ConsistencyResult out;
    out.ns = ns;
    Rng root(seed);
    for (std::size_t n : ns) {
        double acc = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            std::uint64_t s = root.derive(std::int64_t(n), std::int64_t(r)).next_u64();
            ReplicateOutcome ro = run_replicate(model, f, v_log, n, s, st);
            double e = std::abs(ro.l_hat - l_true);
            acc += e;
            out.records.push_back({n, s, ro.l_hat, e});
        }
        out.mean_abs_err.push_back(acc / double(reps));
    }
    std::vector<double> xs(ns.begin(), ns.end());
    out.fit = loglog_fit(xs, out.mean_abs_err);
    return out;
}

// ---- influence function and asymptotic variance ----

// G^{-1*} v resampled back onto v's real grid; the identity shortcut for
// a unit-volume indicator avoids an avoidable interpolation pass.
inline GridFn g_inv_adjoint_on_grid(const GridFn& v, const KernelFn& f, double a_n,
                                    const LogGridSpec& spec) {
    if (f.kind == KernelFn::Kind::IndicatorCube && std::abs(f.cube_volume - 1.0) < 1e-15)
        return v;
    return apply_G_inv_adjoint_n(v, f, a_n, spec);
}

// Influence function for the limit law: psi and theta are evaluated on the
// conjugate grid of w's spectrum, where w = G^{-1*} v.
inline InfluenceFn make_influence(const LevyModel& model, const KernelFn& f, double gamma,
                                  const GridFn& w, double bandwidth) {
    GridFn w_ft = fourier_plus(w);
    GridFn psi = compute_psi(model, f, gamma, w_ft.lo, w_ft.hi, w_ft.n());
    GridFn uv1_ft = compute_uv1_ft(model, f, w_ft.lo, w_ft.hi, w_ft.n());
    if (gamma != 0.0)  // theta = -i psi' = psi (F+[uv1] + gamma)
        for (auto& z : uv1_ft.values) z += gamma;
    GridFn theta = compute_theta(psi, uv1_ft);
    return influence_function(w_ft, psi, theta, bandwidth);
}

struct SigmaEstimate {
    double sigma_sq = 0.0;
    bool clamped = false;
    std::vector<double> lag_cov;  // index 0..m: symmetrized cross-covariances
    std::size_t points_used = 0;
};

// sum_{|l| <= m} Cov(g1(Y_0), g2(Y_l)) by patchwise simulation (d = 1).
inline SigmaEstimate sigma_cross_model_mc(const LevyModel& model, const KernelFn& f,
                                          const McSettings& st,
                                          const std::function<double(double)>& g1,
                                          const std::function<double(double)>& g2, int m,
                                          std::size_t n_patches, std::size_t patch_len,
                                          std::uint64_t seed) {
    if (patch_len < std::size_t(2 * m + 2)) patch_len = std::size_t(2 * m + 2);
    Window w = Window::box({0}, {int(patch_len) - 1});
    Rng root(seed);
    double s1 = 0.0, s2 = 0.0;
    std::size_t cnt = 0;
    // forward and backward lag products, lag 0..m
    std::vector<double> fw(std::size_t(m) + 1, 0.0), bw(std::size_t(m) + 1, 0.0);
    std::vector<std::size_t> np(std::size_t(m) + 1, 0);
    std::vector<double> a(patch_len), b(patch_len);
    for (std::size_t p = 0; p < n_patches; ++p) {
        std::uint64_t s = root.derive(p).next_u64();
        FieldSample sample = simulate_field(model, f, st.delta, w, st.h, s, st.gamma);
        for (std::size_t i = 0; i < patch_len; ++i) {
            a[i] = g1(sample.values[i]);
            b[i] = g2(sample.values[i]);
            s1 += a[i];
            s2 += b[i];
            ++cnt;
        }
        for (int l = 0; l <= m; ++l) {
            for (std::size_t i = 0; i + std::size_t(l) < patch_len; ++i) {
                fw[std::size_t(l)] += a[i] * b[i + std::size_t(l)];
                bw[std::size_t(l)] += a[i + std::size_t(l)] * b[i];
                ++np[std::size_t(l)];
            }
        }
    }
    double m1 = s1 / double(cnt), m2 = s2 / double(cnt);
    SigmaEstimate out;
    out.points_used = cnt;
    out.lag_cov.resize(std::size_t(m) + 1);
    for (int l = 0; l <= m; ++l) {
        double cf = fw[std::size_t(l)] / double(np[std::size_t(l)]) - m1 * m2;
        double cb = bw[std::size_t(l)] / double(np[std::size_t(l)]) - m1 * m2;
        out.lag_cov[std::size_t(l)] = l == 0 ? cf : cf + cb;
        out.sigma_sq += out.lag_cov[std::size_t(l)];
    }
    if (out.sigma_sq < 0.0) {
        out.sigma_sq = 0.0;
        out.clamped = true;
    }
    return out;
}

inline SigmaEstimate sigma_v_model_mc(const LevyModel& model, const KernelFn& f,
                                      const McSettings& st,
                                      const std::function<double(double)>& g, int m,
                                      std::size_t n_patches, std::size_t patch_len,
                                      std::uint64_t seed) {
    return sigma_cross_model_mc(model, f, st, g, g, m, n_patches, patch_len, seed);
}

// Same lag-window sum from a single observed 1-d sample.
inline SigmaEstimate sigma_v_plugin(const std::vector<double>& y,
                                    const std::function<double(double)>& g, int m) {
    if (y.size() < std::size_t(2 * m + 2))
        throw config_error("sigma_v_plugin: sample shorter than the lag window");
    std::vector<double> gv(y.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        gv[i] = g(y[i]);
        mean += gv[i];
    }
    mean /= double(y.size());
    SigmaEstimate out;
    out.points_used = y.size();
    out.lag_cov.resize(std::size_t(m) + 1);
    for (int l = 0; l <= m; ++l) {
        double acc = 0.0;
        std::size_t np = 0;
        for (std::size_t i = 0; i + std::size_t(l) < y.size(); ++i) {
            acc += (gv[i] - mean) * (gv[i + std::size_t(l)] - mean);
            ++np;
        }
        double c = acc / double(np);
        out.lag_cov[std::size_t(l)] = l == 0 ? c : 2.0 * c;
        out.sigma_sq += out.lag_cov[std::size_t(l)];
    }
    if (out.sigma_sq < 0.0) {
        out.sigma_sq = 0.0;
        out.clamped = true;
    }
    return out;
}

// ---- central limit experiments ----

struct CltResult {
    std::vector<double> errs;          // sqrt(n) (L_hat - L)
    std::vector<double> standardized;  // errs / sigma
    double sigma_sq = 0.0;
    KsResult ks;
    AdResult ad;
    double var_ratio = 0.0;  // empirical variance / sigma_sq
    bool degenerate = false;
    double max_abs_err = 0.0;
    std::vector<ConsistencyRecord> records;
};

inline CltResult run_clt(const LevyModel& model, const KernelFn& f, const LogGridFn& v_log,
                         double l_true, double sigma_sq, std::size_t n, std::size_t reps,
                         std::uint64_t seed, const McSettings& st) {
    CltResult out;
    out.sigma_sq = sigma_sq;
    Rng root(seed);
    for (std::size_t r = 0; r < reps; ++r) {
        std::uint64_t s = root.derive(r).next_u64();
        ReplicateOutcome ro = run_replicate(model, f, v_log, n, s, st);
        double e = err_w(ro.l_hat, l_true, n);
        out.errs.push_back(e);
        out.max_abs_err = std::max(out.max_abs_err, std::abs(e));
        out.records.push_back({n, s, ro.l_hat, std::abs(ro.l_hat - l_true)});
    }
    if (sigma_sq <= 1e-14) {
        out.degenerate = true;  // assert convergence to zero instead
        return out;
    }
    double sd = std::sqrt(sigma_sq);
    for (double e : out.errs) out.standardized.push_back(e / sd);
    out.ks = ks_test_normal(out.standardized);
    out.ad = ad_test_normal(out.standardized);
    out.var_ratio = variance(out.errs) / sigma_sq;
    return out;
}

struct MultiCltResult {
    std::vector<std::vector<double>> errs;  // [rep][component]
    std::vector<std::vector<double>> emp_cov;
    std::vector<std::vector<double>> theo_cov;
    double max_rel_diff = 0.0;
    std::vector<double> cramer_wold_p;  // KS p of 3 random projections
};

inline MultiCltResult run_clt_multivariate(const LevyModel& model, const KernelFn& f,
                                           const std::vector<LogGridFn>& v_logs,
                                           const std::vector<double>& l_trues,
                                           const std::vector<std::vector<double>>& theo_cov,
                                           std::size_t n, std::size_t reps,
                                           std::uint64_t seed, const McSettings& st) {
    const std::size_t k = v_logs.size();
    if (l_trues.size() != k || theo_cov.size() != k)
        throw config_error("run_clt_multivariate: size mismatch");
    MultiCltResult out;
    out.theo_cov = theo_cov;
    Rng root(seed);
    for (std::size_t r = 0; r < reps; ++r) {
        std::uint64_t s = root.derive(r).next_u64();
        Window w = Window::box({0}, {int(n) - 1});
        FieldSample sample = simulate_field(model, f, st.delta, w, st.h, s, st.gamma);
        GridFn shape = ecf_grid_shape(n, st.sched, st.min_t_pts);
        Ecf ecf = compute_ecf(sample.values, shape.lo, shape.hi, shape.n());
        GridFn uv1_hat = estimate_uv1(ecf, st.sched.bandwidth(n));
        LogGridFn uv1_log = to_log_grid(uv1_hat, st.log_spec);
        std::vector<double> row(k);
        for (std::size_t i = 0; i < k; ++i) {
            FunctionalResult fr = estimate_functional(v_logs[i], uv1_log, f, st.sched.a_n(n));
            row[i] = err_w(fr.value, l_trues[i], n);
        }
        out.errs.push_back(std::move(row));
    }
    std::vector<double> means(k, 0.0);
    for (const auto& row : out.errs)
        for (std::size_t i = 0; i < k; ++i) means[i] += row[i];
    for (auto& m : means) m /= double(reps);
    out.emp_cov.assign(k, std::vector<double>(k, 0.0));
    for (const auto& row : out.errs)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                out.emp_cov[i][j] += (row[i] - means[i]) * (row[j] - means[j]);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            out.emp_cov[i][j] /= double(reps - 1);
            double denom = std::abs(theo_cov[i][j]);
            if (denom > 1e-12)
                out.max_rel_diff = std::max(
                    out.max_rel_diff, std::abs(out.emp_cov[i][j] - theo_cov[i][j]) / denom);
        }
    // Cramer-Wold spot check on random unit projections
    Rng proj = root.derive(0xC3A5);
    for (int c = 0; c < 3; ++c) {
        std::vector<double> a(k);
        double norm = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            a[i] = proj.normal();
            norm += a[i] * a[i];
        }
        norm = std::sqrt(norm);
        double var = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) var += a[i] * a[j] * theo_cov[i][j];
        if (var <= 0.0) {
            out.cramer_wold_p.push_back(1.0);
            continue;
        }
        std::vector<double> proj_sample;
        for (const auto& row : out.errs) {
            double v = 0.0;
            for (std::size_t i = 0; i < k; ++i) v += a[i] * row[i];
            proj_sample.push_back(v / std::sqrt(var));
        }
        (void)norm;
        out.cramer_wold_p.push_back(ks_test_normal(proj_sample).p_value);
    }
    return out;
}

// ---- tail inequality checks ----

struct TailRow {
    double x = 0.0;
    double empirical = 0.0;
    double bound = 0.0;
    double binom_sigma = 0.0;
    bool pass = false;
};

struct TailReport {
    std::vector<TailRow> rows;
    bool all_pass = true;
    double b_v = 0.0;
    double rho_v = 0.0;
};

namespace detail {

inline void finish_row(TailReport& rep, double x, double freq, double bound,
                       std::size_t reps) {
    TailRow row;
    row.x = x;
    row.empirical = freq;
    row.bound = std::min(1.0, bound);
    row.binom_sigma = std::sqrt(std::max(1e-12, row.bound * (1.0 - row.bound)) / double(reps));
    row.pass = freq <= row.bound + 3.0 * row.binom_sigma;
    if (!row.pass) rep.all_pass = false;
    rep.rows.push_back(row);
}

}  // namespace detail

// Tail of S_V(X) with X_j = cos(t Y_j) - E cos(t Y_0), against the
// two-regime exponential bound for m-dependent fields with moment
// constant H = 2 (|X_j| <= 2).
inline TailReport check_bernstein(const LevyModel& model, const KernelFn& f,
                                  const McSettings& st, double t, std::size_t n,
                                  std::size_t reps, std::uint64_t seed,
                                  const std::vector<double>& x_multiples) {
    const double H = 2.0;
    double mean_cos = compute_psi_at(model, f, st.gamma, t).real();
    double mean_cos2 = compute_psi_at(model, f, st.gamma, 2.0 * t).real();
    double var_x = (1.0 + mean_cos2) / 2.0 - mean_cos * mean_cos;

    Window w = Window::box({0}, {int(n) - 1});
    Rng root(seed);
    std::vector<double> sv(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        std::uint64_t s = root.derive(r).next_u64();
        FieldSample sample = simulate_field(model, f, st.delta, w, st.h, s, st.gamma);
        double acc = 0.0;
        for (double y : sample.values) acc += std::cos(t * y) - mean_cos;
        sv[r] = acc;
    }
    double bv2 = 0.0;
    for (double s : sv) bv2 += s * s;
    bv2 /= double(reps);

    int m = m_bound(f, st.delta);
    TailReport rep;
    rep.b_v = std::sqrt(bv2);
    rep.rho_v = double(n) * var_x / bv2;
    double md = std::pow(double(m + 1), 1.0);
    for (double x : x_multiples) {
        double bound = x <= rep.rho_v * rep.b_v / H
                           ? std::exp(-x * x / (4.0 * md * rep.rho_v))
                           : std::exp(-x * rep.b_v / (4.0 * md * H));
        std::size_t exceed = 0;
        for (double s : sv)
            if (s >= x * rep.b_v) ++exceed;
        detail::finish_row(rep, x, double(exceed) / double(reps), bound, reps);
    }
    return rep;
}

// Tails of S_W applied to the ECF fluctuation fields: the cosine
// fluctuation xi(t)_j = cos(t Y_j) - E cos(t Y_0) and its truncated
// weighted version Y_j cos(t Y_j) 1{|Y_j| <= K} minus its mean.
inline TailReport check_exponential_inequalities(const LevyModel& model, const KernelFn& f,
                                                 const McSettings& st, double t, double K,
                                                 std::size_t n, std::size_t reps,
                                                 std::uint64_t seed,
                                                 const std::vector<double>& xs,
                                                 bool truncated) {
    if (truncated && K < 1.0)
        throw config_error("check_exponential_inequalities: K must be >= 1");
    int m = m_bound(f, st.delta);
    double md = std::pow(double(m + 1), 1.0);

    double mean_plain = compute_psi_at(model, f, st.gamma, t).real();
    // E[Y cos(tY) 1{|Y| <= K}] by simulation (no closed form for the
    // truncated moment); large independent sample, separate seed stream.
    double mean_trunc = 0.0;
    if (truncated) {
        Window mw = Window::box({0}, {199});
        Rng mr = Rng(seed).derive(0x7A11);
        std::size_t cnt = 0;
        for (std::size_t p = 0; p < 500; ++p) {
            FieldSample sample =
                simulate_field(model, f, st.delta, mw, st.h, mr.derive(p).next_u64(), st.gamma);
            for (double y : sample.values) {
                if (std::abs(y) <= K) mean_trunc += y * std::cos(t * y);
                ++cnt;
            }
        }
        mean_trunc /= double(cnt);
    }

    Window w = Window::box({0}, {int(n) - 1});
    Rng root(seed);
    std::vector<double> sv(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        std::uint64_t s = root.derive(r).next_u64();
        FieldSample sample = simulate_field(model, f, st.delta, w, st.h, s, st.gamma);
        double acc = 0.0;
        for (double y : sample.values) {
            if (truncated)
                acc += (std::abs(y) <= K ? y * std::cos(t * y) : 0.0) - mean_trunc;
            else
                acc += std::cos(t * y) - mean_plain;
        }
        sv[r] = acc;
    }

    TailReport rep;
    double kk = truncated ? K * K : 1.0;
    for (double x : xs) {
        double bound = 2.0 * std::exp(-x * x / (8.0 * md * kk * (x + 2.0 * double(n))));
        std::size_t exceed = 0;
        for (double s : sv)
            if (std::abs(s) >= x) ++exceed;
        detail::finish_row(rep, x, double(exceed) / double(reps), bound, reps);
    }
    return rep;
}

// E|theta_hat(u) - theta(u)|^2 across sample sizes: the n-scaled values
// must agree within a stated factor.
struct MomentScalingReport {
    std::vector<std::size_t> ns;
    std::vector<double> mse;
    std::vector<double> scaled;  // n * mse
    double max_ratio = 0.0;      // max over pairs of scaled values
    bool pass = false;
};

inline MomentScalingReport check_moment_scaling(const LevyModel& model, const KernelFn& f,
                                                const McSettings& st, double u,
                                                const std::vector<std::size_t>& ns,
                                                std::size_t reps, std::uint64_t seed,
                                                double factor = 2.0) {
    // theta = -i psi' = psi (F+[uv1] + gamma)
    cplx theta_true = compute_psi_at(model, f, st.gamma, u) *
                      (compute_uv1_ft_at(model, f, u) + st.gamma);
    MomentScalingReport rep;
    rep.ns = ns;
    Rng root(seed);
    for (std::size_t n : ns) {
        Window w = Window::box({0}, {int(n) - 1});
        double acc = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            std::uint64_t s = root.derive(std::int64_t(n), std::int64_t(r)).next_u64();
            FieldSample sample = simulate_field(model, f, st.delta, w, st.h, s, st.gamma);
            cplx th{0.0, 0.0};
            for (double y : sample.values) th += y * std::exp(cplx(0.0, u * y));
            th /= double(n);
            acc += std::norm(th - theta_true);
        }
        rep.mse.push_back(acc / double(reps));
        rep.scaled.push_back(double(n) * rep.mse.back());
    }
    double lo = rep.scaled[0], hi = rep.scaled[0];
    for (double s : rep.scaled) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    rep.max_ratio = hi / lo;
    rep.pass = rep.max_ratio <= factor;
    return rep;
}

}  // namespace levyma

#endif
