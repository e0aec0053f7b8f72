#ifndef LEVYMA_FIELDSIM_HPP
#define LEVYMA_FIELDSIM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "levy_model.hpp"
#include "rng.hpp"

namespace levyma {

using LatticePoint = std::array<int, 3>;  // first `dim` entries used

// Finite duplicate-free set of lattice points.
struct Window {
    int dim = 1;
    std::vector<LatticePoint> pts;

    std::size_t n() const { return pts.size(); }

    // Axis-aligned box with inclusive bounds.
    static Window box(const std::vector<int>& lo, const std::vector<int>& hi) {
        Window w;
        w.dim = int(lo.size());
        if (w.dim < 1 || w.dim > 3 || hi.size() != lo.size())
            throw config_error("Window::box: dimension must be 1..3");
        for (int i = 0; i < w.dim; ++i)
            if (hi[i] < lo[i]) throw config_error("Window::box: empty range");
        LatticePoint p{0, 0, 0};
        std::vector<int> cur(lo);
        for (;;) {
            for (int i = 0; i < w.dim; ++i) p[std::size_t(i)] = cur[std::size_t(i)];
            w.pts.push_back(p);
            int axis = 0;
            while (axis < w.dim) {
                if (++cur[std::size_t(axis)] <= hi[std::size_t(axis)]) break;
                cur[std::size_t(axis)] = lo[std::size_t(axis)];
                ++axis;
            }
            if (axis == w.dim) break;
        }
        return w;
    }

    // [0, side)^d
    static Window cube(int side, int d) {
        if (side < 1) throw config_error("Window::cube: side must be >= 1");
        return box(std::vector<int>(std::size_t(d), 0),
                   std::vector<int>(std::size_t(d), side - 1));
    }
};

// Lattice boundary: points outside A at sup-distance exactly 1.
inline Window boundary(const Window& a) {
    std::set<LatticePoint> inside(a.pts.begin(), a.pts.end());
    std::set<LatticePoint> bnd;
    for (const auto& p : a.pts) {
        LatticePoint q = p;
        int span = a.dim;
        std::array<int, 3> off{0, 0, 0};
        // enumerate Chebyshev-1 neighborhood
        std::function<void(int)> rec = [&](int axis) {
            if (axis == span) {
                bool same = true;
                for (int i = 0; i < span; ++i) {
                    q[std::size_t(i)] = p[std::size_t(i)] + off[std::size_t(i)];
                    if (off[std::size_t(i)] != 0) same = false;
                }
                if (!same && !inside.count(q)) bnd.insert(q);
                return;
            }
            for (int d = -1; d <= 1; ++d) {
                off[std::size_t(axis)] = d;
                rec(axis + 1);
            }
        };
        rec(0);
    }
    Window out;
    out.dim = a.dim;
    out.pts.assign(bnd.begin(), bnd.end());
    return out;
}

struct GrowthRow {
    std::size_t size = 0;
    std::size_t boundary_size = 0;
    double ratio = 0.0;
};

struct GrowthReport {
    std::vector<GrowthRow> rows;
    bool monotone_decreasing = true;
};

// |bd A_k| / |A_k| along a sequence of cube windows.
inline GrowthReport regular_growth_report(const std::vector<int>& sides, int d) {
    GrowthReport rep;
    double prev = std::numeric_limits<double>::infinity();
    for (int side : sides) {
        Window a = Window::cube(side, d);
        Window b = boundary(a);
        GrowthRow row;
        row.size = a.n();
        row.boundary_size = b.n();
        row.ratio = double(b.n()) / double(a.n());
        if (row.ratio > prev) rep.monotone_decreasing = false;
        prev = row.ratio;
        rep.rows.push_back(row);
    }
    return rep;
}

struct VhBlocks {
    long long j_minus = 0;
    long long j_plus = 0;
    double ratio = 0.0;  // nu(U^-) / nu(U^+)
};

// Block counts for U = prod [lo_i, hi_i] against the partition into the
// shifted half-open blocks (j a, (j+1) a].
inline VhBlocks vh_blocks(const std::vector<double>& lo, const std::vector<double>& hi,
                          const std::vector<double>& a) {
    if (lo.size() != hi.size() || lo.size() != a.size())
        throw config_error("vh_blocks: dimension mismatch");
    VhBlocks out;
    out.j_minus = 1;
    out.j_plus = 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0)) throw config_error("vh_blocks: a must be positive");
        double eps = 1e-12 * std::max(1.0, std::max(std::abs(lo[i]), std::abs(hi[i])));
        // contained: j a >= lo and (j+1) a <= hi
        long long j_min_c = (long long)std::ceil(lo[i] / a[i] - eps);
        long long j_max_c = (long long)std::floor(hi[i] / a[i] + eps) - 1;
        long long nc = std::max(0LL, j_max_c - j_min_c + 1);
        // intersecting: j a < hi and (j+1) a >= lo
        long long j_min_i = (long long)std::ceil(lo[i] / a[i] - 1.0 - eps);
        long long j_max_i = (long long)std::ceil(hi[i] / a[i] - eps) - 1;
        long long ni = std::max(0LL, j_max_i - j_min_i + 1);
        out.j_minus *= nc;
        out.j_plus *= ni;
    }
    out.ratio = out.j_plus > 0 ? double(out.j_minus) / double(out.j_plus) : 0.0;
    return out;
}

// Smallest integer strictly greater than diam(supp f) / delta.
inline int m_bound(const KernelFn& f, double delta) {
    if (!(delta > 0.0)) throw config_error("m_bound: delta must be positive");
    double q = f.diam() / delta;
    double qr = std::round(q);
    if (std::abs(q - qr) < 1e-9) return int(qr) + 1;
    return int(std::floor(q)) + 1;
}

// Independent Gamma(shape h^d, rate b) cell masses on a box of cells.
// Cell (i1,..,id) covers prod (i h, (i+1) h]; each cell's draw comes from
// its own counter-based stream, so enlarging the region never changes
// existing cells.
struct GammaBasis {
    int dim = 1;
    double h = 0.0;
    double b = 1.0;
    std::array<int, 2> cell_lo{0, 0};
    std::array<int, 2> cell_hi{0, 0};  // inclusive
    std::vector<double> masses;        // row-major over cells

    int count(int axis) const { return cell_hi[std::size_t(axis)] - cell_lo[std::size_t(axis)] + 1; }
    double mass(int i, int j = 0) const {
        std::size_t idx = std::size_t(i - cell_lo[0]);
        if (dim == 2) idx = idx * std::size_t(count(1)) + std::size_t(j - cell_lo[1]);
        return masses[idx];
    }
};

inline double gamma_cell_draw(std::uint64_t seed, int dim, int ix, int iy, double shape,
                              double rate) {
    Rng r = Rng(seed).derive(ix, dim == 2 ? iy : 0);
    return r.gamma(shape, rate);
}

inline GammaBasis simulate_gamma_basis(int dim, const std::array<int, 2>& cell_lo,
                                       const std::array<int, 2>& cell_hi, double h,
                                       double b, std::uint64_t seed) {
    if (!(h > 0.0)) throw config_error("simulate_gamma_basis: h must be positive");
    double shape = std::pow(h, dim);
    if (shape < 1e-6)
        throw config_error("simulate_gamma_basis: cell volume below sampler's validated range");
    GammaBasis out;
    out.dim = dim;
    out.h = h;
    out.b = b;
    out.cell_lo = cell_lo;
    out.cell_hi = cell_hi;
    std::size_t total = std::size_t(out.count(0)) * (dim == 2 ? std::size_t(out.count(1)) : 1);
    out.masses.resize(total);
    std::size_t idx = 0;
    for (int i = cell_lo[0]; i <= cell_hi[0]; ++i) {
        if (dim == 2) {
            for (int j = cell_lo[1]; j <= cell_hi[1]; ++j)
                out.masses[idx++] = gamma_cell_draw(seed, dim, i, j, shape, b);
        } else {
            out.masses[idx++] = gamma_cell_draw(seed, dim, i, 0, shape, b);
        }
    }
    return out;
}

// Observations Y_j = X(j delta) on a window, with provenance metadata.
struct FieldSample {
    Window window;
    double delta = 1.0;
    std::vector<double> values;
    int m = 0;
    std::uint64_t seed = 0;
    std::string model_tag;
    std::string kernel_tag;
};

namespace detail {

// Overlap of cell (c h, (c+1) h] with interval (a, b], as a fraction of h.
inline double cell_coverage(int c, double h, double a, double b) {
    double lo = std::max(double(c) * h, a);
    double hi = std::min(double(c + 1) * h, b);
    return hi > lo ? (hi - lo) / h : 0.0;
}

inline std::string kernel_tag(const KernelFn& f) {
    char buf[96];
    switch (f.kind) {
        case KernelFn::Kind::ExpWindow:
            std::snprintf(buf, sizeof buf, "exp_window(%g,%g)", f.lambda, f.theta);
            return buf;
        case KernelFn::Kind::IndicatorCube:
            std::snprintf(buf, sizeof buf, "indicator_cube(%g,d=%d)", f.sides[0], f.dim);
            return buf;
        case KernelFn::Kind::Tabulated: return "tabulated";
    }
    return "?";
}

inline std::string model_tag(const LevyModel& m) {
    if (m.kind == LevyModel::Kind::Gamma) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "gamma(b=%g)", m.b);
        return buf;
    }
    return "tabulated";
}

}  // namespace detail

// Discrete moving average against exact Gamma cell masses.  The cell mesh
// h must divide delta.  Indicator kernels use exact cell-coverage
// fractions; other kernels are evaluated at cell midpoints.
inline FieldSample simulate_field(const LevyModel& model, const KernelFn& f, double delta,
                                  const Window& window, double h, std::uint64_t seed,
                                  double gamma = 0.0) {
    if (model.kind != LevyModel::Kind::Gamma)
        throw config_error("simulate_field: only the Gamma basis has an exact cell scheme");
    if (!(h > 0.0) || !(delta > 0.0)) throw config_error("simulate_field: h, delta > 0 required");
    double ratio = delta / h;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw config_error("simulate_field: h must divide delta");
    if (window.dim > 2)
        throw config_error("simulate_field: simulation supports d <= 2");
    if (window.dim == 2 && f.kind != KernelFn::Kind::IndicatorCube)
        throw config_error("simulate_field: d = 2 requires an indicator kernel");

    const int d = window.dim;
    // bounding box of the window
    std::array<int, 2> jlo{INT32_MAX, INT32_MAX}, jhi{INT32_MIN, INT32_MIN};
    for (const auto& p : window.pts)
        for (int i = 0; i < d; ++i) {
            jlo[std::size_t(i)] = std::min(jlo[std::size_t(i)], p[std::size_t(i)]);
            jhi[std::size_t(i)] = std::max(jhi[std::size_t(i)], p[std::size_t(i)]);
        }
    // basis region: x with f(j delta - x) != 0 for some window j
    std::array<int, 2> clo{0, 0}, chi{0, 0};
    for (int i = 0; i < d; ++i) {
        double xmin = double(jlo[std::size_t(i)]) * delta - f.support_hi(i);
        double xmax = double(jhi[std::size_t(i)]) * delta - f.support_lo(i);
        clo[std::size_t(i)] = int(std::floor(xmin / h)) - 1;
        chi[std::size_t(i)] = int(std::ceil(xmax / h)) + 1;
    }
    GammaBasis basis = simulate_gamma_basis(d, clo, chi, h, model.b, seed);

    FieldSample out;
    out.window = window;
    out.delta = delta;
    out.m = m_bound(f, delta);
    out.seed = seed;
    out.model_tag = detail::model_tag(model);
    out.kernel_tag = detail::kernel_tag(f);
    out.values.resize(window.n());

    const bool indicator = f.kind == KernelFn::Kind::IndicatorCube;
    for (std::size_t w = 0; w < window.n(); ++w) {
        const auto& p = window.pts[w];
        double acc = 0.0;
        if (d == 1) {
            double t = double(p[0]) * delta;
            // f(t - x) != 0 for x in (t - hi, t - lo)
            double a = t - f.support_hi(0), b = t - f.support_lo(0);
            int c0 = int(std::floor(a / h)) - 1, c1 = int(std::ceil(b / h)) + 1;
            for (int c = std::max(c0, clo[0]); c <= std::min(c1, chi[0]); ++c) {
                double wgt;
                if (indicator) {
                    wgt = detail::cell_coverage(c, h, a, b);
                } else {
                    double mid = (double(c) + 0.5) * h;
                    wgt = f.eval(t - mid);
                }
                if (wgt != 0.0) acc += wgt * basis.mass(c);
            }
        } else {
            double tx = double(p[0]) * delta, ty = double(p[1]) * delta;
            double ax = tx - f.support_hi(0), bx = tx - f.support_lo(0);
            double ay = ty - f.support_hi(1), by = ty - f.support_lo(1);
            int cx0 = std::max(int(std::floor(ax / h)) - 1, clo[0]);
            int cx1 = std::min(int(std::ceil(bx / h)) + 1, chi[0]);
            int cy0 = std::max(int(std::floor(ay / h)) - 1, clo[1]);
            int cy1 = std::min(int(std::ceil(by / h)) + 1, chi[1]);
            for (int cx = cx0; cx <= cx1; ++cx) {
                double wx = detail::cell_coverage(cx, h, ax, bx);
                if (wx == 0.0) continue;
                for (int cy = cy0; cy <= cy1; ++cy) {
                    double wy = detail::cell_coverage(cy, h, ay, by);
                    if (wy != 0.0) acc += wx * wy * basis.mass(cx, cy);
                }
            }
        }
        if (!std::isfinite(acc)) throw numeric_error("simulate_field: non-finite value");
        out.values[w] = acc + gamma;
    }
    return out;
}

struct LagCorrelation {
    LatticePoint lag{0, 0, 0};
    double correlation = 0.0;
    std::size_t n_pairs = 0;
    bool flagged = false;  // |corr| > 4/sqrt(n_pairs) beyond the declared m
};

// Empirical autocorrelations per lag vector; lags beyond the declared
// dependence range m with significant correlation are flagged.
inline std::vector<LagCorrelation> dependence_diagnostic(const FieldSample& sample,
                                                         int max_lag) {
    if (max_lag < sample.m) throw config_error("dependence_diagnostic: max_lag must be >= m");
    const int d = sample.window.dim;
    std::map<LatticePoint, std::size_t> index;
    for (std::size_t i = 0; i < sample.window.n(); ++i) index[sample.window.pts[i]] = i;

    double mean = 0.0;
    for (double y : sample.values) mean += y;
    mean /= double(sample.values.size());
    double var = 0.0;
    for (double y : sample.values) var += (y - mean) * (y - mean);
    var /= double(sample.values.size());

    std::vector<LatticePoint> lags;
    if (d == 1) {
        for (int l = 0; l <= max_lag; ++l) lags.push_back({l, 0, 0});
    } else {
        for (int lx = 0; lx <= max_lag; ++lx)
            for (int ly = (lx == 0 ? 0 : -max_lag); ly <= max_lag; ++ly)
                lags.push_back({lx, ly, 0});
    }

    std::vector<LagCorrelation> out;
    for (const auto& lag : lags) {
        double acc = 0.0;
        std::size_t n_pairs = 0;
        for (std::size_t i = 0; i < sample.window.n(); ++i) {
            LatticePoint q = sample.window.pts[i];
            for (int k = 0; k < d; ++k) q[std::size_t(k)] += lag[std::size_t(k)];
            auto it = index.find(q);
            if (it == index.end()) continue;
            acc += (sample.values[i] - mean) * (sample.values[it->second] - mean);
            ++n_pairs;
        }
        LagCorrelation row;
        row.lag = lag;
        row.n_pairs = n_pairs;
        row.correlation = (n_pairs > 0 && var > 0.0) ? acc / (double(n_pairs) * var) : 0.0;
        int linf = 0;
        for (int k = 0; k < d; ++k) linf = std::max(linf, std::abs(lag[std::size_t(k)]));
        // 4 sigma: many lag/seed combinations are scanned at once, so a
        // 3 sigma rule would fire spuriously every few hundred checks
        row.flagged = linf > sample.m && n_pairs > 0 &&
                      std::abs(row.correlation) > 4.0 / std::sqrt(double(n_pairs));
        out.push_back(row);
    }
    return out;
}

// CSV: metadata header, then one row per lattice point.
inline void write_csv(const FieldSample& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open " + path);
    out << "d,delta,m,seed,model,kernel\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%llu,%s,%s\n", s.window.dim, s.delta, s.m,
                  (unsigned long long)s.seed, s.model_tag.c_str(), s.kernel_tag.c_str());
    out << buf;
    for (int i = 0; i < s.window.dim; ++i) out << "j_" << (i + 1) << ",";
    out << "y\n";
    for (std::size_t i = 0; i < s.window.n(); ++i) {
        for (int k = 0; k < s.window.dim; ++k)
            out << s.window.pts[i][std::size_t(k)] << ",";
        std::snprintf(buf, sizeof buf, "%.17g\n", s.values[i]);
        out << buf;
    }
}

inline FieldSample read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // column names of the metadata row
    if (!std::getline(in, line)) throw config_error("truncated field CSV: " + path);
    FieldSample s;
    int d = 0;
    unsigned long long seed = 0;
    char model[64] = {0}, kernel[64] = {0};
    if (std::sscanf(line.c_str(), "%d,%lf,%d,%llu,%63[^,],%63[^,\n]", &d, &s.delta, &s.m,
                    &seed, model, kernel) != 6)
        throw config_error("malformed field CSV metadata in " + path + ": " + line);
    if (d < 1 || d > 3) throw config_error("field CSV: bad dimension");
    s.seed = seed;
    s.model_tag = model;
    s.kernel_tag = kernel;
    s.window.dim = d;
    std::getline(in, line);  // per-point column header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        LatticePoint p{0, 0, 0};
        double y = 0.0;
        int ok = 0;
        if (d == 1) ok = std::sscanf(line.c_str(), "%d,%lf", &p[0], &y) == 2;
        else if (d == 2) ok = std::sscanf(line.c_str(), "%d,%d,%lf", &p[0], &p[1], &y) == 3;
        else ok = std::sscanf(line.c_str(), "%d,%d,%d,%lf", &p[0], &p[1], &p[2], &y) == 4;
        if (!ok) throw config_error("malformed field CSV row in " + path + ": " + line);
        s.window.pts.push_back(p);
        s.values.push_back(y);
    }
    return s;
}

}  // namespace levyma

#endif
