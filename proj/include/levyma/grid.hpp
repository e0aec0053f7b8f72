#ifndef LEVYMA_GRID_HPP
#define LEVYMA_GRID_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace levyma {

// Complex-valued function sampled on a uniform real grid.
struct GridFn {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<cplx> values;

    GridFn() = default;
    GridFn(double lo_, double hi_, std::size_t n_pts)
        : lo(lo_), hi(hi_), values(n_pts) {
        if (n_pts < 2) throw config_error("GridFn: need at least 2 points");
        if (!(hi > lo)) throw config_error("GridFn: hi must exceed lo");
    }

    std::size_t n() const { return values.size(); }
    double step() const { return (hi - lo) / double(values.size() - 1); }
    double x(std::size_t i) const { return lo + double(i) * step(); }

    template <typename F>
    static GridFn sample(double lo, double hi, std::size_t n_pts, F&& f) {
        GridFn g(lo, hi, n_pts);
        for (std::size_t i = 0; i < n_pts; ++i) g.values[i] = cplx(f(g.x(i)));
        return g;
    }

    void check_finite(const char* what = "GridFn") const { require_finite(values, what); }
};

// Local cubic (4-point Lagrange) interpolation on a uniform grid.
// Outside [lo, hi] the function is treated as zero; out_of_range, when
// given, counts such queries for truncation diagnostics.
inline cplx interp_cubic(const GridFn& g, double x, std::size_t* out_of_range = nullptr) {
    const double h = g.step();
    if (x < g.lo || x > g.hi) {
        if (out_of_range) ++(*out_of_range);
        return {0.0, 0.0};
    }
    const std::size_t n = g.n();
    double u = (x - g.lo) / h;
    long k = long(std::floor(u)) - 1;
    if (k < 0) k = 0;
    if (k > long(n) - 4) k = long(n) - 4;
    double t = u - double(k + 1);
    // Lagrange weights for nodes at t = -1, 0, 1, 2.
    double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return w0 * g.values[k] + w1 * g.values[k + 1] + w2 * g.values[k + 2] +
           w3 * g.values[k + 3];
}

// Carrier for functions on R^x = R \ {0}: values on the two half-lines
// x = +e^s and x = -e^s over a shared uniform s-grid.
struct LogGridFn {
    double s_lo = 0.0;
    double s_hi = 0.0;
    std::vector<cplx> pos;
    std::vector<cplx> neg;

    LogGridFn() = default;
    LogGridFn(double s_lo_, double s_hi_, std::size_t n_pts)
        : s_lo(s_lo_), s_hi(s_hi_), pos(n_pts), neg(n_pts) {
        if (n_pts < 2) throw config_error("LogGridFn: need at least 2 points");
        if (!(s_hi > s_lo)) throw config_error("LogGridFn: s_hi must exceed s_lo");
    }

    std::size_t n() const { return pos.size(); }
    double step() const { return (s_hi - s_lo) / double(pos.size() - 1); }
    double s(std::size_t i) const { return s_lo + double(i) * step(); }

    void check_finite(const char* what = "LogGridFn") const {
        require_finite(pos, what);
        require_finite(neg, what);
    }
};

// L2(R) inner product of log-grid carriers: dx = e^s ds on each branch.
inline cplx log_grid_inner(const LogGridFn& a, const LogGridFn& b) {
    if (a.n() != b.n()) throw config_error("log_grid_inner: grid mismatch");
    cplx acc{0.0, 0.0};
    const double ds = a.step();
    for (std::size_t i = 0; i < a.n(); ++i) {
        double w = std::exp(a.s(i)) * ds;
        acc += w * (a.pos[i] * std::conj(b.pos[i]) + a.neg[i] * std::conj(b.neg[i]));
    }
    return acc;
}

inline double log_grid_norm(const LogGridFn& a) {
    return std::sqrt(std::abs(log_grid_inner(a, a)));
}

// ---- CSV serialization ----

inline void write_csv(const GridFn& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open " + path);
    out << "x,re,im\n";
    char buf[128];
    for (std::size_t i = 0; i < g.n(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.x(i),
                      g.values[i].real(), g.values[i].imag());
        out << buf;
    }
}

inline GridFn read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> xs;
    std::vector<cplx> vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double x, re, im;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &re, &im) != 3)
            throw config_error("malformed CSV row in " + path + ": " + line);
        xs.push_back(x);
        vs.push_back(cplx(re, im));
    }
    if (xs.size() < 2) throw config_error("CSV too short: " + path);
    GridFn g(xs.front(), xs.back(), xs.size());
    g.values = std::move(vs);
    return g;
}

inline void write_csv(const LogGridFn& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open " + path);
    out << "s,pos_re,pos_im,neg_re,neg_im\n";
    char buf[192];
    for (std::size_t i = 0; i < w.n(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", w.s(i),
                      w.pos[i].real(), w.pos[i].imag(), w.neg[i].real(),
                      w.neg[i].imag());
        out << buf;
    }
}

inline LogGridFn read_log_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    std::vector<double> ss;
    std::vector<cplx> ps, ns;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double s, pr, pim, nr, nim;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &s, &pr, &pim, &nr,
                        &nim) != 5)
            throw config_error("malformed CSV row in " + path + ": " + line);
        ss.push_back(s);
        ps.push_back(cplx(pr, pim));
        ns.push_back(cplx(nr, nim));
    }
    if (ss.size() < 2) throw config_error("CSV too short: " + path);
    LogGridFn w(ss.front(), ss.back(), ss.size());
    w.pos = std::move(ps);
    w.neg = std::move(ns);
    return w;
}

}  // namespace levyma

#endif
