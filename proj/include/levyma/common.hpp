#ifndef LEVYMA_COMMON_HPP
#define LEVYMA_COMMON_HPP

#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyma {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Error categories used across the library.  Config problems (bad input
// files, misaligned meshes) are distinguished from numeric-integrity
// failures detected at runtime (non-finite values, route disagreement).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool is_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_finite(const std::vector<cplx>& v, const char* what) {
    for (const auto& z : v)
        if (!is_finite(z)) throw numeric_error(std::string(what) + ": non-finite value");
}

inline double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace levyma

#endif
