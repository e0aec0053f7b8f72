#ifndef LEVYMA_RNG_HPP
#define LEVYMA_RNG_HPP

#include <cstdint>
#include <cmath>

#include "common.hpp"

namespace levyma {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream: the state is derived by hashing a key chain, so a
// stream keyed by (seed, cell index) is independent of any other cell and
// stable when the simulated region grows.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

    Rng derive(std::uint64_t key) const {
        Rng r(0);
        r.state_ = splitmix64(state_ ^ (key * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
        return r;
    }

    Rng derive(std::int64_t k0, std::int64_t k1) const {
        return derive(std::uint64_t(k0)).derive(std::uint64_t(k1) ^ 0x5851f42d4c957f2dULL);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform on (0,1); never returns 0 or 1 exactly.
    double uniform() {
        return (double(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform(), v = uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 2.0 * pi * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Marsaglia-Tsang for shape >= 1, boosted by U^{1/shape} below 1.
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0))
            throw domain_error("gamma sampler: shape and rate must be positive");
        if (shape < 1.0) {
            double u = uniform();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            double v = t * t * t;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace levyma

#endif
