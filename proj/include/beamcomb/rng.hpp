#ifndef BEAMCOMB_RNG_HPP
#define BEAMCOMB_RNG_HPP

#include <cmath>
#include <cstdint>

#include "beamcomb/core.hpp"

namespace beamcomb {

namespace detail {
inline uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace detail

// Counter-style seeded stream. All draws are derived with portable integer
// and libm arithmetic so identical seeds reproduce identical streams.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed ^ 0x5851f42d4c957f2dull) {
        // warm up so nearby seeds decorrelate
        detail::splitmix64(state_);
        detail::splitmix64(state_);
    }

    // seed for a derived stream, order-independent in idx
    static uint64_t derive(uint64_t master, uint64_t idx) {
        uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (idx + 1));
        detail::splitmix64(s);
        return detail::splitmix64(s);
    }

    uint64_t next_u64() { return detail::splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal, Box-Muller
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = m * std::sin(a);
        have_spare_ = true;
        return m * std::cos(a);
    }

    // circular complex Gaussian with E|z|^2 = var
    cx cgaussian(double var = 1.0) {
        const double s = std::sqrt(var * 0.5);
        const double re = gaussian();
        const double im = gaussian();
        return cx(s * re, s * im);
    }

  private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace beamcomb

#endif
