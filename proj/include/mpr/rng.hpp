#ifndef MPR_RNG_HPP
#define MPR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace mpr {

// SplitMix64 finalizer; used to derive independent stream seeds from
// (base seed, index) pairs so that parallel replicates are reproducible
// regardless of scheduling order.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(mix64(base) ^ (0x2545f4914f6cdd1dULL * (index + 1)));
}

// Deterministic random source. std::mt19937_64's output sequence is pinned
// by the standard; the uniform/normal transforms are implemented here rather
// than with std::*_distribution (whose output is implementation-defined),
// so identical seeds give identical draws on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1), 53-bit resolution
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform on (0, 1); safe under log()
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal via Box-Muller, pair cached
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = r * std::sin(angle);
        have_spare_ = true;
        return r * std::cos(angle);
    }

    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

    // uniform integer in [0, n); modulo bias is negligible for the small n
    // used here (population indices)
    std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mpr

#endif
