#ifndef DESVR_RANDOM_HPP
#define DESVR_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace desvr {

/// Seedable generator with platform-independent output.
///
/// std::mt19937_64 has a fully specified output sequence, but the standard
/// distributions do not, so uniform draws are derived from raw 64-bit words
/// here. Independent substreams are keyed by (seed, a, b); the optimizers use
/// (seed, generation, member) so that every population member gets its own
/// stream per generation and evaluation order cannot affect results.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : _engine(mix(seed)) {}

    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
    {
        std::uint64_t s = mix(seed);
        s = mix(s ^ (a + 0x632be59bd9b4e019ULL));
        s = mix(s ^ (b + 0x8cb92ba72f3d8dd7ULL));
        return Rng(s);
    }

    std::uint64_t next() { return _engine(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = next();
        while (x >= limit)
            x = next();
        return x % n;
    }

    /// Standard normal via Box-Muller.
    double normal()
    {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// splitmix64 finalizer.
    static std::uint64_t mix(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 _engine;
};

} // namespace desvr

#endif
