#ifndef EMSPLAN_RNG_HPP
#define EMSPLAN_RNG_HPP

#include <cstdint>
#include <random>

namespace emsplan {

/// splitmix64 step; used to fan a manifest-level seed out into per-stage
/// sub-seeds (training, fit, search) without correlated streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive the sub-seed for stage `stage` from a root seed.
inline std::uint64_t subSeed(std::uint64_t root, std::uint64_t stage) {
    std::uint64_t state = root ^ (0xa0761d6478bd642fULL * (stage + 1));
    return splitmix64(state);
}

/// Deterministic random stream. All draws are generated from the raw
/// mt19937_64 output with fixed arithmetic, never through std::*_distribution
/// (whose sequences are implementation-defined), so seeded runs reproduce
/// bit-for-bit across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniformDouble() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Rejection-free for our purposes; the modulo
    /// bias at n << 2^64 is far below any statistical test used here.
    std::uint64_t uniformIndex(std::uint64_t n) {
        return engine_() % n;
    }

    bool bernoulli(double p) { return uniformDouble() < p; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace emsplan

#endif
