// Deterministic random stream (splitmix64). The standard <random>
// distributions are implementation-defined, so all draws here are spelled
// out explicitly to make run results reproducible across compilers.

#pragma once

#include <cstdint>

namespace phls {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, hi]; never returns zero.
    double uniform_pos(double hi) { return (1.0 - u01()) * hi; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + u01() * (hi - lo); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

// Stream derivation: hash the parent seed with a stream index so per-node
// and per-purpose streams are independent of draw order elsewhere.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace phls
