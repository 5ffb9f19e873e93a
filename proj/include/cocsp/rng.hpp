#pragma once

#include <cstdint>

namespace cocsp {

// Deterministic 64-bit generator (splitmix64). The standard <random>
// distributions are not pinned across library implementations, so every
// seeded component in this project draws through this class instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1)
            return 0;
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold)
                return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return uniform01() < p; }

private:
    std::uint64_t state_;
};

// Stable derivation of independent stream seeds (run index, probe index, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    Rng rng(base + 0x632be59bd9b4e019ull * (salt + 1));
    return rng.next_u64();
}

} // namespace cocsp
