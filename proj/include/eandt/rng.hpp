#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace eandt {

// splitmix64 step (Vigna). Used for seeding and substream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256** — portable 64-bit generator; all sampling helpers below are
// fully specified so results are identical across platforms and compilers.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, bound) by masked rejection; bound > 0.
    std::uint64_t uniform_index(std::uint64_t bound) {
        std::uint64_t mask = ~0ull;
        const std::uint64_t range = bound - 1;
        mask >>= __builtin_clzll(range | 1);
        std::uint64_t x;
        do {
            x = next() & mask;
        } while (x > range);
        return x;
    }

    // Standard normal via Box-Muller (polar form avoided to keep the draw
    // count data-independent: two uniforms per call).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Derives a substream seed from a base seed and task coordinates, so
    // independent work units draw from independent streams regardless of
    // scheduling.
    static std::uint64_t mix(std::uint64_t seed,
                             std::initializer_list<std::uint64_t> parts) {
        std::uint64_t s = seed;
        std::uint64_t acc = splitmix64(s);
        for (std::uint64_t p : parts) {
            s ^= p + 0x9e3779b97f4a7c15ull + (acc << 6) + (acc >> 2);
            acc = splitmix64(s);
        }
        return acc;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_;
};

}  // namespace eandt
