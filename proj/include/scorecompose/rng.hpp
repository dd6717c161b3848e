/**
 * RandomStream — seeded PRNG for deterministic Monte Carlo runs.
 *
 * xoshiro256** core seeded through splitmix64, with counter-style
 * substream derivation so that sample i of a batch always sees the same
 * draws no matter how the batch is split across threads.
 *
 * Header-only. No dependencies beyond <cstdint> and <cmath>.
 */

#ifndef SCORECOMPOSE_RNG_HPP
#define SCORECOMPOSE_RNG_HPP

#include <cstdint>
#include <cmath>

namespace scorecompose {

/// splitmix64 finalizer; full-avalanche 64-bit mix.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) noexcept {
        // splitmix64 walk, the canonical xoshiro seeding procedure
        std::uint64_t s = seed;
        bool nonzero = false;
        for (auto& word : state_) {
            std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            word = z ^ (z >> 31);
            nonzero |= (word != 0);
        }
        if (!nonzero) state_[0] = 1;  // all-zero state is a fixed point
    }

    /// Independent stream for (master seed, index); pure function of both.
    static RandomStream substream(std::uint64_t master, std::uint64_t index) noexcept {
        return RandomStream(mix64(master ^ mix64(index)));
    }

    std::uint64_t next_u64() noexcept {
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

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double next_normal() noexcept {
        const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace scorecompose

#endif
