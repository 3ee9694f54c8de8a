#ifndef COVERT_PHILOX_HPP
#define COVERT_PHILOX_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

// Counter-based random number generation (Philox-4x32-10, Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11).
//
// Every random quantity in the simulator is a pure function of
// (master seed, stream id, trial index, block index), so any trial can be
// generated by any thread in any order and the results are bit-identical to a
// sequential run. This is the foundation of the determinism guarantees.

namespace covert::rng {

struct philox4x32 {
    using counter_t = std::array<std::uint32_t, 4>;
    using key_t = std::array<std::uint32_t, 2>;

    // Round multipliers and Weyl key increments from the reference
    // implementation (Random123).
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static counter_t encrypt(counter_t x, key_t key) noexcept {
        std::uint32_t k0 = key[0];
        std::uint32_t k1 = key[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(M0) * x[0];
            const std::uint64_t p1 = std::uint64_t(M1) * x[2];
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
            k0 += W0;
            k1 += W1;
        }
        return x;
    }
};

// Stream identifiers: keeping channel, noise, and symbol draws in disjoint
// streams means the consumption pattern of one cannot perturb another.
enum : std::uint32_t {
    stream_channel = 0,
    stream_noise = 1,
    stream_symbols = 2,
};

// One logical random stream: the sequence of 128-bit Philox blocks for a fixed
// (seed, stream id, trial index), consumed block by block.
class counter_stream {
public:
    counter_stream(std::uint64_t seed, std::uint32_t stream_id, std::uint64_t trial) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id),
          trial_lo_(static_cast<std::uint32_t>(trial)),
          trial_hi_(static_cast<std::uint32_t>(trial >> 32)) {}

    philox4x32::counter_t next_block() noexcept {
        return philox4x32::encrypt({block_++, stream_id_, trial_lo_, trial_hi_}, key_);
    }

    // One uniform double in (0, 1] from a full 64-bit lane (53 significant
    // bits). The half-open-at-zero convention keeps log(u) finite.
    double next_unit(void) noexcept {
        const auto b = next_block();
        return to_unit(b[0], b[1]);
    }

    // One circularly-symmetric complex Gaussian sample with E|n|² = variance
    // (real and imaginary parts each carry variance/2). Trigonometric
    // Box-Muller: exactly one Philox block per complex sample, so the block
    // consumption per trial is a fixed, easily reasoned-about count.
    std::complex<double> next_cnormal(double variance) noexcept {
        const auto b = next_block();
        const double u1 = to_unit(b[0], b[1]);
        const double u2 = to_unit(b[2], b[3]);
        const double r = std::sqrt(-variance * std::log(u1)); // -2·(σ²/2)·ln u
        const double theta = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
        const std::uint64_t u = (std::uint64_t(hi) << 32) | lo;
        return static_cast<double>((u >> 11) + 1) * 0x1.0p-53; // (0, 1]
    }

    philox4x32::key_t key_;
    std::uint32_t stream_id_;
    std::uint32_t block_ = 0;
    std::uint32_t trial_lo_;
    std::uint32_t trial_hi_;
};

// splitmix64: cheap, well-mixed 64->64 hash used to derive independent
// sub-seeds (per sweep row, per rate) from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace covert::rng

#endif // COVERT_PHILOX_HPP
