#pragma once

// Counter-based random streams.
//
// Every draw is a pure function of (master_seed, stream_id, index), computed
// with the Philox4x32-10 block function. No generator carries state, so a
// Monte Carlo trial produces the same numbers no matter which thread runs
// it or in what order.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace pnlab {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11), bit-compatible with Random123.
inline PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += detail::kPhiloxW0;
            key[1] += detail::kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo32(detail::kPhiloxM0, ctr[0], hi0, lo0);
        detail::mulhilo32(detail::kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// Open-interval (0,1) double from 64 random bits.
inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Purpose tags for child streams. A trial derives one child per consumer so
/// that, e.g., adding AWGN never shifts the phase-noise draws.
enum class StreamPurpose : std::uint64_t {
    Symbols = 1,
    Phase = 2,
    Noise = 3,
    Oracle = 4,
    Training = 5,
};

/// A random stream identified by (master_seed, stream_id).
class RandomStream {
public:
    constexpr RandomStream() = default;
    constexpr RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed_(master_seed), stream_id_(stream_id) {}

    constexpr std::uint64_t master_seed() const noexcept { return master_seed_; }
    constexpr std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Stream for the `index`-th sub-experiment (e.g. Monte Carlo trial).
    constexpr RandomStream substream(std::uint64_t index) const {
        return {master_seed_, detail::splitmix64(stream_id_ ^ detail::splitmix64(index + 0x51ED27A3ull))};
    }

    constexpr RandomStream child(StreamPurpose purpose) const {
        return substream(0xC0FFEE0000000000ull | static_cast<std::uint64_t>(purpose));
    }

    PhiloxBlock block(std::uint64_t counter) const {
        const PhiloxBlock ctr{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                              static_cast<std::uint32_t>(stream_id_),
                              static_cast<std::uint32_t>(stream_id_ >> 32)};
        const PhiloxKey key{static_cast<std::uint32_t>(master_seed_),
                            static_cast<std::uint32_t>(master_seed_ >> 32)};
        return philox4x32_10(ctr, key);
    }

    double uniform(std::uint64_t index) const {
        const auto b = block(index);
        return to_unit_open(b[0], b[1]);
    }

    /// Two independent standard normals from block `counter` (Box-Muller).
    std::complex<double> normal_pair(std::uint64_t counter) const {
        const auto b = block(counter);
        const double u1 = to_unit_open(b[0], b[1]);
        const double u2 = to_unit_open(b[2], b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    /// Standard normal number `index` of this stream; indices 2c and 2c+1 share a block.
    double normal(std::uint64_t index) const {
        const auto z = normal_pair(index >> 1);
        return (index & 1u) ? z.imag() : z.real();
    }

    /// Circularly-symmetric complex normal with E|z|^2 = 1.
    std::complex<double> complex_normal(std::uint64_t index) const {
        return normal_pair(index) * std::numbers::sqrt2 * 0.5;
    }

    friend constexpr bool operator==(const RandomStream&, const RandomStream&) = default;

private:
    std::uint64_t master_seed_ = 0;
    std::uint64_t stream_id_ = 0;
};

}  // namespace pnlab
