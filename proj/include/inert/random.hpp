#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace inert {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every draw is a pure function of (key, counter): a particle's stream can be
/// regenerated from any step without stored state.
struct Philox4x32 {
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static counter_type block(counter_type ctr, key_type key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Independent substreams carved out of one user seed.
enum class Stream : std::uint32_t {
    brownian = 1,
    initial = 2,
    bridge = 3,
};

/// SplitMix64 finalizer; used to derive child seeds (replicate r of seed s, ...).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
    return mix64(mix64(seed ^ mix64(a + 0x632BE59BD9B4E019ull)) ^ mix64(b + 0x85157AF5ull));
}

/// 4 x 32 random bits for (seed, stream, index, counter).
inline Philox4x32::counter_type random_block(std::uint64_t seed, Stream stream,
                                             std::uint64_t index, std::uint64_t counter) noexcept {
    const Philox4x32::counter_type ctr{
        static_cast<std::uint32_t>(counter),
        static_cast<std::uint32_t>((counter >> 32) & 0x00FFFFFFu) |
            (static_cast<std::uint32_t>(stream) << 24),
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const Philox4x32::key_type key{static_cast<std::uint32_t>(index),
                                   static_cast<std::uint32_t>(index >> 32)};
    return Philox4x32::block(ctr, key);
}

/// Maps 32 random bits to the open interval (0, 1).
constexpr double to_open_unit(std::uint32_t w) noexcept {
    return (static_cast<double>(w) + 0.5) * 0x1p-32;
}

/// Two standard normals (Box-Muller) plus two spare uniforms from one block.
struct NormalPair {
    double z0;
    double z1;
    double u0;
    double u1;
};

inline NormalPair normal_pair(std::uint64_t seed, Stream stream, std::uint64_t index,
                              std::uint64_t counter) noexcept {
    const auto w = random_block(seed, stream, index, counter);
    const double r = std::sqrt(-2.0 * std::log(to_open_unit(w[0])));
    const double theta = 2.0 * std::numbers::pi * to_open_unit(w[1]);
    return {r * std::cos(theta), r * std::sin(theta), to_open_unit(w[2]), to_open_unit(w[3])};
}

/// Standard normal number `k` of the (seed, stream, index) sequence.
inline double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t index,
                              std::uint64_t k) noexcept {
    const auto p = normal_pair(seed, stream, index, k / 2);
    return (k & 1u) ? p.z1 : p.z0;
}

}  // namespace inert
