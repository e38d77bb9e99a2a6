#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace shearsync {

// Philox4x32-10 counter-based generator. Stateless: output is a pure
// function of (counter, key), so any cell of a noise path can be produced
// in any order, on any worker, without replaying prefixes.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    using ctr_t = std::array<std::uint32_t, 4>;
    using key_t = std::array<std::uint32_t, 2>;

    static ctr_t run(ctr_t c, key_t k) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMul0) * c[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * c[2];
            const ctr_t next = {
                std::uint32_t(p1 >> 32) ^ c[1] ^ k[0],
                std::uint32_t(p1),
                std::uint32_t(p0 >> 32) ^ c[3] ^ k[1],
                std::uint32_t(p0),
            };
            c = next;
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        return c;
    }
};

namespace detail {

inline std::uint64_t join64(std::uint32_t lo, std::uint32_t hi) {
    return (std::uint64_t(hi) << 32) | lo;
}

// Map to (0, 1]: never returns 0, so log() of the result is always finite.
inline double uniform_open_closed(std::uint64_t x) {
    return double((x >> 11) + 1) * 0x1p-53;
}

}  // namespace detail

// One Philox block -> two independent standard normals (Box-Muller).
inline void counter_normal_pair(std::uint64_t seed, std::uint64_t pair_index,
                                std::uint32_t channel, std::uint32_t stream,
                                double& z0, double& z1) {
    const Philox4x32::ctr_t ctr = {
        std::uint32_t(pair_index),
        std::uint32_t(pair_index >> 32),
        channel,
        stream,
    };
    const Philox4x32::key_t key = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
    const auto r = Philox4x32::run(ctr, key);
    const double u1 = detail::uniform_open_closed(detail::join64(r[0], r[1]));
    const double u2 = detail::uniform_open_closed(detail::join64(r[2], r[3]));
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    z0 = rad * std::cos(ang);
    z1 = rad * std::sin(ang);
}

// Standard normal for a signed grid index: adjacent indices share one Philox
// block (Box-Muller yields a pair). Index may be negative (pullback windows
// reach before t=0); >> on a negative value is an arithmetic shift, so the
// (2k, 2k+1) pairing is consistent across zero.
inline double counter_normal(std::uint64_t seed, std::int64_t index,
                             std::uint32_t channel, std::uint32_t stream) {
    double z0, z1;
    counter_normal_pair(seed, std::uint64_t(index >> 1), channel, stream, z0, z1);
    return (index & 1) ? z1 : z0;
}

// Uniform (0, 1] draw for non-path uses (initial conditions, bootstrap).
// stream 0 is reserved for these so they can never collide with noise
// increments, which always use stream >= 1.
inline double counter_uniform(std::uint64_t seed, std::uint64_t index,
                              std::uint32_t tag) {
    const Philox4x32::ctr_t ctr = {
        std::uint32_t(index),
        std::uint32_t(index >> 32),
        tag,
        0u,
    };
    const Philox4x32::key_t key = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
    const auto r = Philox4x32::run(ctr, key);
    return detail::uniform_open_closed(detail::join64(r[0], r[1]));
}

// splitmix64: cheap seed derivation for job -> seed maps. Pure function of
// its argument, so sweep cells get reproducible seeds independent of
// scheduling order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace shearsync
