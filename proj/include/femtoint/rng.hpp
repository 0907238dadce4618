#pragma once

// Counter-based random streams. Philox4x32-10 (Salmon et al., SC'11) turns
// (seed, substream, tag) into generator state, so every snapshot owns a
// stream that does not depend on how snapshots are scheduled.

#include <array>
#include <cstdint>
#include <limits>

namespace femtoint {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key)
{
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += W0;
            key[1] += W1;
        }
        const std::uint64_t p0 = std::uint64_t{M0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{M1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

/// Random stream for one (seed, substream, tag). Philox4x32-10 maps the
/// triple to a 256-bit state (two blocks, counter words 2-3 = substream,
/// word 1 = tag, word 0 = block), and xoshiro256++ produces the draws from
/// there. Substreams are therefore independent of scheduling order while the
/// per-draw cost stays that of a small sequential generator.
class SnapshotStream {
public:
    using result_type = std::uint64_t;

    SnapshotStream(std::uint64_t seed, std::uint64_t substream, std::uint32_t tag = 0)
    {
        const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        for (std::uint32_t block = 0; block < 2; ++block) {
            const PhiloxCounter out = philox4x32_10(
                {block, tag, static_cast<std::uint32_t>(substream),
                 static_cast<std::uint32_t>(substream >> 32)},
                key);
            state_[2 * block] = (std::uint64_t{out[0]} << 32) | out[1];
            state_[2 * block + 1] = (std::uint64_t{out[2]} << 32) | out[3];
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 1; // xoshiro must not start from the all-zero state
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace femtoint
