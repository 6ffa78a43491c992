#pragma once

#include <array>
#include <cstdint>

namespace loglin::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key carries the experiment seed; the high half of the 128-bit
/// counter carries the stream id and the low half the block index. Distinct
/// (seed, stream) pairs therefore produce independent, reproducible sequences
/// no matter which thread consumes them or in what order streams are created.
class Philox {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    Block generate(std::uint64_t block_index) const {
        Block ctr{static_cast<std::uint32_t>(block_index),
                  static_cast<std::uint32_t>(block_index >> 32),
                  static_cast<std::uint32_t>(stream_),
                  static_cast<std::uint32_t>(stream_ >> 32)};
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

    /// Raw block function for known-answer tests: arbitrary counter and key.
    static Block block(Block ctr, std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static Block single_round(const Block& ctr, const std::array<std::uint32_t, 2>& key) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
};

} // namespace loglin::rng
