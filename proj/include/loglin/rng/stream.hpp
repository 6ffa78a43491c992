#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "loglin/rng/philox.hpp"

namespace loglin::rng {

/// One reproducible random stream, owned by exactly one run.
///
/// Identical (seed, stream_id) always replays the identical sequence; the
/// scheduler never touches stream state. Uniform and Gaussian draws consume
/// the underlying counter sequentially.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : engine_(seed, stream_id), seed_(seed), stream_id_(stream_id) {}

    static constexpr std::string_view algorithm_tag = "philox4x32-10";

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint32_t next_u32() {
        if (buf_pos_ == 4) {
            buf_ = engine_.generate(block_++);
            buf_pos_ = 0;
        }
        return buf_[buf_pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    /// Uniform on (0, 1]; never exactly zero, so log(u) is always finite.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second draw of each pair is cached.
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

private:
    Philox engine_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    Philox::Block buf_{};
    int buf_pos_ = 4;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace loglin::rng
