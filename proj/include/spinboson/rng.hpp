// rng.hpp: Philox4x32-10 counter-based generator
//
// Each (seed, stream) pair is an independent sequence, so a sample block or
// a Markov chain can be reproduced from its index alone regardless of which
// worker thread ran it.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace spinboson {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Ten rounds of the Philox 4x32 bijection.
constexpr PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) noexcept {
    constexpr std::uint32_t m0 = 0xD2511F53U;
    constexpr std::uint32_t m1 = 0xCD9E8D57U;
    constexpr std::uint32_t w0 = 0x9E3779B9U;
    constexpr std::uint32_t w1 = 0xBB67AE85U;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

// UniformRandomBitGenerator producing 64-bit words. Key = seed, the upper
// counter half = stream id, the lower half counts blocks.
class Philox {
public:
    using result_type = std::uint64_t;

    Philox(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (pos_ == 2) refill();
        return words_[pos_++];
    }

    // Uniform on the open interval (0, 1), 53 random bits.
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
    double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }
    double exponential() noexcept { return -std::log(uniform()); }
    int sign() noexcept { return ((*this)() >> 63) != 0 ? 1 : -1; }

    // Uniform integer in [0, n), n > 0; unbiased by rejection.
    std::uint64_t below(std::uint64_t n) noexcept {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do x = (*this)();
        while (x >= limit);
        return x % n;
    }

    std::uint64_t blocks_used() const noexcept { return counter_; }

private:
    void refill() noexcept {
        const PhiloxBlock out = philox4x32_10(
            {static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
            key_);
        ++counter_;
        words_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        words_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        pos_ = 0;
    }

    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t counter_{0};
    std::array<std::uint64_t, 2> words_{};
    int pos_{2};
};

// Stream id namespaces, so different consumers of one seed never overlap.
enum class StreamKind : std::uint64_t {
    partition_block = 1,
    chain = 2,
    free_statistics = 3,
    misc = 4,
};

constexpr std::uint64_t stream_id(StreamKind kind, std::uint64_t index) noexcept {
    return (static_cast<std::uint64_t>(kind) << 48) | (index & 0xFFFFFFFFFFFFULL);
}

}  // namespace spinboson
