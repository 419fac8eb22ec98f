#pragma once

#include <array>
#include <cstdint>

namespace collapse_kaon {

/**
 * Philox4x32-10 counter-based generator. Each (key, counter) pair maps to four
 * independent 32-bit words, so a stream per trajectory is just a key plus the
 * trajectory index in the high counter words; no state is shared.
 */
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    static Block generate(Block counter, std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * counter[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * counter[2];
            counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                       static_cast<std::uint32_t>(p1),
                       static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                       static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return counter;
    }
};

/// Standard normal variates for one trajectory of one run.
class NormalStream {
public:
    NormalStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          stream_(stream_index) {}

    double next();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace collapse_kaon
